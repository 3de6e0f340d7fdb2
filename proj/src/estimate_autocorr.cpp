#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "f0bench/estimators.hpp"

namespace f0bench {

namespace {

// Vertex of the parabola through (k-1, k, k+1).
double refine_peak(const std::vector<double>& r, std::size_t k) {
  const double a = r[k - 1];
  const double b = r[k];
  const double c = r[k + 1];
  const double curvature = a - 2.0 * b + c;
  if (curvature >= 0.0) return static_cast<double>(k);
  return static_cast<double>(k) + 0.5 * (a - c) / curvature;
}

}  // namespace

EstimateResult estimate_autocorr(const Waveform& window) {
  const std::size_t n = window.size();
  const WindowSpan span{window.t0, window.duration()};
  if (n < 8) return EstimateResult::failure(Method::xcorr, span, "window too short");

  // Hann-tapered autocorrelation divided by the taper's own autocorrelation:
  // removes the triangular lag bias of the plain estimator.
  std::vector<double> taper(n);
  std::vector<double> xw(n);
  for (std::size_t i = 0; i < n; ++i) {
    taper[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
    xw[i] = window.samples[i] * taper[i];
  }
  const std::size_t max_lag = n / 2 + 1;
  std::vector<double> r(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) {
      num += xw[i] * xw[i + k];
      den += taper[i] * taper[i + k];
    }
    r[k] = den > 0.0 ? num / den : 0.0;
  }

  std::vector<std::size_t> candidates;
  for (std::size_t k = 1; k < max_lag; ++k) {
    if (r[k] > 0.0 && r[k] > r[k - 1] && r[k] >= r[k + 1]) candidates.push_back(k);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });

  // Strongest first; lag 0 anchors the spacing rule but is not reported.
  const double min_spacing = kMinPeakSpacing * window.fs;
  std::vector<std::size_t> kept{0};
  for (std::size_t k : candidates) {
    const bool clear = std::all_of(kept.begin(), kept.end(), [&](std::size_t j) {
      return std::abs(static_cast<double>(k) - static_cast<double>(j)) >= min_spacing;
    });
    if (clear) kept.push_back(k);
  }
  kept.erase(kept.begin());
  std::sort(kept.begin(), kept.end());

  if (kept.size() < 2) return EstimateResult::failure(Method::xcorr, span, "fewer than 2 autocorrelation maxima");

  const double first = refine_peak(r, kept.front());
  const double last = refine_peak(r, kept.back());
  const double spacing = (last - first) / static_cast<double>(kept.size() - 1);

  EstimateResult res;
  res.method = Method::xcorr;
  res.window = span;
  res.f0_hat = window.fs / spacing;
  res.diagnostics[diag::peak_count] = static_cast<double>(kept.size());
  res.diagnostics["mean_spacing_s"] = spacing / window.fs;
  return res;
}

}  // namespace f0bench
