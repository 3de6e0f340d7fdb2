#include <algorithm>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/FFT>

#include "f0bench/estimators.hpp"

namespace f0bench {

namespace {
constexpr double kEdgeFraction = 0.1;
}

std::vector<std::complex<double>> analytic_signal(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::vector<std::complex<double>> in(x.begin(), x.end());
  std::vector<std::complex<double>> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, in);
  // Keep DC (and Nyquist for even n), double positive frequencies, drop negative ones.
  for (std::size_t k = 1; k < n; ++k) {
    if (2 * k < n) {
      spectrum[k] *= 2.0;
    } else if (2 * k > n) {
      spectrum[k] = 0.0;
    }
  }
  std::vector<std::complex<double>> out;
  fft.inv(out, spectrum);
  return out;
}

EstimateResult estimate_hilbert(const Waveform& window, const FirFilterSpec* filter) {
  std::vector<std::complex<double>> z;
  WindowSpan span{window.t0, window.duration()};
  if (filter) {
    // Band-pass and Hilbert transform in one complex FIR pass.
    const auto taps = design_analytic(*filter);
    const std::size_t n_taps = taps.size();
    if (window.size() >= n_taps) {
      z.resize(window.size() - n_taps + 1);
      for (std::size_t i = 0; i < z.size(); ++i) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t k = 0; k < n_taps; ++k) acc += taps[n_taps - 1 - k] * window.samples[i + k];
        z[i] = acc;
      }
    }
    span = {window.time_at(filter->delay()), static_cast<double>(z.size()) / window.fs};
  } else {
    z = analytic_signal(window.samples);
  }
  if (z.size() < 16) return EstimateResult::failure(Method::hilbert, span, "window too short");

  const std::size_t n = z.size();
  const auto edge = static_cast<std::size_t>(std::floor(kEdgeFraction * static_cast<double>(n)));
  const std::size_t lo = std::max<std::size_t>(edge, 1);
  const std::size_t hi = std::min(n - 1 - edge, n - 2);

  double peak = 0.0;
  for (const auto& v : z) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) return EstimateResult::failure(Method::hilbert, span, "zero analytic envelope");

  // Wrapped per-sample phase steps; unwrapping is unambiguous only while they
  // stay well inside (-pi, pi], otherwise the envelope passed through zero.
  double sum = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (std::abs(z[i]) < 1e-9 * peak) {
      return EstimateResult::failure(Method::hilbert, span, "analytic envelope vanishes inside the window");
    }
    const double before = std::arg(z[i] * std::conj(z[i - 1]));
    const double after = std::arg(z[i + 1] * std::conj(z[i]));
    if (std::abs(before) > std::numbers::pi / 2 || std::abs(after) > std::numbers::pi / 2) {
      return EstimateResult::failure(Method::hilbert, span, "instantaneous phase jump");
    }
    // Central difference of the unwrapped phase.
    sum += (before + after) / 2.0;
  }
  const auto count = static_cast<double>(hi - lo + 1);

  EstimateResult r;
  r.method = Method::hilbert;
  r.window = span;
  r.f0_hat = sum / count * window.fs / (2.0 * std::numbers::pi);
  r.diagnostics[diag::discarded_edge_fraction] = kEdgeFraction;
  return r;
}

}  // namespace f0bench
