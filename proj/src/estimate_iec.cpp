#include <cmath>
#include <stdexcept>

#include "f0bench/estimators.hpp"

namespace f0bench {

EstimateResult estimate_iec(const Waveform& window, const FirFilterSpec& filter) {
  if (std::abs(filter.fs - window.fs) > 1e-9 * window.fs) {
    throw std::invalid_argument("IEC band-pass was designed for a different sampling rate");
  }
  const auto filtered = filter_valid(window.samples, filter);
  const WindowSpan span{window.time_at(filter.delay()), static_cast<double>(filtered.size()) / window.fs};
  if (filtered.size() < 2) return EstimateResult::failure(Method::iec, span, "window shorter than the band-pass");

  // Rising crossings, linearly interpolated between the bracketing samples.
  double first = 0.0;
  double last = 0.0;
  std::size_t crossings = 0;
  for (std::size_t i = 0; i + 1 < filtered.size(); ++i) {
    const double a = filtered[i];
    const double b = filtered[i + 1];
    if (a < 0.0 && b >= 0.0) {
      const double t = span.start + (static_cast<double>(i) + a / (a - b)) / window.fs;
      if (crossings == 0) first = t;
      last = t;
      ++crossings;
    }
  }
  if (crossings < 2) return EstimateResult::failure(Method::iec, span, "fewer than 2 rising zero crossings");

  EstimateResult r;
  r.method = Method::iec;
  r.window = span;
  const auto periods = static_cast<double>(crossings - 1);
  r.f0_hat = periods / (last - first);
  r.diagnostics[diag::period_count] = periods;
  r.diagnostics["first_crossing_s"] = first;
  r.diagnostics["last_crossing_s"] = last;
  return r;
}

}  // namespace f0bench
