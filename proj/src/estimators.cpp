#include "f0bench/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace f0bench {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::iec: return "iec";
    case Method::xcorr: return "xcorr";
    case Method::hilbert: return "hilbert";
    case Method::esprit: return "esprit";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Method m : kAllMethods) {
    if (lower == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "' (expected iec|xcorr|hilbert|esprit)");
}

EstimateResult EstimateResult::failure(Method m, WindowSpan w, std::string reason) {
  EstimateResult r;
  r.method = m;
  r.window = w;
  r.failed = true;
  r.failure_reason = std::move(reason);
  return r;
}

std::size_t context_samples(Method method, const EstimatorOptions& options) {
  const auto half = static_cast<std::size_t>(options.bandpass_order / 2);
  switch (method) {
    case Method::iec: return half;
    case Method::hilbert: return options.hilbert_prefilter ? half : 0;
    default: return 0;
  }
}

EstimateResult run_estimator(Method method, const Waveform& window, const FirFilterSpec& bandpass,
                             const EstimatorOptions& options) {
  switch (method) {
    case Method::iec: return estimate_iec(window, bandpass);
    case Method::xcorr: return estimate_autocorr(window);
    case Method::hilbert: return estimate_hilbert(window, options.hilbert_prefilter ? &bandpass : nullptr);
    case Method::esprit:
      return estimate_esprit(window, options.esprit_model_order, options.esprit_correlation_order,
                             options.esprit_max_order)
          .first;
  }
  throw std::invalid_argument("unknown method");
}

}  // namespace f0bench
