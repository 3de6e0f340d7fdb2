#pragma once

// Fundamental-frequency estimators. Each maps one window to one estimate.
//
// Failure is an ordinary result (EstimateResult::failed), never an exception:
// exceptions are reserved for violated preconditions such as a bad model order.

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "f0bench/filters.hpp"
#include "f0bench/signal_model.hpp"

namespace f0bench {

enum class Method { iec, xcorr, hilbert, esprit };

inline constexpr std::array<Method, 4> kAllMethods{Method::iec, Method::xcorr, Method::hilbert, Method::esprit};

/// Lower-case CLI/CSV name: "iec", "xcorr", "hilbert", "esprit".
std::string_view to_string(Method m);
/// Case-insensitive inverse of to_string(). Throws std::invalid_argument.
Method parse_method(std::string_view name);

/// Stable diagnostic keys.
namespace diag {
inline constexpr const char* period_count = "period_count";
inline constexpr const char* peak_count = "peak_count";
inline constexpr const char* model_order = "model_order";
inline constexpr const char* subspace_residual = "subspace_residual";
inline constexpr const char* discarded_edge_fraction = "discarded_edge_fraction";
}  // namespace diag

struct EstimateResult {
  Method method = Method::iec;
  double f0_hat = 0.0;
  WindowSpan window;
  bool failed = false;
  std::string failure_reason;
  std::map<std::string, double> diagnostics;

  static EstimateResult failure(Method m, WindowSpan w, std::string reason);
};

/// One complex exponential A e^{j psi} e^{(alpha + j 2 pi f) n Ts}.
struct EspritComponent {
  double amplitude = 0.0;
  double phase = 0.0;      // rad
  double frequency = 0.0;  // Hz, signed
  double damping = 0.0;    // 1/s
};

struct EspritModel {
  int model_order = 0;
  int correlation_order = 0;
  std::vector<EspritComponent> components;
  double sample_interval = 0.0;
  double residual_power = 0.0;  // |x - x_hat|^2 / |x|^2
};

/// Knobs shared by the harness and the CLI.
struct EstimatorOptions {
  double operating_fs = 2560.0;
  int bandpass_order = 100;
  std::array<double, 2> band{46.0, 54.0};
  bool hilbert_prefilter = true;
  int esprit_model_order = 0;        // 0 = choose from the eigenvalue spread
  int esprit_correlation_order = 0;  // 0 = L / 3
  int esprit_max_order = 98;

  bool operator==(const EstimatorOptions&) const = default;
};

/// Zero-crossing period count. The window is filtered with `filter`; the
/// measured span excludes order/2 samples at each end.
EstimateResult estimate_iec(const Waveform& window, const FirFilterSpec& filter);

inline constexpr double kMinPeakSpacing = 0.0133;  // s

/// Autocorrelation peak spacing (no pre-filter).
EstimateResult estimate_autocorr(const Waveform& window);

/// Mean instantaneous frequency of the analytic signal. With a filter the
/// analytic signal comes from the complex band-pass of design_analytic,
/// trimmed like estimate_iec; without one, from the FFT of the raw window.
EstimateResult estimate_hilbert(const Waveform& window, const FirFilterSpec* filter);

inline constexpr std::array<double, 2> kEspritGate{40.0, 70.0};
inline constexpr double kNominalF0 = 50.0;

/// Subspace rotational-invariance fit. model_order 0 selects it from the
/// eigenvalues of the correlation matrix; correlation_order 0 means L / 3.
std::pair<EstimateResult, EspritModel> estimate_esprit(const Waveform& window, int model_order = 0,
                                                       int correlation_order = 0, int max_order = 98);

/// Analytic signal x + j H{x} by the FFT method.
std::vector<std::complex<double>> analytic_signal(const std::vector<double>& x);

/// Dispatches one method on an operating-rate window. Windows for the filtered
/// methods (IEC, Hilbert with prefilter) are expected to carry order/2 samples
/// of context on each side of the nominal span.
EstimateResult run_estimator(Method method, const Waveform& window, const FirFilterSpec& bandpass,
                             const EstimatorOptions& options);

/// Samples of filter context each filtered method wants around the nominal window.
std::size_t context_samples(Method method, const EstimatorOptions& options);

}  // namespace f0bench
