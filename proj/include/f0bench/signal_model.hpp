#pragma once

// Test-signal generator for fundamental-frequency benchmarks.
//
// The generated voltage is a clipped-cosine carrier with square-wave driven
// amplitude and frequency modulation plus optional white Gaussian noise:
//
//   u(t) = [1 + k_am * m(t)] * sum_h A_h cos(2 pi h (f0 t + df0 * I(t)) + phi_h) + noise
//
// where m(t) = sign(sin(2 pi f_m t)) and I(t) is its running integral. The
// instantaneous fundamental is f0 + df0 * m(t), so the window-averaged
// reference frequency is known in closed form.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace f0bench {

struct TestSignalSpec {
  double f0 = 50.0;       // carrier fundamental, Hz
  double delta_f0 = 0.0;  // frequency deviation, Hz
  double f_m = 1.0;       // modulating frequency, Hz
  double k_am = 0.05;     // amplitude modulation coefficient
  double m_c = 1.0;       // clip level in (0, 1]
  int h_max = 49;         // highest harmonic order
  std::optional<double> snr_db;  // nullopt = noiseless
  double fs = 20480.0;    // Sa/s
  double duration = 10.0; // s
  std::uint64_t seed = 0;

  bool operator==(const TestSignalSpec&) const = default;
};

/// Throws std::invalid_argument naming the first violated invariant.
void validate(const TestSignalSpec& spec);

/// Number of samples fs * duration (validated to be integral).
std::size_t sample_count(const TestSignalSpec& spec);

/// Signed Fourier series of the clipped carrier, normalized to the fundamental.
/// Harmonic order h is 1-based; index through amplitude()/phase().
struct HarmonicSpectrum {
  std::vector<double> amplitudes;  // [h - 1]
  std::vector<double> phases;      // [h - 1], each 0 or pi

  int h_max() const { return static_cast<int>(amplitudes.size()); }
  double amplitude(int h) const { return amplitudes.at(static_cast<std::size_t>(h - 1)); }
  double phase(int h) const { return phases.at(static_cast<std::size_t>(h - 1)); }
  /// Signed coefficient amplitude * cos(phase).
  double coefficient(int h) const;
  /// RMS of harmonics 2..H relative to the fundamental.
  double thd() const;
};

struct Waveform {
  double fs = 0.0;
  std::vector<double> samples;
  double t0 = 0.0;

  std::size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / fs; }
  double time_at(std::size_t n) const { return t0 + static_cast<double>(n) / fs; }
};

struct WindowSpan {
  double start = 0.0;
  double length = 0.0;

  double end() const { return start + length; }
  bool operator==(const WindowSpan&) const = default;
};

/// Fourier coefficients of clamp(cos(theta), -m_c, m_c) from a 2^16-point
/// trapezoidal rule over one period. Even orders are zero by half-wave symmetry.
HarmonicSpectrum clipped_cosine_spectrum(double m_c, int h_max);

/// Square-wave modulator sign(sin(2 pi f_m t)), right-continuous (+1 at t = 0).
double u_mod(double t, double f_m);

/// Closed-form integral of u_mod from 0 to t: triangle wave with peak 1/(2 f_m).
double u_mod_integral(double t, double f_m);

/// Samples the test signal on t_n = n / fs. Deterministic for a given spec.
Waveform synthesize(const TestSignalSpec& spec);

/// Same as synthesize() but with a precomputed carrier spectrum.
Waveform synthesize(const TestSignalSpec& spec, const HarmonicSpectrum& spectrum);

/// Instantaneous fundamental f0 + delta_f0 * u_mod(t).
double f0_inst(double t, const TestSignalSpec& spec);

/// Exact time average of f0_inst over the window.
double reference_f0(const WindowSpan& window, const TestSignalSpec& spec);

}  // namespace f0bench
