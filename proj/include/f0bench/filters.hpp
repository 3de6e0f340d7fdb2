#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "f0bench/signal_model.hpp"

namespace f0bench {

/// Linear-phase FIR. Taps are exactly symmetric, so the group delay is order/2
/// samples at every frequency.
struct FirFilterSpec {
  int order = 0;
  std::array<double, 2> pass_band{0.0, 0.0};
  double fs = 0.0;
  std::vector<double> taps;

  std::size_t delay() const { return static_cast<std::size_t>(order / 2); }
};

/// Hamming-windowed sinc band-pass, unit gain at the band centre.
FirFilterSpec design_bandpass(double fs, int order = 100, std::array<double, 2> band = {46.0, 54.0});

/// Complex band-pass over the same band and order as `bandpass`, passing only
/// positive frequencies. Filtering a real signal with these taps yields the
/// analytic signal of its band-limited part; a tone at the band centre comes
/// out with its own amplitude. Taps are conjugate-symmetric about order/2.
std::vector<std::complex<double>> design_analytic(const FirFilterSpec& bandpass);

/// Hamming-windowed sinc low-pass with unit DC gain.
FirFilterSpec design_lowpass(double fs, double cutoff, int order);

/// |H(f)| of the taps.
double magnitude_response(const FirFilterSpec& filter, double f);

/// Convolution over the fully overlapped region only. Output sample i lines up
/// with input sample i + order/2, so the result is delay-compensated and has
/// order/2 samples trimmed from each end.
std::vector<double> filter_valid(std::span<const double> x, const FirFilterSpec& filter);

/// Anti-alias low-pass used ahead of downsampling by `factor`.
FirFilterSpec design_antialias(double fs, int factor);

/// Throws unless `factor` keeps 54 Hz below a quarter of the new Nyquist rate.
void check_decimation_factor(double fs, int factor);

/// Low-pass filtered, downsampled view of a full-rate record. Output samples
/// are taken at arbitrary full-rate positions, so windows need not align with
/// the decimation grid. Edges are extended by odd reflection.
class Decimator {
 public:
  Decimator(const Waveform& record, int factor);

  int factor() const { return factor_; }
  double output_fs() const { return record_->fs / factor_; }
  const Waveform& record() const { return *record_; }

  /// Filtered value at full-rate sample position `n` (may lie outside the record).
  double filtered_at(std::ptrdiff_t n) const;

  /// `count` decimated samples starting at full-rate position `first`.
  Waveform extract(std::ptrdiff_t first, std::size_t count) const;

 private:
  double sample(std::ptrdiff_t n) const;

  const Waveform* record_;
  int factor_;
  FirFilterSpec lowpass_;
};

/// Every factor-th sample of the low-passed window, fs divided by factor.
Waveform decimate(const Waveform& window, int factor);

}  // namespace f0bench
