#include "f0bench/filters.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace f0bench {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

double hamming(int n, int order) {
  return 0.54 - 0.46 * std::cos(2.0 * kPi * n / order);
}

// Fills taps for n <= order/2 from `ideal` and mirrors, so symmetry is exact.
template <typename Ideal>
std::vector<double> windowed_sinc(int order, Ideal ideal) {
  std::vector<double> taps(static_cast<std::size_t>(order) + 1);
  const int half = order / 2;
  for (int n = 0; n <= half; ++n) {
    const double v = ideal(static_cast<double>(n - half)) * hamming(n, order);
    taps[static_cast<std::size_t>(n)] = v;
    taps[static_cast<std::size_t>(order - n)] = v;
  }
  return taps;
}

}  // namespace

FirFilterSpec design_bandpass(double fs, int order, std::array<double, 2> band) {
  if (order < 2 || order % 2 != 0) throw std::invalid_argument("band-pass order must be even and >= 2");
  if (!(band[0] > 0.0 && band[0] < band[1] && band[1] < fs / 2.0)) {
    throw std::invalid_argument("pass band must lie inside (0, fs/2)");
  }
  const double lo = band[0] / fs;
  const double hi = band[1] / fs;
  FirFilterSpec f{order, band, fs, windowed_sinc(order, [&](double m) {
                    return 2.0 * hi * sinc(2.0 * hi * m) - 2.0 * lo * sinc(2.0 * lo * m);
                  })};
  const double gain = magnitude_response(f, 0.5 * (band[0] + band[1]));
  for (double& t : f.taps) t /= gain;
  return f;
}

std::vector<std::complex<double>> design_analytic(const FirFilterSpec& bandpass) {
  const int order = bandpass.order;
  const double centre = 0.5 * (bandpass.pass_band[0] + bandpass.pass_band[1]) / bandpass.fs;
  const double half_width = 0.5 * (bandpass.pass_band[1] - bandpass.pass_band[0]) / bandpass.fs;
  // Low-pass prototype shifted up to the band centre. The Kaiser window keeps
  // the image at -f some 80 dB down, which Hamming cannot reach at this length.
  constexpr double kBeta = 10.0;
  const double norm = std::cyl_bessel_i(0.0, kBeta);
  std::vector<std::complex<double>> taps(static_cast<std::size_t>(order) + 1);
  std::complex<double> gain{0.0, 0.0};
  for (int n = 0; n <= order; ++n) {
    const double m = static_cast<double>(n - order / 2);
    const double x = 2.0 * n / order - 1.0;
    const double w = std::cyl_bessel_i(0.0, kBeta * std::sqrt(1.0 - x * x)) / norm;
    taps[static_cast<std::size_t>(n)] = 2.0 * half_width * sinc(2.0 * half_width * m) * w *
                                        std::polar(2.0, 2.0 * kPi * centre * m);
    gain += taps[static_cast<std::size_t>(n)] * std::polar(1.0, -2.0 * kPi * centre * m);
  }
  // Envelope of the output equals the amplitude of a tone at the band centre.
  for (auto& t : taps) t *= 2.0 / std::abs(gain);
  return taps;
}

FirFilterSpec design_lowpass(double fs, double cutoff, int order) {
  if (order < 2 || order % 2 != 0) throw std::invalid_argument("low-pass order must be even and >= 2");
  if (!(cutoff > 0.0 && cutoff < fs / 2.0)) throw std::invalid_argument("cutoff must lie inside (0, fs/2)");
  const double fc = cutoff / fs;
  FirFilterSpec f{order, {0.0, cutoff}, fs,
                  windowed_sinc(order, [&](double m) { return 2.0 * fc * sinc(2.0 * fc * m); })};
  double dc = 0.0;
  for (double t : f.taps) dc += t;
  for (double& t : f.taps) t /= dc;
  return f;
}

double magnitude_response(const FirFilterSpec& filter, double f) {
  std::complex<double> acc{0.0, 0.0};
  const double w = -2.0 * kPi * f / filter.fs;
  for (std::size_t n = 0; n < filter.taps.size(); ++n) {
    acc += filter.taps[n] * std::polar(1.0, w * static_cast<double>(n));
  }
  return std::abs(acc);
}

std::vector<double> filter_valid(std::span<const double> x, const FirFilterSpec& filter) {
  const std::size_t taps = filter.taps.size();
  if (x.size() < taps) return {};
  std::vector<double> y(x.size() - taps + 1);
  for (std::size_t i = 0; i < y.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < taps; ++k) acc += filter.taps[k] * x[i + k];
    y[i] = acc;
  }
  return y;
}

void check_decimation_factor(double fs, int factor) {
  if (factor < 1) throw std::invalid_argument("decimation factor must be >= 1");
  if (54.0 > fs / factor / 8.0) {
    throw std::invalid_argument("decimation factor places 54 Hz above a quarter of the new Nyquist rate");
  }
}

FirFilterSpec design_antialias(double fs, int factor) {
  // Pass band to 0.4 * fs_out, Hamming transition width 3.3 * fs / order = 0.2 * fs_out.
  const int order = 2 * static_cast<int>(std::ceil(8.25 * factor));
  return design_lowpass(fs, 0.4 * fs / factor, order);
}

Decimator::Decimator(const Waveform& record, int factor) : record_(&record), factor_(factor) {
  if (record.samples.empty() || !(record.fs > 0.0)) throw std::invalid_argument("decimator needs a non-empty record");
  check_decimation_factor(record.fs, factor);
  if (factor > 1) lowpass_ = design_antialias(record.fs, factor);
}

double Decimator::sample(std::ptrdiff_t n) const {
  const auto& x = record_->samples;
  const auto last = static_cast<std::ptrdiff_t>(x.size()) - 1;
  if (n >= 0 && n <= last) return x[static_cast<std::size_t>(n)];
  // Odd reflection about the end sample keeps value and slope continuous.
  if (n < 0) {
    const std::ptrdiff_t m = std::min(-n, last);
    return 2.0 * x.front() - x[static_cast<std::size_t>(m)];
  }
  const std::ptrdiff_t m = std::max<std::ptrdiff_t>(2 * last - n, 0);
  return 2.0 * x.back() - x[static_cast<std::size_t>(m)];
}

double Decimator::filtered_at(std::ptrdiff_t n) const {
  if (factor_ == 1) return sample(n);
  const auto half = static_cast<std::ptrdiff_t>(lowpass_.delay());
  const auto& taps = lowpass_.taps;
  const auto& x = record_->samples;
  const std::ptrdiff_t first = n - half;
  const std::ptrdiff_t last = n + half;
  double acc = 0.0;
  if (first >= 0 && last < static_cast<std::ptrdiff_t>(x.size())) {
    const double* p = x.data() + first;
    for (std::size_t k = 0; k < taps.size(); ++k) acc += taps[k] * p[k];
  } else {
    for (std::size_t k = 0; k < taps.size(); ++k) acc += taps[k] * sample(first + static_cast<std::ptrdiff_t>(k));
  }
  return acc;
}

Waveform Decimator::extract(std::ptrdiff_t first, std::size_t count) const {
  Waveform out{output_fs(), std::vector<double>(count), record_->t0 + static_cast<double>(first) / record_->fs};
  for (std::size_t j = 0; j < count; ++j) {
    out.samples[j] = filtered_at(first + static_cast<std::ptrdiff_t>(j) * factor_);
  }
  return out;
}

Waveform decimate(const Waveform& window, int factor) {
  check_decimation_factor(window.fs, factor);
  if (window.samples.empty() || window.size() % static_cast<std::size_t>(factor) != 0) {
    throw std::invalid_argument("decimation factor must divide the sample count");
  }
  if (factor == 1) return window;
  return Decimator(window, factor).extract(0, window.size() / static_cast<std::size_t>(factor));
}

}  // namespace f0bench
