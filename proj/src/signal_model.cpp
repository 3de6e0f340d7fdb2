#include "f0bench/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace f0bench {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kSpectrumPoints = std::size_t{1} << 16;

double frac(double x) { return x - std::floor(x); }

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("TestSignalSpec: " + what);
}

}  // namespace

void validate(const TestSignalSpec& s) {
  require(std::isfinite(s.f0) && s.f0 > 0.0, "f0 must be > 0");
  require(std::isfinite(s.delta_f0) && s.delta_f0 >= 0.0, "delta_f0 must be >= 0");
  require(s.delta_f0 < s.f0, "delta_f0 must be < f0");
  require(std::isfinite(s.f_m) && s.f_m > 0.0, "f_m must be > 0");
  require(std::isfinite(s.k_am) && s.k_am >= 0.0, "k_am must be >= 0");
  require(s.m_c > 0.0 && s.m_c <= 1.0, "m_c must lie in (0, 1]");
  require(s.h_max >= 1, "h_max must be >= 1");
  require(std::isfinite(s.fs) && s.fs > 0.0, "fs must be > 0");
  require(std::isfinite(s.duration) && s.duration > 0.0, "duration must be > 0");
  require(s.fs > 2.0 * s.h_max * (s.f0 + s.delta_f0),
          "fs must exceed 2 * h_max * (f0 + delta_f0)");
  const double n = s.fs * s.duration;
  require(std::abs(n - std::round(n)) < 1e-6, "fs * duration must be an integer");
  if (s.snr_db) require(std::isfinite(*s.snr_db), "snr_db must be finite");
}

std::size_t sample_count(const TestSignalSpec& spec) {
  return static_cast<std::size_t>(std::llround(spec.fs * spec.duration));
}

double HarmonicSpectrum::coefficient(int h) const {
  return amplitude(h) * std::cos(phase(h));
}

double HarmonicSpectrum::thd() const {
  double sum = 0.0;
  for (int h = 2; h <= h_max(); ++h) sum += amplitude(h) * amplitude(h);
  return std::sqrt(sum) / amplitude(1);
}

HarmonicSpectrum clipped_cosine_spectrum(double m_c, int h_max) {
  if (!(m_c > 0.0 && m_c <= 1.0)) throw std::invalid_argument("clip level m_c must lie in (0, 1]");
  if (h_max < 1) throw std::invalid_argument("h_max must be >= 1");

  // cos(h * theta_j) = table[(h * j) mod P], so one table serves every order.
  std::vector<double> cosine(kSpectrumPoints);
  std::vector<double> clipped(kSpectrumPoints);
  for (std::size_t j = 0; j < kSpectrumPoints; ++j) {
    cosine[j] = std::cos(kTwoPi * static_cast<double>(j) / static_cast<double>(kSpectrumPoints));
    clipped[j] = std::clamp(cosine[j], -m_c, m_c);
  }

  std::vector<double> coeff(static_cast<std::size_t>(h_max), 0.0);
  for (int h = 1; h <= h_max; h += 2) {
    double acc = 0.0;
    for (std::size_t j = 0; j < kSpectrumPoints; ++j) {
      acc += clipped[j] * cosine[(static_cast<std::size_t>(h) * j) & (kSpectrumPoints - 1)];
    }
    coeff[static_cast<std::size_t>(h - 1)] = 2.0 * acc / static_cast<double>(kSpectrumPoints);
  }

  HarmonicSpectrum out;
  out.amplitudes.resize(coeff.size());
  out.phases.resize(coeff.size());
  const double base = coeff[0];
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    const double c = coeff[i] / base;
    out.amplitudes[i] = std::abs(c);
    out.phases[i] = c < 0.0 ? std::numbers::pi : 0.0;
  }
  out.amplitudes[0] = 1.0;
  return out;
}

double u_mod(double t, double f_m) {
  return frac(t * f_m) < 0.5 ? 1.0 : -1.0;
}

double u_mod_integral(double t, double f_m) {
  const double p = frac(t * f_m);
  return (p < 0.5 ? p : 1.0 - p) / f_m;
}

Waveform synthesize(const TestSignalSpec& spec) {
  validate(spec);
  return synthesize(spec, clipped_cosine_spectrum(spec.m_c, spec.h_max));
}

Waveform synthesize(const TestSignalSpec& spec, const HarmonicSpectrum& spectrum) {
  validate(spec);
  if (spectrum.h_max() != spec.h_max) throw std::invalid_argument("spectrum order does not match spec.h_max");

  const std::size_t n = sample_count(spec);
  Waveform wf{spec.fs, std::vector<double>(n), 0.0};

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.fs;
    // Phase in cycles; the modulator peak |u_mod|max is exactly 1.
    const double cycles = frac(spec.f0 * t + spec.delta_f0 * u_mod_integral(t, spec.f_m));
    double carrier = 0.0;
    for (int h = 1; h <= spec.h_max; ++h) {
      const double a = spectrum.amplitudes[static_cast<std::size_t>(h - 1)];
      if (a == 0.0) continue;
      carrier += a * std::cos(kTwoPi * frac(h * cycles) + spectrum.phases[static_cast<std::size_t>(h - 1)]);
    }
    wf.samples[i] = (1.0 + spec.k_am * u_mod(t, spec.f_m)) * carrier;
  }

  if (spec.snr_db) {
    double power = 0.0;
    for (double v : wf.samples) power += v * v;
    power /= static_cast<double>(n);
    const double sigma = std::sqrt(power / std::pow(10.0, *spec.snr_db / 10.0));
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : wf.samples) v += noise(rng);
  }
  return wf;
}

double f0_inst(double t, const TestSignalSpec& spec) {
  return spec.f0 + spec.delta_f0 * u_mod(t, spec.f_m);
}

double reference_f0(const WindowSpan& window, const TestSignalSpec& spec) {
  constexpr double kSlack = 1e-9;
  if (!(window.length > 0.0) || window.start < -kSlack || window.end() > spec.duration + kSlack) {
    throw std::invalid_argument("reference window must lie inside [0, duration]");
  }
  const double a = std::max(window.start, 0.0);
  const double b = a + window.length;
  const double mean_mod = (u_mod_integral(b, spec.f_m) - u_mod_integral(a, spec.f_m)) / window.length;
  return spec.f0 + spec.delta_f0 * mean_mod;
}

}  // namespace f0bench
