#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "f0bench/signal_model.hpp"

using namespace f0bench;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed-form Fourier cosine coefficient of clamp(cos x, -m, m), unnormalized.
double clipped_coefficient(double m, int h) {
  const double c = std::acos(m);
  const double hh = h;
  const double flat = m * std::sin(hh * c) / hh + m * std::sin(hh * (kPi - c)) / hh;
  double body = 0.0;
  if (h == 1) {
    body = 0.5 * ((kPi - 2.0 * c) + (std::sin(2.0 * (kPi - c)) - std::sin(2.0 * c)) / 2.0);
  } else {
    const auto part = [&](double k) { return (std::sin(k * (kPi - c)) - std::sin(k * c)) / k; };
    body = 0.5 * (part(hh - 1.0) + part(hh + 1.0));
  }
  return 2.0 / kPi * (flat + body);
}

// Piecewise-exact mean of f0_inst over [a, b], walking the modulator switch points.
double enumerated_reference(double a, double b, const TestSignalSpec& s) {
  const double half = 0.5 / s.f_m;
  double t = a;
  double acc = 0.0;
  while (t < b) {
    const double next = std::min(b, (std::floor(t / half + 1e-12) + 1.0) * half);
    const long k = static_cast<long>(std::floor(t / half + 1e-12));
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    acc += (s.f0 + s.delta_f0 * sign) * (next - t);
    t = next;
  }
  return acc / (b - a);
}

TestSignalSpec tone(double f0, double fs, double duration) {
  TestSignalSpec s;
  s.f0 = f0;
  s.k_am = 0.0;
  s.fs = fs;
  s.duration = duration;
  s.h_max = 1;
  return s;
}

}  // namespace

TEST(ClippedCosine, UnclippedIsPureTone) {
  const auto sp = clipped_cosine_spectrum(1.0, 50);
  EXPECT_EQ(sp.h_max(), 50);
  EXPECT_DOUBLE_EQ(sp.amplitude(1), 1.0);
  for (int h = 2; h <= 50; ++h) EXPECT_LT(sp.amplitude(h), 1e-12) << h;
}

TEST(ClippedCosine, EvenHarmonicsVanish) {
  for (double m : {0.01, 0.3, 0.8, 0.95}) {
    const auto sp = clipped_cosine_spectrum(m, 40);
    for (int h = 2; h <= 40; h += 2) EXPECT_EQ(sp.amplitude(h), 0.0) << m << " h=" << h;
  }
}

TEST(ClippedCosine, MatchesClosedFormCoefficients) {
  for (double m : {0.01, 0.2, 0.5, 0.8, 0.99}) {
    const auto sp = clipped_cosine_spectrum(m, 49);
    const double a1 = clipped_coefficient(m, 1);
    for (int h = 1; h <= 49; h += 2) {
      EXPECT_NEAR(sp.coefficient(h), clipped_coefficient(m, h) / a1, 1e-6) << "m_c=" << m << " h=" << h;
    }
  }
}

TEST(ClippedCosine, SignIsCarriedByPhase) {
  const auto sp = clipped_cosine_spectrum(0.8, 15);
  for (int h = 1; h <= 15; h += 2) {
    EXPECT_GE(sp.amplitude(h), 0.0);
    EXPECT_TRUE(sp.phase(h) == 0.0 || sp.phase(h) == kPi);
    EXPECT_NEAR(sp.coefficient(h), sp.amplitude(h) * std::cos(sp.phase(h)), 1e-15);
  }
}

TEST(ClippedCosine, DeepClipApproachesSquareWave) {
  const auto sp = clipped_cosine_spectrum(0.01, 9);
  EXPECT_NEAR(sp.amplitude(3) / sp.amplitude(1), 1.0 / 3.0, 0.01 / 3.0);
  EXPECT_NEAR(sp.amplitude(5) / sp.amplitude(1), 1.0 / 5.0, 0.01 / 5.0);
}

TEST(ClippedCosine, ThdAtLowVoltageLimit) {
  // Oracle: closed-form coefficients up to h = 49 give 0.0898.
  double sum = 0.0;
  for (int h = 3; h <= 49; h += 2) sum += std::pow(clipped_coefficient(0.8, h), 2);
  const double oracle = std::sqrt(sum) / clipped_coefficient(0.8, 1);
  const double thd = clipped_cosine_spectrum(0.8, 49).thd();
  EXPECT_NEAR(thd, oracle, 1e-6);
  EXPECT_NEAR(thd, 0.0898, 5e-4);
  EXPECT_GE(thd, 0.06);
  EXPECT_LE(thd, 0.10);
}

TEST(ClippedCosine, RejectsBadArguments) {
  EXPECT_THROW(clipped_cosine_spectrum(0.0, 10), std::invalid_argument);
  EXPECT_THROW(clipped_cosine_spectrum(1.01, 10), std::invalid_argument);
  EXPECT_THROW(clipped_cosine_spectrum(0.5, 0), std::invalid_argument);
}

TEST(UMod, Examples) {
  EXPECT_EQ(u_mod(0.5, 0.5), 1.0);
  EXPECT_EQ(u_mod(1.5, 0.5), -1.0);
  EXPECT_EQ(u_mod(0.0, 1.0), 1.0);
}

TEST(UMod, AgreesWithSignOfSine) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> t_dist(0.0, 10.0);
  std::uniform_real_distribution<double> f_dist(0.1, 25.0);
  for (int i = 0; i < 2000; ++i) {
    const double t = t_dist(rng);
    const double fm = f_dist(rng);
    const double s = std::sin(2.0 * kPi * fm * t);
    if (std::abs(s) < 1e-9) continue;
    EXPECT_EQ(u_mod(t, fm), s > 0 ? 1.0 : -1.0) << t << " " << fm;
  }
}

TEST(UModIntegral, Examples) {
  for (double fm : {0.2, 1.0, 5.0, 20.0}) {
    EXPECT_NEAR(u_mod_integral(1.0 / (4.0 * fm), fm), 1.0 / (4.0 * fm), 1e-15);
    EXPECT_NEAR(u_mod_integral(1.0 / fm, fm), 0.0, 1e-15);
    EXPECT_NEAR(u_mod_integral(1.0 / (2.0 * fm), fm), 1.0 / (2.0 * fm), 1e-15);
  }
}

TEST(UModIntegral, IsLipschitzAndMatchesQuadrature) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t_dist(0.0, 10.0);
  std::uniform_real_distribution<double> e_dist(0.0, 0.05);
  for (int i = 0; i < 2000; ++i) {
    const double t = t_dist(rng);
    const double e = e_dist(rng);
    EXPECT_LE(std::abs(u_mod_integral(t + e, 2.0) - u_mod_integral(t, 2.0)), e + 1e-12);
  }
  // Midpoint quadrature of u_mod over [0, t].
  const double fm = 0.7;
  const double t = 2.345;
  const int n = 1'000'000;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += u_mod((k + 0.5) * t / n, fm);
  EXPECT_NEAR(u_mod_integral(t, fm), acc * t / n, 1e-5);
}

TEST(F0Inst, Examples) {
  TestSignalSpec s;
  s.f0 = 50.0;
  EXPECT_EQ(f0_inst(0.3, s), 50.0);
  s.delta_f0 = 1.0;
  EXPECT_EQ(f0_inst(0.25, s), 51.0);
  s.delta_f0 = 10.0;
  EXPECT_EQ(f0_inst(0.75, s), 40.0);
}

TEST(ReferenceF0, Examples) {
  TestSignalSpec s;
  s.f0 = 50.0;
  s.delta_f0 = 1.0;
  s.f_m = 1.0;
  EXPECT_NEAR(reference_f0({0.1, 0.2}, s), 51.0, 1e-12);
  EXPECT_NEAR(reference_f0({0.4, 0.2}, s), 50.0, 1e-12);
  s.f_m = 5.0;
  EXPECT_NEAR(reference_f0({0.0, 0.2}, s), 50.0, 1e-12);
}

TEST(ReferenceF0, MatchesNumericMeanOnOnePeriodWindow) {
  TestSignalSpec s;
  s.f0 = 50.0;
  s.delta_f0 = 1.0;
  s.f_m = 5.0;
  const int n = 1'000'000;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += f0_inst((k + 0.5) * 0.2 / n, s);
  EXPECT_NEAR(acc / n, 50.0, 1e-9);
  EXPECT_NEAR(reference_f0({0.0, 0.2}, s), acc / n, 1e-9);
}

TEST(ReferenceF0, MatchesEnumerationOnRandomWindows) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double fms[] = {0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  for (int i = 0; i < 500; ++i) {
    TestSignalSpec s;
    s.f0 = 45.0 + 10.0 * u(rng);
    s.delta_f0 = 10.0 * u(rng);
    s.f_m = fms[i % 7];
    const double len = 0.01 + 0.5 * u(rng);
    const double start = (s.duration - len) * u(rng);
    EXPECT_NEAR(reference_f0({start, len}, s), enumerated_reference(start, start + len, s), 1e-9)
        << "f_m=" << s.f_m << " start=" << start << " len=" << len;
  }
}

TEST(ReferenceF0, RejectsWindowOutsideRecord) {
  TestSignalSpec s;
  EXPECT_THROW(reference_f0({9.9, 0.2}, s), std::invalid_argument);
  EXPECT_THROW(reference_f0({-0.1, 0.2}, s), std::invalid_argument);
}

TEST(Synthesize, PureToneRms) {
  const auto w = synthesize(tone(50.0, 20480.0, 1.0));
  ASSERT_EQ(w.size(), 20480u);
  EXPECT_DOUBLE_EQ(w.fs, 20480.0);
  double p = 0.0;
  for (double v : w.samples) p += v * v;
  EXPECT_NEAR(std::sqrt(p / static_cast<double>(w.size())), 1.0 / std::sqrt(2.0), 1e-9);
}

TEST(Synthesize, SingleSpectralLineForPureTone) {
  auto s = tone(50.0, 2048.0, 1.0);
  s.h_max = 19;
  const auto w = synthesize(s);
  const std::size_t n = w.size();
  const std::size_t line = 50;
  std::vector<double> mag(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      acc += w.samples[i] * std::polar(1.0, -2.0 * kPi * static_cast<double>((k * i) % n) / static_cast<double>(n));
    }
    mag[k] = std::abs(acc);
  }
  const double floor = mag[line] * std::pow(10.0, -250.0 / 20.0);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    if (k == line) continue;
    EXPECT_LT(mag[k], std::max(floor, 1e-9 * mag[line])) << "bin " << k;
  }
}

TEST(Synthesize, MatchesDirectEvaluation) {
  TestSignalSpec s;
  s.f0 = 49.3;
  s.delta_f0 = 1.7;
  s.f_m = 2.0;
  s.k_am = 0.05;
  s.m_c = 0.8;
  s.h_max = 15;
  s.duration = 1.0;
  const auto w = synthesize(s);
  const double a1 = clipped_coefficient(0.8, 1);
  for (std::size_t n : {0u, 1u, 777u, 5120u, 10240u, 15000u, 20479u}) {
    const double t = static_cast<double>(n) / s.fs;
    const double theta = 2.0 * kPi * (s.f0 * t + s.delta_f0 * u_mod_integral(t, s.f_m));
    double v = 0.0;
    for (int h = 1; h <= 15; h += 2) v += clipped_coefficient(0.8, h) / a1 * std::cos(h * theta);
    v *= 1.0 + s.k_am * u_mod(t, s.f_m);
    EXPECT_NEAR(w.samples[n], v, 1e-6) << n;
  }
}

TEST(Synthesize, EnvelopeFollowsModulator) {
  auto s = tone(50.0, 20480.0, 1.0);
  s.k_am = 0.05;
  s.f_m = 1.0;
  const auto w = synthesize(s);
  double hi = 0.0;
  double lo = 0.0;
  for (std::size_t i = 1000; i < 9000; ++i) hi = std::max(hi, std::abs(w.samples[i]));
  for (std::size_t i = 11240; i < 19240; ++i) lo = std::max(lo, std::abs(w.samples[i]));
  EXPECT_NEAR(hi, 1.05, 1e-6);
  EXPECT_NEAR(lo, 0.95, 1e-6);
}

TEST(Synthesize, NoisePowerMatchesSnr) {
  for (double snr : {10.0, 0.0, -10.0}) {
    auto s = tone(50.0, 20480.0, 10.0);
    s.k_am = 0.05;
    s.m_c = 0.8;
    s.h_max = 49;
    const auto clean = synthesize(s);
    s.snr_db = snr;
    s.seed = 1234;
    const auto noisy = synthesize(s);
    double ps = 0.0;
    double pn = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      ps += clean.samples[i] * clean.samples[i];
      const double d = noisy.samples[i] - clean.samples[i];
      pn += d * d;
    }
    EXPECT_NEAR(ps / pn / std::pow(10.0, snr / 10.0), 1.0, 0.05) << snr;
  }
}

TEST(Synthesize, DeterministicPerSeed) {
  TestSignalSpec s;
  s.duration = 1.0;
  s.snr_db = 0.0;
  s.seed = 99;
  const auto a = synthesize(s);
  const auto b = synthesize(s);
  EXPECT_EQ(a.samples, b.samples);
  s.seed = 100;
  EXPECT_NE(a.samples, synthesize(s).samples);
}

TEST(Synthesize, RejectsInvalidSpecs) {
  TestSignalSpec s;
  s.m_c = 1.5;
  EXPECT_THROW(synthesize(s), std::invalid_argument);
  s = {};
  s.fs = 2000.0;  // 49th harmonic above Nyquist
  EXPECT_THROW(synthesize(s), std::invalid_argument);
  s = {};
  s.duration = 1.00001;
  EXPECT_THROW(synthesize(s), std::invalid_argument);
  s = {};
  s.f_m = 0.0;
  EXPECT_THROW(validate(s), std::invalid_argument);
  s = {};
  s.snr_db = std::numeric_limits<double>::infinity();
  EXPECT_THROW(validate(s), std::invalid_argument);
  EXPECT_EQ(sample_count(TestSignalSpec{}), 204800u);
}
