#include "f0bench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "f0bench/boxplot.hpp"
#include "f0bench/filters.hpp"

namespace f0bench {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("SweepGrid: " + what);
}

bool is_integral(double x) { return std::abs(x - std::round(x)) < 1e-6; }

int decimation_factor(const SweepGrid& g) {
  return static_cast<int>(std::lround(g.fs / g.estimator.operating_fs));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Operating-rate samples at full-rate positions spaced `step` apart.
class OperatingRateRecord {
 public:
  OperatingRateRecord(const Waveform& record, int factor, std::size_t step)
      : fs_(record.fs), t0_(record.t0), factor_(factor), step_(step) {
    const Decimator dec(record, factor);
    values_.resize((record.size() + step - 1) / step);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      values_[i] = dec.filtered_at(static_cast<std::ptrdiff_t>(i * step));
    }
  }

  Waveform slice(std::size_t first, std::size_t count) const {
    Waveform w{fs_ / factor_, std::vector<double>(count), t0_ + static_cast<double>(first) / fs_};
    for (std::size_t j = 0; j < count; ++j) {
      w.samples[j] = values_[(first + j * static_cast<std::size_t>(factor_)) / step_];
    }
    return w;
  }

 private:
  double fs_;
  double t0_;
  int factor_;
  std::size_t step_;
  std::vector<double> values_;
};

}  // namespace

SweepGrid default_grid(Profile profile) {
  SweepGrid g;
  if (profile == Profile::paper) {
    g.fs = 327680.0;
    g.window_shift = 100;
  }
  return g;
}

void validate(const SweepGrid& g) {
  require(!g.f0_values.empty(), "f0_values must not be empty");
  require(!g.delta_f0_values.empty(), "delta_f0_values must not be empty");
  require(!g.f_m_values.empty(), "f_m_values must not be empty");
  require(!g.m_c_values.empty(), "m_c_values must not be empty");
  require(!g.snr_values.empty(), "snr_values must not be empty");
  require(!g.methods.empty(), "methods must not be empty");
  require(g.window_shift >= 1, "window_shift must be >= 1");
  require(g.window_length > 0.0 && g.window_length <= g.duration, "window_length must lie in (0, duration]");
  require(is_integral(g.window_length * g.fs), "window_length * fs must be an integer");

  const auto& opt = g.estimator;
  require(opt.operating_fs > 0.0 && opt.operating_fs <= g.fs, "estimator.operating_fs must lie in (0, fs]");
  require(is_integral(g.fs / opt.operating_fs), "fs / estimator.operating_fs must be an integer");
  const int factor = decimation_factor(g);
  try {
    check_decimation_factor(g.fs, factor);
    design_bandpass(opt.operating_fs, opt.bandpass_order, opt.band);
  } catch (const std::invalid_argument& e) {
    require(false, std::string("estimator: ") + e.what());
  }
  const auto window_samples = static_cast<long long>(std::llround(g.window_length * g.fs));
  require(window_samples % factor == 0, "window samples must be divisible by the decimation factor");
  require(opt.esprit_model_order >= 0 && opt.esprit_model_order % 2 == 0,
          "estimator.esprit_model_order must be even and >= 0");
  require(opt.esprit_correlation_order >= 0, "estimator.esprit_correlation_order must be >= 0");
  require(opt.esprit_max_order >= 2, "estimator.esprit_max_order must be >= 2");

  for (const auto& spec : expand_configs(g)) {
    try {
      validate(spec);
    } catch (const std::invalid_argument& e) {
      require(false, e.what());
    }
  }
}

ConfigKey key_of(const TestSignalSpec& s) { return {s.f0, s.delta_f0, s.f_m, s.m_c, s.snr_db}; }

std::uint64_t config_seed(std::uint64_t base_seed, std::size_t index) {
  return base_seed ^ splitmix64(static_cast<std::uint64_t>(index));
}

std::vector<TestSignalSpec> expand_configs(const SweepGrid& g) {
  std::vector<TestSignalSpec> out;
  for (double f0 : g.f0_values)
    for (double df : g.delta_f0_values)
      for (double fm : g.f_m_values)
        for (double mc : g.m_c_values)
          for (const auto& snr : g.snr_values) {
            TestSignalSpec s;
            s.f0 = f0;
            s.delta_f0 = df;
            s.f_m = fm;
            s.k_am = g.k_am;
            s.m_c = mc;
            s.h_max = g.h_max;
            s.snr_db = snr;
            s.fs = g.fs;
            s.duration = g.duration;
            s.seed = config_seed(g.base_seed, out.size());
            out.push_back(s);
          }
  return out;
}

std::vector<WindowSpan> slide_windows(double duration, double fs, double length, std::size_t shift) {
  if (!(length > 0.0) || length > duration) throw std::invalid_argument("window length must lie in (0, duration]");
  if (shift < 1) throw std::invalid_argument("window shift must be >= 1 sample");
  const auto total = static_cast<std::size_t>(std::llround(duration * fs));
  const auto width = static_cast<std::size_t>(std::llround(length * fs));
  const std::size_t count = (total - width) / shift + 1;
  std::vector<WindowSpan> spans(count);
  for (std::size_t k = 0; k < count; ++k) {
    spans[k] = {static_cast<double>(k * shift) / fs, length};
  }
  return spans;
}

double compute_error(double f0_hat, double f0_ref) {
  if (!(f0_ref > 0.0)) throw std::invalid_argument("reference frequency must be > 0");
  return std::abs(f0_hat - f0_ref) / f0_ref;
}

std::vector<std::vector<EstimateResult>> estimate_record(const Waveform& record, std::span<const Method> methods,
                                                         double window_length, std::size_t window_shift,
                                                         const EstimatorOptions& opt) {
  if (!(opt.operating_fs > 0.0) || !is_integral(record.fs / opt.operating_fs)) {
    throw std::invalid_argument("record rate must be an integer multiple of the operating rate");
  }
  const int factor = static_cast<int>(std::lround(record.fs / opt.operating_fs));
  const auto ufactor = static_cast<std::size_t>(factor);
  const auto width = static_cast<std::size_t>(std::llround(window_length * record.fs));
  if (width % ufactor != 0) throw std::invalid_argument("window samples must be divisible by the decimation factor");
  const FirFilterSpec bandpass = design_bandpass(opt.operating_fs, opt.bandpass_order, opt.band);

  const std::size_t total = record.size();
  const std::size_t count = width / ufactor;
  const std::size_t step = window_shift % ufactor == 0 ? ufactor : 1;
  const OperatingRateRecord source(record, factor, step);
  const auto windows = slide_windows(record.duration(), record.fs, window_length, window_shift);

  std::vector<std::vector<EstimateResult>> out(windows.size());
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const std::size_t start = k * window_shift;
    const std::size_t last = start + (count - 1) * ufactor;
    out[k].reserve(methods.size());
    for (Method method : methods) {
      const std::size_t context = context_samples(method, opt);
      const std::size_t left = std::min(context, start / ufactor);
      const std::size_t right = std::min(context, (total - 1 - last) / ufactor);
      const Waveform window = source.slice(start - left * ufactor, left + count + right);
      out[k].push_back(run_estimator(method, window, bandpass, opt));
    }
  }
  return out;
}

std::vector<ErrorRecord> run_config(const SweepGrid& grid, const TestSignalSpec& spec) {
  const Waveform record = synthesize(spec);
  const auto estimates = estimate_record(record, grid.methods, grid.window_length, grid.window_shift, grid.estimator);
  const ConfigKey key = key_of(spec);

  std::vector<ErrorRecord> out;
  out.reserve(estimates.size() * grid.methods.size());
  for (const auto& per_window : estimates) {
    for (const auto& est : per_window) {
      ErrorRecord rec;
      rec.config = key;
      rec.method = est.method;
      rec.window = est.window;
      rec.f0_ref = reference_f0(est.window, spec);
      rec.failed = est.failed || !std::isfinite(est.f0_hat);
      if (rec.failed) {
        rec.f0_hat = std::numeric_limits<double>::quiet_NaN();
        rec.rel_err = std::numeric_limits<double>::quiet_NaN();
      } else {
        rec.f0_hat = est.f0_hat;
        rec.rel_err = compute_error(est.f0_hat, rec.f0_ref);
      }
      out.push_back(rec);
    }
  }
  return out;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("F0BENCH_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void run_sweep(const SweepGrid& grid, const std::function<void(const ErrorRecord&)>& sink, unsigned threads) {
  validate(grid);
  const auto configs = expand_configs(grid);
  const std::size_t n = configs.size();
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));

  std::vector<std::vector<ErrorRecord>> results(n);
  std::vector<char> done(n, 0);
  std::vector<std::exception_ptr> errors(n);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};

  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          std::vector<ErrorRecord> recs;
          std::exception_ptr err;
          try {
            recs = run_config(grid, configs[i]);
          } catch (...) {
            err = std::current_exception();
          }
          {
            std::lock_guard lock(mu);
            results[i] = std::move(recs);
            errors[i] = err;
            done[i] = 1;
          }
          cv.notify_all();
        }
      });
    }

    std::exception_ptr first_error;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<ErrorRecord> recs;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return done[i] != 0; });
        if (errors[i]) {
          first_error = errors[i];
          next = n;
          break;
        }
        recs = std::move(results[i]);
      }
      for (const auto& r : recs) sink(r);
    }
    if (first_error) {
      pool.clear();
      std::rethrow_exception(first_error);
    }
  }
}

std::vector<ErrorRecord> run_sweep(const SweepGrid& grid, unsigned threads) {
  std::vector<ErrorRecord> out;
  run_sweep(grid, [&](const ErrorRecord& r) { out.push_back(r); }, threads);
  return out;
}

GroupVar parse_group_var(std::string_view name) {
  if (name == "fm" || name == "f_m") return GroupVar::f_m;
  if (name == "delta_f0") return GroupVar::delta_f0;
  if (name == "f0") return GroupVar::f0;
  if (name == "mc" || name == "m_c") return GroupVar::m_c;
  if (name == "snr") return GroupVar::snr;
  throw std::invalid_argument("unknown grouping variable '" + std::string(name) +
                              "' (expected fm|delta_f0|f0|mc|snr)");
}

std::string_view to_string(GroupVar var) {
  switch (var) {
    case GroupVar::f_m: return "fm";
    case GroupVar::delta_f0: return "delta_f0";
    case GroupVar::f0: return "f0";
    case GroupVar::m_c: return "mc";
    case GroupVar::snr: return "snr";
  }
  return "?";
}

namespace {

std::optional<double> group_value(const ConfigKey& c, GroupVar var) {
  switch (var) {
    case GroupVar::f_m: return c.f_m;
    case GroupVar::delta_f0: return c.delta_f0;
    case GroupVar::f0: return c.f0;
    case GroupVar::m_c: return c.m_c;
    case GroupVar::snr: return c.snr_db;
  }
  return std::nullopt;
}

struct GroupOrder {
  bool operator()(const std::pair<int, std::optional<double>>& a,
                  const std::pair<int, std::optional<double>>& b) const {
    if (a.first != b.first) return a.first < b.first;
    if (a.second.has_value() != b.second.has_value()) return a.second.has_value();
    return a.second.has_value() && *a.second < *b.second;
  }
};

}  // namespace

std::vector<BoxplotSummary> group_stats(std::span<const ErrorRecord> records, GroupVar by) {
  if (records.empty()) throw std::invalid_argument("group_stats needs at least one record");

  struct Bucket {
    std::vector<double> errors;
    std::size_t failed = 0;
  };
  std::map<std::pair<int, std::optional<double>>, Bucket, GroupOrder> buckets;
  for (const auto& r : records) {
    auto& b = buckets[{static_cast<int>(r.method), group_value(r.config, by)}];
    if (r.failed) {
      ++b.failed;
    } else {
      b.errors.push_back(r.rel_err);
    }
  }

  std::vector<BoxplotSummary> out;
  for (auto& [key, bucket] : buckets) {
    BoxplotSummary s;
    s.group_var = by;
    s.group_value = key.second;
    s.method = static_cast<Method>(key.first);
    s.n_failed = bucket.failed;
    if (bucket.errors.empty()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      s.median = s.q1 = s.q3 = s.whisker_low = s.whisker_high = nan;
    } else {
      BoxStats b = box_stats(std::move(bucket.errors));
      s.n = b.n;
      s.median = b.median;
      s.q1 = b.q1;
      s.q3 = b.q3;
      s.whisker_low = b.whisker_low;
      s.whisker_high = b.whisker_high;
      s.outliers = std::move(b.outliers);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace f0bench
