#pragma once

// Benchmark sweep: Cartesian grid of test signals, sliding windows, one
// relative error per (configuration, method, window), and grouped box-plot
// summaries of those errors.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "f0bench/estimators.hpp"
#include "f0bench/signal_model.hpp"

namespace f0bench {

enum class Profile { desk, paper };

struct SweepGrid {
  std::vector<double> f0_values{47.0, 49.98, 50.0, 50.02, 52.0};
  std::vector<double> delta_f0_values{0.1, 1.0, 10.0};
  std::vector<double> f_m_values{0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  std::vector<double> m_c_values{0.01, 0.8, 1.0};
  std::vector<std::optional<double>> snr_values{std::nullopt, 10.0, 0.0, -10.0};  // nullopt = noiseless
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  double window_length = 0.2;       // s
  std::size_t window_shift = 2048;  // samples at fs
  double fs = 20480.0;
  double duration = 10.0;
  std::uint64_t base_seed = 0;
  double k_am = 0.05;
  int h_max = 49;
  EstimatorOptions estimator;

  bool operator==(const SweepGrid&) const = default;
};

/// Default grid with the desk (20,480 Sa/s, 2,048-sample shift) or paper
/// (327,680 Sa/s, 100-sample shift) sampling profile.
SweepGrid default_grid(Profile profile = Profile::desk);

/// Throws std::invalid_argument naming the offending field.
void validate(const SweepGrid& grid);

/// Configuration key carried by every record.
struct ConfigKey {
  double f0 = 0.0;
  double delta_f0 = 0.0;
  double f_m = 0.0;
  double m_c = 0.0;
  std::optional<double> snr_db;

  bool operator==(const ConfigKey&) const = default;
};

ConfigKey key_of(const TestSignalSpec& spec);

struct ErrorRecord {
  ConfigKey config;
  Method method = Method::iec;
  WindowSpan window;
  double f0_hat = 0.0;
  double f0_ref = 0.0;
  double rel_err = 0.0;
  bool failed = false;
};

/// base_seed XOR splitmix64(index).
std::uint64_t config_seed(std::uint64_t base_seed, std::size_t index);

/// Signal specs in deterministic order (f0, delta_f0, f_m, m_c, snr; last varies fastest).
std::vector<TestSignalSpec> expand_configs(const SweepGrid& grid);

std::vector<WindowSpan> slide_windows(double duration, double fs, double length, std::size_t shift);

/// |f0_hat - f0_ref| / f0_ref.
double compute_error(double f0_hat, double f0_ref);

/// Runs `methods` on every sliding window of a full-rate record. The record is
/// low-passed and decimated to options.operating_fs once; filtered methods get
/// band-pass context from the neighbouring record samples. Result [k][m] is
/// window k, methods[m].
std::vector<std::vector<EstimateResult>> estimate_record(const Waveform& record, std::span<const Method> methods,
                                                         double window_length, std::size_t window_shift,
                                                         const EstimatorOptions& options);

/// All records of one configuration: window-major, then methods in grid order.
std::vector<ErrorRecord> run_config(const SweepGrid& grid, const TestSignalSpec& spec);

/// Thread count from F0BENCH_THREADS, else the hardware concurrency.
unsigned default_thread_count();

/// Runs every configuration on `threads` workers and hands records to `sink`
/// in configuration order, independent of scheduling.
void run_sweep(const SweepGrid& grid, const std::function<void(const ErrorRecord&)>& sink, unsigned threads = 0);

std::vector<ErrorRecord> run_sweep(const SweepGrid& grid, unsigned threads = 0);

enum class GroupVar { f_m, delta_f0, f0, m_c, snr };

/// Accepts "fm"/"f_m", "delta_f0", "f0", "mc"/"m_c", "snr".
GroupVar parse_group_var(std::string_view name);
/// CSV spelling: fm, delta_f0, f0, mc, snr.
std::string_view to_string(GroupVar var);

struct BoxplotSummary {
  GroupVar group_var = GroupVar::f_m;
  std::optional<double> group_value;  // nullopt only for noiseless snr
  Method method = Method::iec;
  std::size_t n = 0;  // successful records
  std::size_t n_failed = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
};

/// One summary per (method, group value), ordered by method then ascending
/// group value with "none" last. Failed records are counted, not summarized.
std::vector<BoxplotSummary> group_stats(std::span<const ErrorRecord> records, GroupVar by);

}  // namespace f0bench
