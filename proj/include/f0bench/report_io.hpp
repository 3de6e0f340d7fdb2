#pragma once

// File formats:
//  - configuration: JSON, unknown keys rejected, omitted keys take defaults;
//  - waveform: raw little-endian float64 samples plus a "<file>.json" sidecar
//    holding fs, t0, the sample count and the originating TestSignalSpec;
//  - records / summary: comma-separated, header row, 12 significant digits.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "f0bench/harness.hpp"
#include "f0bench/signal_model.hpp"

namespace f0bench {

/// Malformed or invalid configuration; the message names the line or field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const TestSignalSpec& spec);
TestSignalSpec signal_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EstimatorOptions& options);
EstimatorOptions estimator_options_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SweepGrid& grid);
/// Starts from default_grid(profile) and applies the keys present in `j`.
SweepGrid sweep_grid_from_json(const nlohmann::json& j, Profile profile = Profile::desk);

/// Settings of the `estimate` subcommand: window geometry and estimator options.
struct EstimateSettings {
  double window_length = 0.2;   // s
  std::size_t window_shift = 0;  // samples at the record rate; 0 = 10 ms
  EstimatorOptions estimator;
};
EstimateSettings estimate_settings_from_json(const nlohmann::json& j);

/// Reads a JSON file; parse errors report the line number.
nlohmann::json read_json_file(const std::filesystem::path& path);

TestSignalSpec load_signal_spec(const std::filesystem::path& path);
SweepGrid load_sweep_config(const std::filesystem::path& path, Profile profile = Profile::desk);

/// Sets `dotted.key` in `config` to `value`, parsed as JSON when it is valid
/// JSON and taken as a string otherwise.
void apply_override(nlohmann::json& config, std::string_view dotted_key, std::string_view value);

std::filesystem::path sidecar_path(const std::filesystem::path& waveform_path);

void write_waveform(const std::filesystem::path& path, const Waveform& waveform,
                    const std::optional<TestSignalSpec>& spec);

struct LoadedWaveform {
  Waveform waveform;
  std::optional<TestSignalSpec> spec;
};
LoadedWaveform read_waveform(const std::filesystem::path& path);

/// "%.12g", with "nan" for NaN.
std::string format_double(double v);

inline constexpr std::string_view kRecordsHeader =
    "method,f0_hz,delta_f0_hz,fm_hz,mc,snr_db,window_start_s,window_len_s,f0_hat_hz,f0_ref_hz,rel_err,failed";
inline constexpr std::string_view kSummaryHeader =
    "method,group_var,group_value,n,n_failed,median,q1,q3,whisker_low,whisker_high,n_outliers";

void write_record_row(std::ostream& os, const ErrorRecord& record);
void write_records_csv(std::ostream& os, std::span<const ErrorRecord> records);
std::vector<ErrorRecord> read_records_csv(std::istream& is);

void write_summary_csv(std::ostream& os, std::span<const BoxplotSummary> summaries);

}  // namespace f0bench
