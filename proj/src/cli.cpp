#include "f0bench/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "f0bench/report_io.hpp"

namespace f0bench {

using nlohmann::json;

namespace {

std::vector<std::pair<std::string, std::string>> split_overrides(const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw CLI::ValidationError("--set", "expected key=value, got '" + item + "'");
    }
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

json base_config(const CliInvocation& inv) {
  json j = inv.config_path ? read_json_file(*inv.config_path) : json::object();
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : inv.overrides) apply_override(j, key, value);
  return j;
}

// Writes to "<out>.tmp" and renames, so a failed run leaves no partial file.
void emit(const CliInvocation& inv, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (inv.output_path == "-") {
    body(out);
    return;
  }
  const std::filesystem::path tmp = inv.output_path.string() + ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    try {
      body(file);
    } catch (...) {
      file.close();
      std::filesystem::remove(tmp);
      throw;
    }
    if (!file.flush()) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, inv.output_path);
}

std::string diagnostics_field(const EstimateResult& r) {
  std::string s;
  for (const auto& [key, value] : r.diagnostics) {
    if (!s.empty()) s += ';';
    s += key + "=" + format_double(value);
  }
  if (r.failed) {
    std::string reason = r.failure_reason;
    for (char& c : reason) {
      if (c == ',' || c == ';' || c == '\n') c = ' ';
    }
    if (!s.empty()) s += ';';
    s += "failure=" + reason;
  }
  return s;
}

int run_synth(const CliInvocation& inv, std::ostream& out) {
  json j = base_config(inv);
  if (inv.seed) j["seed"] = *inv.seed;
  const TestSignalSpec spec = signal_spec_from_json(j);
  const Waveform wf = synthesize(spec);
  if (inv.output_path == "-") throw std::runtime_error("synth needs a file path for --out");
  write_waveform(inv.output_path, wf, spec);
  out << "wrote " << wf.size() << " samples to " << inv.output_path.string() << '\n';
  return 0;
}

int run_estimate(const CliInvocation& inv, std::ostream& out) {
  const EstimateSettings settings = estimate_settings_from_json(base_config(inv));
  const LoadedWaveform loaded = read_waveform(inv.input_path);
  const Waveform& wf = loaded.waveform;
  std::size_t shift = settings.window_shift;
  if (shift == 0) shift = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(wf.fs * 0.01)));
  const double window_samples = settings.window_length * wf.fs;
  if (std::abs(window_samples - std::round(window_samples)) > 1e-6) {
    throw ConfigError("window_length * fs must be an integer");
  }

  const Method methods[] = {inv.method};
  const auto results = estimate_record(wf, methods, settings.window_length, shift, settings.estimator);
  emit(inv, out, [&](std::ostream& os) {
    os << "method,window_start_s,window_len_s,f0_hat_hz,f0_ref_hz,rel_err,failed,diagnostics\n";
    for (const auto& per_window : results) {
      const EstimateResult& r = per_window.front();
      double ref = std::numeric_limits<double>::quiet_NaN();
      double err = ref;
      if (loaded.spec && wf.t0 == 0.0) {
        ref = reference_f0(r.window, *loaded.spec);
        if (!r.failed) err = compute_error(r.f0_hat, ref);
      }
      os << to_string(r.method) << ',' << format_double(r.window.start) << ',' << format_double(r.window.length)
         << ',' << format_double(r.failed ? std::numeric_limits<double>::quiet_NaN() : r.f0_hat) << ','
         << format_double(ref) << ',' << format_double(err) << ',' << (r.failed ? 1 : 0) << ','
         << diagnostics_field(r) << '\n';
    }
  });
  return 0;
}

int run_sweep_cmd(const CliInvocation& inv, std::ostream& out) {
  json j = base_config(inv);
  if (inv.seed) j["base_seed"] = *inv.seed;
  const SweepGrid grid = sweep_grid_from_json(j, inv.profile);
  const unsigned threads = inv.threads.value_or(default_thread_count());
  emit(inv, out, [&](std::ostream& os) {
    os << kRecordsHeader << '\n';
    run_sweep(grid, [&](const ErrorRecord& r) { write_record_row(os, r); }, threads);
  });
  return 0;
}

int run_stats(const CliInvocation& inv, std::ostream& out) {
  std::ifstream in(inv.input_path);
  if (!in) throw std::runtime_error("cannot open '" + inv.input_path.string() + "'");
  const auto records = read_records_csv(in);
  if (records.empty()) throw std::runtime_error("records CSV holds no rows");
  const auto summaries = group_stats(records, inv.group_by);
  emit(inv, out, [&](std::ostream& os) { write_summary_csv(os, summaries); });
  return 0;
}

}  // namespace

CliInvocation parse_cli(int argc, const char* const* argv) {
  CLI::App app{"Fundamental-frequency estimator benchmark", "f0bench"};
  app.require_subcommand(1, 1);

  CliInvocation inv;
  std::string config;
  std::string method = "iec";
  std::string group_by = "fm";
  std::string profile = "desk";
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--set", sets, "Override a configuration key, e.g. --set estimator.hilbert_prefilter=false");
  };

  auto* synth = app.add_subcommand("synth", "Synthesize a test waveform (raw f64le + .json sidecar)");
  synth->add_option("--config", config, "Signal spec JSON")->check(CLI::ExistingFile);
  synth->add_option("--out", inv.output_path, "Waveform output path")->required();
  synth->add_option("--seed", seed, "Noise seed override");
  add_common(synth);

  auto* estimate = app.add_subcommand("estimate", "Run one estimator over the sliding windows of a waveform");
  estimate->add_option("--method", method, "iec|xcorr|hilbert|esprit")->required();
  estimate->add_option("--input", inv.input_path, "Waveform written by synth")->required()->check(CLI::ExistingFile);
  estimate->add_option("--out", inv.output_path, "CSV output path, - for stdout")->default_val("-");
  estimate->add_option("--config", config, "JSON with window_length, window_shift, estimator")
      ->check(CLI::ExistingFile);
  add_common(estimate);

  auto* sweep = app.add_subcommand("sweep", "Run the parameter sweep and write the records CSV");
  sweep->add_option("--config", config, "Sweep JSON")->check(CLI::ExistingFile);
  sweep->add_option("--out", inv.output_path, "Records CSV path, - for stdout")->required();
  sweep->add_option("--profile", profile, "desk|paper")->check(CLI::IsMember({"desk", "paper"}));
  sweep->add_option("--seed", seed, "Base seed override");
  sweep->add_option("--threads", threads, "Worker threads (default: F0BENCH_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  add_common(sweep);

  auto* stats = app.add_subcommand("stats", "Group records and write box-plot summaries");
  stats->add_option("--input", inv.input_path, "Records CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--group-by", group_by, "fm|delta_f0|f0|mc|snr")
      ->required()
      ->check(CLI::IsMember({"fm", "f_m", "delta_f0", "f0", "mc", "m_c", "snr"}));
  stats->add_option("--out", inv.output_path, "Summary CSV path, - for stdout")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream text, ignored;
    app.exit(e, text, ignored);
    throw HelpRequested(text.str());
  }

  if (!config.empty()) inv.config_path = config;
  inv.overrides = split_overrides(sets);
  if (synth->parsed()) {
    inv.subcommand = Subcommand::synth;
    if (synth->count("--seed")) inv.seed = seed;
  } else if (estimate->parsed()) {
    inv.subcommand = Subcommand::estimate;
    try {
      inv.method = parse_method(method);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("--method", e.what());
    }
  } else if (sweep->parsed()) {
    inv.subcommand = Subcommand::sweep;
    inv.profile = profile == "paper" ? Profile::paper : Profile::desk;
    if (sweep->count("--seed")) inv.seed = seed;
    if (sweep->count("--threads")) inv.threads = threads;
  } else {
    inv.subcommand = Subcommand::stats;
    inv.group_by = parse_group_var(group_by);
  }
  return inv;
}

int run_cli(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  try {
    switch (inv.subcommand) {
      case Subcommand::synth: return run_synth(inv, out);
      case Subcommand::estimate: return run_estimate(inv, out);
      case Subcommand::sweep: return run_sweep_cmd(inv, out);
      case Subcommand::stats: return run_stats(inv, out);
    }
  } catch (const ConfigError& e) {
    err << "f0bench: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "f0bench: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliInvocation inv;
  try {
    inv = parse_cli(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "f0bench: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? 64 : e.get_exit_code();
  }
  return run_cli(inv, out, err);
}

}  // namespace f0bench
