#include "f0bench/report_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>

namespace f0bench {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where.empty() ? "configuration must be a JSON object" : where + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.contains(item.key())) {
      throw ConfigError("unknown key '" + (where.empty() ? "" : where + ".") + item.key() + "'");
    }
  }
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(field, "must be finite");
  return d;
}

long long integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<long long>();
}

std::uint64_t unsigned_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    fail(field, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool boolean(const json& v, const std::string& field) {
  if (!v.is_boolean()) fail(field, "expected true or false");
  return v.get<bool>();
}

std::optional<double> snr(const json& v, const std::string& field) {
  if (v.is_null() || (v.is_string() && v.get<std::string>() == "none")) return std::nullopt;
  return number(v, field);
}

json snr_to_json(const std::optional<double>& v) { return v ? json(*v) : json("none"); }

template <typename T, typename F>
std::vector<T> list(const json& v, const std::string& field, F&& element) {
  if (!v.is_array()) fail(field, "expected an array");
  if (v.empty()) fail(field, "must not be empty");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(element(v[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> checked_list(const json& v, const std::string& field, bool (*ok)(double), const char* rule) {
  return list<double>(v, field, [&](const json& e, const std::string& f) {
    const double d = number(e, f);
    if (!ok(d)) fail(f, rule);
    return d;
  });
}

}  // namespace

json to_json(const TestSignalSpec& s) {
  return json{{"f0", s.f0},       {"delta_f0", s.delta_f0}, {"f_m", s.f_m},
              {"k_am", s.k_am},   {"m_c", s.m_c},           {"h_max", s.h_max},
              {"snr_db", s.snr_db ? json(*s.snr_db) : json(nullptr)},
              {"fs", s.fs},       {"duration", s.duration}, {"seed", s.seed}};
}

TestSignalSpec signal_spec_from_json(const json& j) {
  reject_unknown_keys(j, {"f0", "delta_f0", "f_m", "k_am", "m_c", "h_max", "snr_db", "fs", "duration", "seed"}, "");
  TestSignalSpec s;
  if (j.contains("f0")) s.f0 = number(j["f0"], "f0");
  if (j.contains("delta_f0")) s.delta_f0 = number(j["delta_f0"], "delta_f0");
  if (j.contains("f_m")) s.f_m = number(j["f_m"], "f_m");
  if (j.contains("k_am")) s.k_am = number(j["k_am"], "k_am");
  if (j.contains("m_c")) s.m_c = number(j["m_c"], "m_c");
  if (j.contains("h_max")) s.h_max = static_cast<int>(integer(j["h_max"], "h_max"));
  if (j.contains("snr_db")) s.snr_db = snr(j["snr_db"], "snr_db");
  if (j.contains("fs")) s.fs = number(j["fs"], "fs");
  if (j.contains("duration")) s.duration = number(j["duration"], "duration");
  if (j.contains("seed")) s.seed = unsigned_integer(j["seed"], "seed");
  try {
    validate(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

EstimatorOptions estimator_options_from_json(const json& e) {
  reject_unknown_keys(e,
                      {"operating_fs", "bandpass_order", "band", "hilbert_prefilter", "esprit_model_order",
                       "esprit_correlation_order", "esprit_max_order"},
                      "estimator");
  EstimatorOptions o;
  if (e.contains("operating_fs")) o.operating_fs = number(e["operating_fs"], "estimator.operating_fs");
  if (e.contains("bandpass_order")) {
    o.bandpass_order = static_cast<int>(integer(e["bandpass_order"], "estimator.bandpass_order"));
  }
  if (e.contains("band")) {
    const auto band = list<double>(e["band"], "estimator.band", number);
    if (band.size() != 2) fail("estimator.band", "expected [low, high]");
    o.band = {band[0], band[1]};
  }
  if (e.contains("hilbert_prefilter")) {
    o.hilbert_prefilter = boolean(e["hilbert_prefilter"], "estimator.hilbert_prefilter");
  }
  if (e.contains("esprit_model_order")) {
    o.esprit_model_order = static_cast<int>(integer(e["esprit_model_order"], "estimator.esprit_model_order"));
  }
  if (e.contains("esprit_correlation_order")) {
    o.esprit_correlation_order =
        static_cast<int>(integer(e["esprit_correlation_order"], "estimator.esprit_correlation_order"));
  }
  if (e.contains("esprit_max_order")) {
    o.esprit_max_order = static_cast<int>(integer(e["esprit_max_order"], "estimator.esprit_max_order"));
  }
  return o;
}

json to_json(const EstimatorOptions& e) {
  return json{{"operating_fs", e.operating_fs},
              {"bandpass_order", e.bandpass_order},
              {"band", e.band},
              {"hilbert_prefilter", e.hilbert_prefilter},
              {"esprit_model_order", e.esprit_model_order},
              {"esprit_correlation_order", e.esprit_correlation_order},
              {"esprit_max_order", e.esprit_max_order}};
}

EstimateSettings estimate_settings_from_json(const json& j) {
  reject_unknown_keys(j, {"window_length", "window_shift", "estimator"}, "");
  EstimateSettings s;
  if (j.contains("window_length")) {
    s.window_length = number(j["window_length"], "window_length");
    if (!(s.window_length > 0.0)) fail("window_length", "must be > 0");
  }
  if (j.contains("window_shift")) {
    const long long shift = integer(j["window_shift"], "window_shift");
    if (shift < 1) fail("window_shift", "must be >= 1 sample");
    s.window_shift = static_cast<std::size_t>(shift);
  }
  if (j.contains("estimator")) s.estimator = estimator_options_from_json(j["estimator"]);
  return s;
}

json to_json(const SweepGrid& g) {
  json snrs = json::array();
  for (const auto& v : g.snr_values) snrs.push_back(snr_to_json(v));
  json methods = json::array();
  for (Method m : g.methods) methods.push_back(std::string(to_string(m)));
  return json{{"f0_values", g.f0_values},
              {"delta_f0_values", g.delta_f0_values},
              {"f_m_values", g.f_m_values},
              {"m_c_values", g.m_c_values},
              {"snr_values", snrs},
              {"methods", methods},
              {"window_length", g.window_length},
              {"window_shift", g.window_shift},
              {"fs", g.fs},
              {"duration", g.duration},
              {"base_seed", g.base_seed},
              {"k_am", g.k_am},
              {"h_max", g.h_max},
              {"estimator", to_json(g.estimator)}};
}

SweepGrid sweep_grid_from_json(const json& j, Profile profile) {
  reject_unknown_keys(j,
                      {"f0_values", "delta_f0_values", "f_m_values", "m_c_values", "snr_values", "methods",
                       "window_length", "window_shift", "fs", "duration", "base_seed", "k_am", "h_max", "estimator"},
                      "");
  SweepGrid g = default_grid(profile);
  if (j.contains("f0_values")) {
    g.f0_values = checked_list(j["f0_values"], "f0_values", [](double d) { return d > 0.0; }, "must be > 0");
  }
  if (j.contains("delta_f0_values")) {
    g.delta_f0_values =
        checked_list(j["delta_f0_values"], "delta_f0_values", [](double d) { return d >= 0.0; }, "must be >= 0");
  }
  if (j.contains("f_m_values")) {
    g.f_m_values = checked_list(j["f_m_values"], "f_m_values", [](double d) { return d > 0.0; }, "must be > 0");
  }
  if (j.contains("m_c_values")) {
    g.m_c_values = checked_list(j["m_c_values"], "m_c_values", [](double d) { return d > 0.0 && d <= 1.0; },
                                "clip level must lie in (0, 1]");
  }
  if (j.contains("snr_values")) {
    g.snr_values = list<std::optional<double>>(j["snr_values"], "snr_values", snr);
  }
  if (j.contains("methods")) {
    g.methods = list<Method>(j["methods"], "methods", [](const json& v, const std::string& f) {
      if (!v.is_string()) fail(f, "expected a method name");
      try {
        return parse_method(v.get<std::string>());
      } catch (const std::invalid_argument& e) {
        fail(f, e.what());
      }
    });
  }
  if (j.contains("window_length")) g.window_length = number(j["window_length"], "window_length");
  if (j.contains("window_shift")) {
    const long long shift = integer(j["window_shift"], "window_shift");
    if (shift < 1) fail("window_shift", "must be >= 1 sample");
    g.window_shift = static_cast<std::size_t>(shift);
  }
  if (j.contains("fs")) g.fs = number(j["fs"], "fs");
  if (j.contains("duration")) g.duration = number(j["duration"], "duration");
  if (j.contains("base_seed")) g.base_seed = unsigned_integer(j["base_seed"], "base_seed");
  if (j.contains("k_am")) g.k_am = number(j["k_am"], "k_am");
  if (j.contains("h_max")) g.h_max = static_cast<int>(integer(j["h_max"], "h_max"));

  if (j.contains("estimator")) g.estimator = estimator_options_from_json(j["estimator"]);

  try {
    validate(g);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return g;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError(path.string() + ":" + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  }
}

TestSignalSpec load_signal_spec(const std::filesystem::path& path) {
  return signal_spec_from_json(read_json_file(path));
}

SweepGrid load_sweep_config(const std::filesystem::path& path, Profile profile) {
  return sweep_grid_from_json(read_json_file(path), profile);
}

void apply_override(json& config, std::string_view dotted_key, std::string_view value) {
  if (dotted_key.empty()) throw ConfigError("empty override key");
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = std::string(value);
  }
  json* node = &config;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', begin);
    const std::string part(dotted_key.substr(begin, dot == std::string_view::npos ? std::string_view::npos : dot - begin));
    if (part.empty()) throw ConfigError("malformed override key '" + std::string(dotted_key) + "'");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string_view::npos) {
      (*node)[part] = parsed;
      return;
    }
    node = &(*node)[part];
    begin = dot + 1;
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& waveform_path) {
  return std::filesystem::path(waveform_path.string() + ".json");
}

void write_waveform(const std::filesystem::path& path, const Waveform& waveform,
                    const std::optional<TestSignalSpec>& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (double v : waveform.samples) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    out.write(bytes, 8);
  }
  if (!out) throw std::runtime_error("short write to '" + path.string() + "'");

  const json meta{{"format", "f64le"},
                  {"fs", waveform.fs},
                  {"t0", waveform.t0},
                  {"n_samples", waveform.samples.size()},
                  {"spec", spec ? to_json(*spec) : json(nullptr)}};
  std::ofstream side(sidecar_path(path));
  if (!side) throw std::runtime_error("cannot write '" + sidecar_path(path).string() + "'");
  side << meta.dump(2) << '\n';
}

LoadedWaveform read_waveform(const std::filesystem::path& path) {
  const json meta = read_json_file(sidecar_path(path));
  reject_unknown_keys(meta, {"format", "fs", "t0", "n_samples", "spec"}, "waveform sidecar");
  if (meta.value("format", std::string("f64le")) != "f64le") throw ConfigError("unsupported waveform format");
  if (!meta.contains("fs")) fail("fs", "missing");
  if (!meta.contains("n_samples")) fail("n_samples", "missing");

  LoadedWaveform lw;
  lw.waveform.fs = number(meta["fs"], "fs");
  lw.waveform.t0 = meta.contains("t0") ? number(meta["t0"], "t0") : 0.0;
  if (!(lw.waveform.fs > 0.0)) fail("fs", "must be > 0");
  const auto n = unsigned_integer(meta["n_samples"], "n_samples");
  if (meta.contains("spec") && !meta["spec"].is_null()) lw.spec = signal_spec_from_json(meta["spec"]);

  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  lw.waveform.samples.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
      throw std::runtime_error("'" + path.string() + "' holds fewer samples than its sidecar declares");
    }
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    lw.waveform.samples[i] = std::bit_cast<double>(bits);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error("'" + path.string() + "' holds more samples than its sidecar declares");
  }
  if (lw.waveform.samples.empty()) throw std::runtime_error("waveform is empty");
  return lw;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_record_row(std::ostream& os, const ErrorRecord& r) {
  os << to_string(r.method) << ',' << format_double(r.config.f0) << ',' << format_double(r.config.delta_f0) << ','
     << format_double(r.config.f_m) << ',' << format_double(r.config.m_c) << ','
     << (r.config.snr_db ? format_double(*r.config.snr_db) : std::string("none")) << ','
     << format_double(r.window.start) << ',' << format_double(r.window.length) << ',' << format_double(r.f0_hat)
     << ',' << format_double(r.f0_ref) << ',' << format_double(r.rel_err) << ',' << (r.failed ? 1 : 0) << '\n';
}

void write_records_csv(std::ostream& os, std::span<const ErrorRecord> records) {
  os << kRecordsHeader << '\n';
  for (const auto& r : records) write_record_row(os, r);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line, const char* column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("records CSV line " + std::to_string(line) + ": bad " + column + " '" + s + "'");
  }
}

}  // namespace

std::vector<ErrorRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("records CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsHeader) throw std::runtime_error("records CSV header mismatch");

  std::vector<ErrorRecord> out;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 12) {
      throw std::runtime_error("records CSV line " + std::to_string(line_no) + ": expected 12 columns");
    }
    ErrorRecord r;
    try {
      r.method = parse_method(f[0]);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("records CSV line " + std::to_string(line_no) + ": " + e.what());
    }
    r.config.f0 = parse_double(f[1], line_no, "f0_hz");
    r.config.delta_f0 = parse_double(f[2], line_no, "delta_f0_hz");
    r.config.f_m = parse_double(f[3], line_no, "fm_hz");
    r.config.m_c = parse_double(f[4], line_no, "mc");
    if (f[5] != "none") r.config.snr_db = parse_double(f[5], line_no, "snr_db");
    r.window.start = parse_double(f[6], line_no, "window_start_s");
    r.window.length = parse_double(f[7], line_no, "window_len_s");
    r.f0_hat = parse_double(f[8], line_no, "f0_hat_hz");
    r.f0_ref = parse_double(f[9], line_no, "f0_ref_hz");
    r.rel_err = parse_double(f[10], line_no, "rel_err");
    if (f[11] != "0" && f[11] != "1") {
      throw std::runtime_error("records CSV line " + std::to_string(line_no) + ": failed must be 0 or 1");
    }
    r.failed = f[11] == "1";
    out.push_back(r);
  }
  return out;
}

void write_summary_csv(std::ostream& os, std::span<const BoxplotSummary> summaries) {
  os << kSummaryHeader << '\n';
  for (const auto& s : summaries) {
    os << to_string(s.method) << ',' << to_string(s.group_var) << ','
       << (s.group_value ? format_double(*s.group_value) : std::string("none")) << ',' << s.n << ',' << s.n_failed
       << ',' << format_double(s.median) << ',' << format_double(s.q1) << ',' << format_double(s.q3) << ','
       << format_double(s.whisker_low) << ',' << format_double(s.whisker_high) << ',' << s.outliers.size() << '\n';
  }
}

}  // namespace f0bench
