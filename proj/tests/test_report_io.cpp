#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "f0bench/report_io.hpp"

using namespace f0bench;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "f0bench_report_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string error_of(const json& j) {
  try {
    sweep_grid_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(SweepConfig, EmptyObjectGivesDefaultGrid) {
  EXPECT_EQ(sweep_grid_from_json(json::object()), default_grid(Profile::desk));
  EXPECT_EQ(sweep_grid_from_json(json::object(), Profile::paper), default_grid(Profile::paper));
}

TEST(SweepConfig, PaperProfileRateAccepted) {
  const auto g = sweep_grid_from_json(json::parse(R"({"fs":327680,"window_shift":100})"));
  EXPECT_EQ(g.fs, 327680.0);
  EXPECT_EQ(g.window_shift, 100u);
}

TEST(SweepConfig, FieldLevelErrors) {
  EXPECT_NE(error_of(json::parse(R"({"m_c_values":[2.0]})")).find("m_c_values[0]"), std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"m_c_values":[1, 0]})")).find("m_c_values[1]"), std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"colour":1})")).find("colour"), std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"estimator":{"order":3}})")).find("estimator.order"), std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"methods":["iec","fft"]})")).find("methods[1]"), std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"window_shift":0})")).find("window_shift"), std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"f0_values":"50"})")).find("f0_values"), std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"f_m_values":[]})")).find("f_m_values"), std::string::npos);
  EXPECT_NE(error_of(json::parse(R"({"window_length":0.20001})")), "");
  EXPECT_NE(error_of(json::parse("[]")), "");
}

TEST(SweepConfig, RoundTripsThroughJson) {
  auto g = default_grid(Profile::desk);
  g.snr_values = {std::nullopt, 3.5};
  g.methods = {Method::hilbert};
  g.base_seed = 0xfeedfacecafebeefULL;
  g.estimator.hilbert_prefilter = false;
  g.estimator.esprit_model_order = 6;
  EXPECT_EQ(sweep_grid_from_json(to_json(g)), g);
  const auto h = sweep_grid_from_json(json::parse(R"({"snr_values":[null, "none", -10]})"));
  ASSERT_EQ(h.snr_values.size(), 3u);
  EXPECT_FALSE(h.snr_values[0].has_value());
  EXPECT_FALSE(h.snr_values[1].has_value());
  EXPECT_EQ(h.snr_values[2], -10.0);
}

TEST(SignalConfig, RoundTripAndErrors) {
  TestSignalSpec s;
  s.f0 = 49.98;
  s.snr_db = -10.0;
  s.seed = 77;
  EXPECT_EQ(signal_spec_from_json(to_json(s)), s);
  EXPECT_EQ(signal_spec_from_json(json::object()), TestSignalSpec{});
  EXPECT_THROW(signal_spec_from_json(json::parse(R"({"m_c":2})")), ConfigError);
  EXPECT_THROW(signal_spec_from_json(json::parse(R"({"mc":0.5})")), ConfigError);
  EXPECT_THROW(signal_spec_from_json(json::parse(R"({"h_max":1.5})")), ConfigError);
  EXPECT_THROW(signal_spec_from_json(json::parse(R"({"seed":-1})")), ConfigError);
}

TEST(ReadJsonFile, ReportsLineOfSyntaxError) {
  const auto p = scratch("bad.json");
  std::ofstream(p) << "{\n  \"f0_values\": [50],\n  \"m_c_values\": [1,,]\n}\n";
  try {
    read_json_file(p);
    FAIL() << "no error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_json_file(scratch("missing.json")), ConfigError);
}

TEST(Overrides, DottedPaths) {
  json j = json::object();
  apply_override(j, "estimator.hilbert_prefilter", "false");
  apply_override(j, "f0_values", "[47, 52]");
  apply_override(j, "methods", "[\"iec\"]");
  apply_override(j, "note", "plain text");
  EXPECT_EQ(j["estimator"]["hilbert_prefilter"], false);
  EXPECT_EQ(j["f0_values"], json::parse("[47, 52]"));
  EXPECT_EQ(j["note"], "plain text");
  EXPECT_THROW(apply_override(j, "", "1"), ConfigError);
  EXPECT_THROW(apply_override(j, "a..b", "1"), ConfigError);
}

TEST(Waveform, RoundTripWithSidecar) {
  TestSignalSpec s;
  s.duration = 0.5;
  s.snr_db = 0.0;
  s.seed = 5;
  const auto w = synthesize(s);
  const auto p = scratch("w.f64");
  write_waveform(p, w, s);
  EXPECT_EQ(std::filesystem::file_size(p), w.size() * 8);
  const auto back = read_waveform(p);
  EXPECT_EQ(back.waveform.samples, w.samples);
  EXPECT_EQ(back.waveform.fs, w.fs);
  ASSERT_TRUE(back.spec.has_value());
  EXPECT_EQ(*back.spec, s);
  const auto side = read_json_file(sidecar_path(p));
  EXPECT_EQ(side["n_samples"], w.size());
  EXPECT_EQ(side["spec"]["seed"], 5);

  // Little-endian on disk regardless of host.
  std::ifstream in(p, std::ios::binary);
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  EXPECT_EQ(std::bit_cast<double>(bits), w.samples[0]);
}

TEST(Waveform, TruncatedFileRejected) {
  Waveform w{100.0, std::vector<double>(10, 1.0), 0.0};
  const auto p = scratch("short.f64");
  write_waveform(p, w, std::nullopt);
  std::filesystem::resize_file(p, 72);
  EXPECT_THROW(read_waveform(p), std::runtime_error);
}

TEST(Csv, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(50.0), "50");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(1e-17), "1e-17");
}

TEST(Csv, RecordsRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ErrorRecord> records;
  for (int i = 0; i < 500; ++i) {
    ErrorRecord r;
    r.method = kAllMethods[i % 4];
    r.config = {45.0 + 10 * u(rng), 10 * u(rng), 20 * u(rng), u(rng), i % 3 ? std::optional<double>(-10.0 + i % 7)
                                                                            : std::nullopt};
    r.window = {0.1 * i, 0.2};
    r.f0_ref = 40.0 + 20.0 * u(rng);
    r.failed = i % 11 == 0;
    r.f0_hat = r.failed ? std::nan("") : r.f0_ref * (1.0 + 1e-3 * (u(rng) - 0.5));
    r.rel_err = r.failed ? std::nan("") : compute_error(r.f0_hat, r.f0_ref);
    records.push_back(r);
  }
  std::stringstream ss;
  write_records_csv(ss, records);
  EXPECT_EQ(ss.str().substr(0, kRecordsHeader.size()), kRecordsHeader);
  const auto back = read_records_csv(ss);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].method, records[i].method);
    EXPECT_EQ(back[i].failed, records[i].failed);
    EXPECT_EQ(back[i].config.snr_db.has_value(), records[i].config.snr_db.has_value());
    if (records[i].failed) {
      EXPECT_TRUE(std::isnan(back[i].rel_err));
    } else {
      EXPECT_NEAR(back[i].rel_err, records[i].rel_err, 1e-10 * records[i].rel_err + 1e-300);
    }
  }
}

TEST(Csv, MalformedRecordsRejected) {
  std::istringstream wrong_header("a,b,c\n");
  EXPECT_THROW(read_records_csv(wrong_header), std::runtime_error);
  std::istringstream short_row(std::string(kRecordsHeader) + "\niec,50,1\n");
  EXPECT_THROW(read_records_csv(short_row), std::runtime_error);
  std::istringstream bad_method(std::string(kRecordsHeader) + "\nfoo,50,1,1,1,none,0,0.2,50,50,0,0\n");
  EXPECT_THROW(read_records_csv(bad_method), std::runtime_error);
}

TEST(Csv, SummaryLayout) {
  BoxplotSummary s;
  s.group_var = GroupVar::snr;
  s.method = Method::hilbert;
  s.n = 3;
  s.n_failed = 1;
  s.median = 0.5;
  s.outliers = {9.0, 10.0};
  std::ostringstream os;
  write_summary_csv(os, std::vector<BoxplotSummary>{s});
  EXPECT_EQ(os.str(), std::string(kSummaryHeader) + "\nhilbert,snr,none,3,1,0.5,0,0,0,0,2\n");
}
