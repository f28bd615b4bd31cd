#include "nomabf/config.hpp"
#include "nomabf/export.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

namespace nomabf {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nomabf_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> lines_of(const fs::path& file) {
  std::ifstream in(file);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

CampaignConfig tiny_config() {
  CampaignConfig c;
  c.n_channels = 2;
  c.n_errors_per_channel = 3;
  c.gamma_db_list = {0, 10};
  c.threads = 1;
  return c;
}

GTEST_TEST(ConfigTest, JsonRoundTrip) {
  CampaignConfig c;
  c.n_t = 4;
  c.users = 2;
  c.gamma_db_list = {1.5, 7};
  c.epsilon = 0.02;
  c.master_seed = 123456789012345ULL;
  c.schemes = {Scheme::PerfectCsi, Scheme::Robust};
  c.solver.i_max = 7;
  c.solver.initial_beams = InitialBeams::MatchedFilter;
  c.output_path = "out/dir";
  const CampaignConfig d = campaign_config_from_json(campaign_config_to_json(c));
  EXPECT_EQ(d.n_t, 4);
  EXPECT_EQ(d.users, 2);
  EXPECT_EQ(d.gamma_db_list, c.gamma_db_list);
  EXPECT_EQ(d.epsilon, 0.02);
  EXPECT_EQ(d.master_seed, c.master_seed);
  EXPECT_EQ(d.schemes, c.schemes);
  EXPECT_EQ(d.solver.i_max, 7);
  EXPECT_EQ(d.solver.initial_beams, InitialBeams::MatchedFilter);
  EXPECT_EQ(d.output_path, "out/dir");
  EXPECT_EQ(campaign_config_to_json(d), campaign_config_to_json(c));
}

GTEST_TEST(ConfigTest, DefaultsAndPartialDocuments) {
  const CampaignConfig d = campaign_config_from_json(R"({"epsilon": 0.05})");
  EXPECT_EQ(d.epsilon, 0.05);
  EXPECT_EQ(d.n_channels, CampaignConfig{}.n_channels);
  EXPECT_EQ(d.solver.i_max, SolverConfig{}.i_max);
}

GTEST_TEST(ConfigTest, RejectsBadDocuments) {
  EXPECT_THROW(campaign_config_from_json(R"({"epsilom": 0.05})"), std::invalid_argument);
  EXPECT_THROW(campaign_config_from_json(R"({"solver": {"imax": 3}})"), std::invalid_argument);
  EXPECT_THROW(campaign_config_from_json(R"({"sigma2": -1})"), std::invalid_argument);
  EXPECT_THROW(campaign_config_from_json(R"({"schemes": ["best"]})"), std::invalid_argument);
  EXPECT_ANY_THROW(campaign_config_from_json("{not json"));
  EXPECT_THROW(load_campaign_config("/nonexistent/nomabf.json"), std::runtime_error);
}

GTEST_TEST(ConfigTest, InstanceChannels) {
  const InstanceConfig inst = instance_config_from_json(R"({
    "sigma2": 0.02,
    "channels": [[[1, 0], [0, 1]], [[0.5, -0.5], [0, 0]]]
  })");
  ASSERT_TRUE(inst.channels.has_value());
  EXPECT_EQ(inst.campaign.users, 2);
  EXPECT_EQ(inst.campaign.n_t, 2);
  EXPECT_EQ(inst.channels->sigma2, 0.02);
  EXPECT_EQ(inst.channels->estimates[0](1), Complex(0, 1));
  EXPECT_EQ(inst.channels->estimates[1](0), Complex(0.5, -0.5));

  EXPECT_FALSE(instance_config_from_json("{}").channels.has_value());
  EXPECT_THROW(instance_config_from_json(R"({"channels": [[[1, 0]], [[1, 0], [0, 1]]]})"),
               std::invalid_argument);
  EXPECT_THROW(instance_config_from_json(R"({"channels": [[[1, 0, 0]]]})"),
               std::invalid_argument);
  EXPECT_THROW(instance_config_from_json(R"({"channels": []})"), std::invalid_argument);
}

GTEST_TEST(ExportTest, FormatDoubleRoundTrips) {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1e-300, 123456.789, std::nextafter(1.0, 2.0)}) {
    const std::string s = format_double(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

GTEST_TEST(ExportTest, WritesAllFilesAndReadsSummaryBack) {
  const CampaignResult r = run_campaign(tiny_config());
  const fs::path dir = temp_dir("export") / "nested";
  export_results(r, dir);

  const auto summary = read_summary(dir / kSummaryFile);
  EXPECT_EQ(summary, summary_records(r));
  ASSERT_EQ(summary.size(), 6u);
  EXPECT_EQ(summary[0].scheme, "robust");

  const auto sinr = lines_of(dir / kSinrSamplesFile);
  ASSERT_FALSE(sinr.empty());
  EXPECT_EQ(sinr[0], "scheme,gamma_db,user,sinr_db");
  long samples = 0;
  for (const auto& e : r.entries)
    for (const auto& s : e.sinr_samples_db) samples += static_cast<long>(s.size());
  EXPECT_EQ(static_cast<long>(sinr.size()) - 1, samples);

  const auto hist = lines_of(dir / kIterationHistogramFile);
  ASSERT_EQ(hist.size(), 1u + r.config.solver.i_max);
  EXPECT_EQ(hist[0], "iterations,count");
  const auto pooled = r.pooled_histogram();
  for (int k = 0; k < r.config.solver.i_max; ++k)
    EXPECT_EQ(hist[k + 1], std::to_string(k + 1) + "," + std::to_string(pooled[k]));

  const auto power = lines_of(dir / kPowerVsGammaFile);
  ASSERT_EQ(power.size(), 7u);
  EXPECT_EQ(power[0], "scheme,gamma_db,mean_power_mw,adjusted_power_mw");
  fs::remove_all(dir.parent_path());
}

GTEST_TEST(ExportTest, EmptyCampaignWritesHeaders) {
  CampaignConfig c = tiny_config();
  c.n_channels = 0;
  const CampaignResult r = run_campaign(c);
  const fs::path dir = temp_dir("empty");
  export_results(r, dir);
  EXPECT_EQ(lines_of(dir / kSinrSamplesFile).size(), 1u);
  const auto summary = read_summary(dir / kSummaryFile);
  ASSERT_EQ(summary.size(), 6u);
  EXPECT_TRUE(std::isnan(summary[0].mean_power_mw));
  EXPECT_EQ(summary, summary_records(r));
  fs::remove_all(dir);
}

GTEST_TEST(ExportTest, OutputIsDeterministic) {
  const CampaignResult r = run_campaign(tiny_config());
  const fs::path a = temp_dir("det_a");
  const fs::path b = temp_dir("det_b");
  export_results(r, a);
  export_results(run_campaign(tiny_config()), b);
  for (const char* f : {kSummaryFile, kSinrSamplesFile, kIterationHistogramFile, kPowerVsGammaFile}) {
    std::ifstream fa(a / f, std::ios::binary), fb(b / f, std::ios::binary);
    const std::string sa{std::istreambuf_iterator<char>(fa), {}};
    const std::string sb{std::istreambuf_iterator<char>(fb), {}};
    EXPECT_EQ(sa, sb) << f;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

GTEST_TEST(ExportTest, IoErrorsNameThePath) {
  const fs::path dir = temp_dir("blocked");
  fs::create_directories(dir);
  const fs::path file = dir / "plain_file";
  std::ofstream(file) << "x";
  CampaignConfig c = tiny_config();
  c.n_channels = 0;
  try {
    export_results(run_campaign(c), file / "sub");
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("plain_file"), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_summary(dir / "missing.json"), std::runtime_error);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace nomabf
