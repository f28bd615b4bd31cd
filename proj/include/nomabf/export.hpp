#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nomabf/campaign.hpp"

namespace nomabf {

// Files written by export_results, all under one directory.
inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kSinrSamplesFile = "sinr_samples.csv";
inline constexpr const char* kIterationHistogramFile = "iteration_histogram.csv";
inline constexpr const char* kPowerVsGammaFile = "power_vs_gamma.csv";

// Scalars of one (scheme, gamma) entry as they appear in the summary.
struct SummaryRecord {
  std::string scheme;
  double gamma_db{0};
  double mean_power_mw{0};
  double outage_probability{0};
  double outage_adjusted_power_mw{0};
  double feasibility_ratio{0};
  long infeasible_count{0};
  long designs{0};
  long converged_runs{0};
  long outage_events{0};
  long evaluations{0};
  std::vector<long> iteration_histogram;

  bool operator==(const SummaryRecord&) const;
};

std::vector<SummaryRecord> summary_records(const CampaignResult& result);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Throws std::runtime_error naming the offending path on I/O failure.
void export_results(const CampaignResult& result, const std::filesystem::path& dir);

std::vector<SummaryRecord> read_summary(const std::filesystem::path& file);

}  // namespace nomabf
