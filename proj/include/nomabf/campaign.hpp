#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nomabf/robust_solver.hpp"

namespace nomabf {

enum class Scheme { Robust, NonRobust, PerfectCsi };

std::string_view to_string(Scheme s);
// Accepts "robust", "nonrobust", "perfect_csi"; throws std::invalid_argument.
Scheme parse_scheme(std::string_view name);

struct CampaignConfig {
  int n_t{3};
  int users{3};
  std::vector<double> gamma_db_list{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double epsilon{0.01};
  double sigma2{0.01};
  int n_channels{500};
  int n_errors_per_channel{100};
  SolverConfig solver;
  std::uint64_t master_seed{1};
  std::string output_path{"results"};
  std::vector<Scheme> schemes{Scheme::Robust, Scheme::NonRobust, Scheme::PerfectCsi};
  int threads{0};  // 0: hardware concurrency

  void validate() const;
};

struct SchemeGammaResult {
  Scheme scheme{Scheme::Robust};
  double gamma_db{0};
  double mean_power_mw{0};
  double outage_probability{0};
  double outage_adjusted_power_mw{0};
  std::vector<std::vector<double>> sinr_samples_db;  // [user][sample]
  // Robust only: bucket k holds runs that stopped after k+1 iterations;
  // the last bucket also absorbs runs that never converged.
  std::vector<long> iteration_histogram;
  double feasibility_ratio{0};
  long infeasible_count{0};
  long designs{0};           // relaxations (or robust runs) attempted
  long converged_runs{0};    // robust only
  long outage_events{0};
  long evaluations{0};       // (user, realization) pairs
  double wall_time{0};       // seconds, not exported
};

struct CampaignResult {
  CampaignConfig config;
  std::vector<SchemeGammaResult> entries;  // scheme-major, then gamma order

  [[nodiscard]] const SchemeGammaResult* find(Scheme s, double gamma_db) const;
  // Iteration histogram pooled over every gamma for the robust scheme.
  [[nodiscard]] std::vector<long> pooled_histogram() const;
};

struct RealizationOutcome {
  std::vector<double> sinr;  // per-user effective SINR, linear
  std::vector<bool> outage;
};

RealizationOutcome evaluate_realization(const BeamformerSet& beams,
                                        const ChannelSet& channel_estimates,
                                        const ErrorSet& true_errors,
                                        const QosTargets& targets);

CampaignResult run_campaign(const CampaignConfig& config);

}  // namespace nomabf
