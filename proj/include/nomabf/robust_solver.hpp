#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "nomabf/sampling.hpp"
#include "nomabf/sdr_beamforming.hpp"
#include "nomabf/worst_case_error.hpp"

namespace nomabf {

// Starting beams for the robust loop. NonRobust falls back to MatchedFilter
// when the relaxation at the estimates fails.
enum class InitialBeams { MatchedFilter, NonRobust };

std::string_view to_string(InitialBeams b);
// Accepts "matched_filter", "nonrobust"; throws std::invalid_argument.
InitialBeams parse_initial_beams(std::string_view name);

struct SolverConfig {
  int i_max{10};
  double delta_tol{1e-4};
  double sdp_tol{1e-7};
  double rank_one_threshold{1e-4};
  int randomization_trials{1000};
  std::uint64_t seed{0};
  InitialBeams initial_beams{InitialBeams::NonRobust};

  void validate() const;
  [[nodiscard]] SdrOptions sdr_options(std::uint64_t stream) const;
};

struct RobustSolution {
  BeamformerSet beams;
  ErrorSet errors;  // final worst-case estimates, one per decoder
  double total_power{0};
  int iterations{0};
  bool converged{false};
  std::vector<double> per_iteration_delta;
  bool rank_one_all{false};  // every relaxation in the run was rank one
  bool used_randomization{false};
  SolverStatus status{SolverStatus::Optimal};
  int failed_iteration{0};  // 1-based, 0 when no failure
};

// Matched filters with power U Gamma_u sigma^2 / ||h_u||^2.
BeamformerSet init_beamformers(const ChannelSet& channels, const QosTargets& targets);

ErrorSet init_errors(Rng& rng, double epsilon, int n_t, int users);

// sum_u ||prev_u - next_u|| / (N_t U)
double convergence_delta(const BeamformerSet& prev, const BeamformerSet& next);

// Alternates scaling update, worst-case error estimation and the relaxed
// power minimization until the beams settle or i_max is reached. Channels
// must already be in canonical order.
RobustSolution run(const ChannelSet& channels, const QosTargets& targets,
                   const SolverConfig& config = {});

// Single relaxation at the estimates, ignoring uncertainty.
SdrResult solve_nonrobust(const ChannelSet& channels, const QosTargets& targets,
                          const SolverConfig& config = {});

}  // namespace nomabf
