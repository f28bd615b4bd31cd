#include "nomabf/robust_solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nomabf {

std::string_view to_string(InitialBeams b) {
  switch (b) {
    case InitialBeams::MatchedFilter: return "matched_filter";
    case InitialBeams::NonRobust: return "nonrobust";
  }
  return "unknown";
}

InitialBeams parse_initial_beams(std::string_view name) {
  if (name == "matched_filter") return InitialBeams::MatchedFilter;
  if (name == "nonrobust") return InitialBeams::NonRobust;
  throw std::invalid_argument("unknown initial beams: " + std::string(name));
}

void SolverConfig::validate() const {
  detail::require(i_max >= 1, "SolverConfig: i_max must be positive");
  detail::require(delta_tol > 0, "SolverConfig: delta_tol must be positive");
  detail::require(sdp_tol > 0, "SolverConfig: sdp_tol must be positive");
  detail::require(rank_one_threshold > 0, "SolverConfig: rank_one_threshold must be positive");
  detail::require(randomization_trials >= 0, "SolverConfig: negative randomization_trials");
}

SdrOptions SolverConfig::sdr_options(std::uint64_t stream) const {
  SdrOptions o;
  o.sdp.tol = sdp_tol;
  o.rank_one_threshold = rank_one_threshold;
  o.randomization_trials = randomization_trials;
  o.seed = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  return o;
}

BeamformerSet init_beamformers(const ChannelSet& channels, const QosTargets& targets) {
  const int U = channels.users();
  detail::require(targets.users() == U, "init_beamformers: target size mismatch");
  BeamformerSet out;
  out.beams.reserve(U);
  for (int u = 0; u < U; ++u) {
    const CVec& h = channels.estimates[u];
    const double n2 = h.squaredNorm();
    detail::require(n2 > 0, "init_beamformers: zero channel estimate");
    const double p = U * targets.gamma[u] * channels.sigma2 / n2;
    out.beams.push_back(std::sqrt(p) * h / std::sqrt(n2));
  }
  return out;
}

ErrorSet init_errors(Rng& rng, double epsilon, int n_t, int users) {
  ErrorSet out;
  out.errors.reserve(users);
  for (int l = 0; l < users; ++l) out.errors.push_back(sample_error_ball(rng, n_t, epsilon));
  return out;
}

double convergence_delta(const BeamformerSet& prev, const BeamformerSet& next) {
  detail::require(prev.users() == next.users() && prev.users() > 0,
                  "convergence_delta: shape mismatch");
  const auto n_t = prev.beams.front().size();
  double sum = 0;
  for (int u = 0; u < prev.users(); ++u) {
    detail::require(prev.beams[u].size() == next.beams[u].size(),
                    "convergence_delta: shape mismatch");
    sum += (prev.beams[u] - next.beams[u]).norm();
  }
  return sum / static_cast<double>(n_t * prev.users());
}

RobustSolution run(const ChannelSet& channels, const QosTargets& targets,
                   const SolverConfig& config) {
  config.validate();
  const int U = channels.users();
  const int N = channels.antennas();
  detail::require(targets.users() == U, "run: target size mismatch");

  Rng rng = make_rng({config.seed, 0xe770});
  RobustSolution out;
  out.errors = init_errors(rng, channels.epsilon, N, U);
  out.beams = init_beamformers(channels, targets);
  if (config.initial_beams == InitialBeams::NonRobust) {
    const SdrResult start = solve_nonrobust(channels, targets, config);
    if (start.status == SolverStatus::Optimal &&
        (start.all_rank_one() || start.randomization_succeeded))
      out.beams = start.beams;
  }
  out.rank_one_all = true;

  sdp::SdpOptions dual_options;
  dual_options.tol = config.sdp_tol;

  for (int i = 1; i <= config.i_max; ++i) {
    out.iterations = i;
    const ScalingSet t = update_t(channels, out.errors, out.beams);

    ErrorSet next_errors = ErrorSet::zeros(N, U);
    for (int l = 0; l < U; ++l) {
      const InnerQuadratic q = assemble_quadratic(l, t, out.beams, channels);
      const DualSolution dual = solve_dual(q, channels.epsilon, dual_options);
      if (dual.status != SolverStatus::Optimal) {
        out.status = dual.status;
        out.failed_iteration = i;
        return out;
      }
      const ErrorRecovery rec = recover_error(q, channels.epsilon, dual.lambda);
      if (rec.status != SolverStatus::Optimal) {
        out.status = rec.status;
        out.failed_iteration = i;
        return out;
      }
      next_errors.errors[l] = rec.error;
    }

    const SdrResult sdr = solve_power_min(channels, next_errors, targets,
                                          config.sdr_options(static_cast<std::uint64_t>(i)));
    if (sdr.status != SolverStatus::Optimal) {
      out.status = sdr.status;
      out.failed_iteration = i;
      out.rank_one_all = false;
      return out;
    }
    out.rank_one_all = out.rank_one_all && sdr.all_rank_one();
    out.used_randomization = out.used_randomization || sdr.used_randomization;

    const double delta = convergence_delta(out.beams, sdr.beams);
    out.per_iteration_delta.push_back(delta);
    out.beams = sdr.beams;
    out.errors = std::move(next_errors);
    out.total_power = sdr.beam_power;
    if (delta < config.delta_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

SdrResult solve_nonrobust(const ChannelSet& channels, const QosTargets& targets,
                          const SolverConfig& config) {
  config.validate();
  return solve_power_min(channels, ErrorSet::zeros(channels.antennas(), channels.users()),
                         targets, config.sdr_options(0));
}

}  // namespace nomabf
