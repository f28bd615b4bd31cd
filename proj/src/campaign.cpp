#include "nomabf/campaign.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace nomabf {

namespace {

// SINRs within this relative distance below target still count as served;
// absorbs roundoff when designed constraints are re-evaluated.
constexpr double kOutageRelTol = 1e-9;

constexpr std::uint64_t kChannelStream = 0xc4a77e1;
constexpr std::uint64_t kErrorStream = 0xe7707;
constexpr std::uint64_t kSolverStream = 0x501e7;

struct Accumulator {
  double power_sum{0};
  long power_count{0};
  long outage_events{0};
  long evaluations{0};
  std::vector<std::vector<double>> sinr_db;
  std::vector<long> histogram;
  long rank_one{0};
  long designs{0};
  long infeasible{0};
  long converged{0};
  double seconds{0};

  void init(int users, int i_max) {
    sinr_db.assign(users, {});
    histogram.assign(i_max, 0);
  }

  void add_outcome(const RealizationOutcome& r) {
    for (std::size_t u = 0; u < r.sinr.size(); ++u) {
      sinr_db[u].push_back(10.0 * std::log10(r.sinr[u]));
      outage_events += r.outage[u] ? 1 : 0;
      ++evaluations;
    }
  }

  void add_failure(int users, int realizations) {
    ++infeasible;
    outage_events += static_cast<long>(users) * realizations;
    evaluations += static_cast<long>(users) * realizations;
  }

  void merge(const Accumulator& o) {
    power_sum += o.power_sum;
    power_count += o.power_count;
    outage_events += o.outage_events;
    evaluations += o.evaluations;
    for (std::size_t u = 0; u < sinr_db.size(); ++u)
      sinr_db[u].insert(sinr_db[u].end(), o.sinr_db[u].begin(), o.sinr_db[u].end());
    for (std::size_t k = 0; k < histogram.size(); ++k) histogram[k] += o.histogram[k];
    rank_one += o.rank_one;
    designs += o.designs;
    infeasible += o.infeasible;
    converged += o.converged;
    seconds += o.seconds;
  }
};

ChannelSet draw_channels(const CampaignConfig& cfg, int channel) {
  Rng rng = make_rng({cfg.master_seed, kChannelStream, static_cast<std::uint64_t>(channel)});
  ChannelSet ch;
  ch.epsilon = cfg.epsilon;
  ch.sigma2 = cfg.sigma2;
  for (int u = 0; u < cfg.users; ++u) ch.estimates.push_back(sample_channel(rng, cfg.n_t));
  return canonicalize_order(ch).channels;
}

ErrorSet draw_errors(const CampaignConfig& cfg, int channel, int realization) {
  Rng rng = make_rng({cfg.master_seed, kErrorStream, static_cast<std::uint64_t>(channel),
                      static_cast<std::uint64_t>(realization)});
  ErrorSet e;
  for (int u = 0; u < cfg.users; ++u)
    e.errors.push_back(sample_error_ball(rng, cfg.n_t, cfg.epsilon));
  return e;
}

ChannelSet true_channels(const ChannelSet& est, const ErrorSet& err) {
  ChannelSet out = est;
  for (int u = 0; u < est.users(); ++u) out.estimates[u] += err.errors[u];
  return out;
}

// One channel realization, every (gamma, scheme) pair. Index: g * S + s.
std::vector<Accumulator> simulate_channel(const CampaignConfig& cfg, int channel) {
  const int U = cfg.users;
  const int G = static_cast<int>(cfg.gamma_db_list.size());
  const int S = static_cast<int>(cfg.schemes.size());
  const int R = cfg.n_errors_per_channel;

  std::vector<Accumulator> acc(static_cast<std::size_t>(G) * S);
  for (auto& a : acc) a.init(U, cfg.solver.i_max);

  const ChannelSet est = draw_channels(cfg, channel);
  std::vector<ErrorSet> errors;
  errors.reserve(R);
  for (int r = 0; r < R; ++r) errors.push_back(draw_errors(cfg, channel, r));
  const ErrorSet no_error = ErrorSet::zeros(cfg.n_t, U);

  for (int g = 0; g < G; ++g) {
    const QosTargets targets = QosTargets::uniform_db(U, cfg.gamma_db_list[g]);
    for (int s = 0; s < S; ++s) {
      Accumulator& a = acc[static_cast<std::size_t>(g) * S + s];
      const auto start = std::chrono::steady_clock::now();
      SolverConfig solver = cfg.solver;
      solver.seed = make_rng({cfg.master_seed, kSolverStream,
                              static_cast<std::uint64_t>(channel),
                              static_cast<std::uint64_t>(g)})();

      switch (cfg.schemes[s]) {
        case Scheme::Robust: {
          const RobustSolution sol = run(est, targets, solver);
          ++a.designs;
          if (sol.status != SolverStatus::Optimal) {
            a.add_failure(U, R);
            break;
          }
          a.power_sum += sol.total_power;
          ++a.power_count;
          if (sol.rank_one_all) ++a.rank_one;
          if (sol.converged) ++a.converged;
          const int bucket = sol.converged ? sol.iterations : solver.i_max;
          ++a.histogram[bucket - 1];
          for (const auto& e : errors)
            a.add_outcome(evaluate_realization(sol.beams, est, e, targets));
          break;
        }
        case Scheme::NonRobust: {
          const SdrResult sdr = solve_nonrobust(est, targets, solver);
          ++a.designs;
          if (sdr.status != SolverStatus::Optimal) {
            a.add_failure(U, R);
            break;
          }
          a.power_sum += sdr.beam_power;
          ++a.power_count;
          if (sdr.all_rank_one()) ++a.rank_one;
          for (const auto& e : errors)
            a.add_outcome(evaluate_realization(sdr.beams, est, e, targets));
          break;
        }
        case Scheme::PerfectCsi: {
          for (int r = 0; r < R; ++r) {
            const ChannelSet truth = true_channels(est, errors[r]);
            const SdrResult sdr = solve_power_min(truth, no_error, targets,
                                                  solver.sdr_options(static_cast<std::uint64_t>(r)));
            ++a.designs;
            if (sdr.status != SolverStatus::Optimal) {
              a.add_failure(U, 1);
              continue;
            }
            a.power_sum += sdr.beam_power;
            ++a.power_count;
            if (sdr.all_rank_one()) ++a.rank_one;
            a.add_outcome(evaluate_realization(sdr.beams, truth, no_error, targets));
          }
          break;
        }
      }
      a.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  }
  return acc;
}

}  // namespace

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Robust: return "robust";
    case Scheme::NonRobust: return "nonrobust";
    case Scheme::PerfectCsi: return "perfect_csi";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "robust") return Scheme::Robust;
  if (name == "nonrobust") return Scheme::NonRobust;
  if (name == "perfect_csi") return Scheme::PerfectCsi;
  throw std::invalid_argument("unknown scheme: " + std::string(name));
}

void CampaignConfig::validate() const {
  detail::require(n_t >= 1 && users >= 1, "CampaignConfig: n_t and users must be positive");
  detail::require(n_channels >= 0 && n_errors_per_channel >= 1,
                  "CampaignConfig: invalid realization counts");
  detail::require(epsilon >= 0, "CampaignConfig: negative epsilon");
  detail::require(sigma2 > 0, "CampaignConfig: sigma2 must be positive");
  detail::require(!schemes.empty(), "CampaignConfig: no schemes");
  detail::require(threads >= 0, "CampaignConfig: negative thread count");
  solver.validate();
}

const SchemeGammaResult* CampaignResult::find(Scheme s, double gamma_db) const {
  for (const auto& e : entries)
    if (e.scheme == s && e.gamma_db == gamma_db) return &e;
  return nullptr;
}

std::vector<long> CampaignResult::pooled_histogram() const {
  std::vector<long> out(config.solver.i_max, 0);
  for (const auto& e : entries) {
    if (e.scheme != Scheme::Robust) continue;
    for (std::size_t k = 0; k < out.size() && k < e.iteration_histogram.size(); ++k)
      out[k] += e.iteration_histogram[k];
  }
  return out;
}

RealizationOutcome evaluate_realization(const BeamformerSet& beams,
                                        const ChannelSet& channel_estimates,
                                        const ErrorSet& true_errors,
                                        const QosTargets& targets) {
  check_shapes(channel_estimates, true_errors, beams);
  const int U = channel_estimates.users();
  RealizationOutcome out;
  out.sinr.resize(U);
  out.outage.resize(U);
  for (int u = 0; u < U; ++u) {
    out.sinr[u] = effective_sinr(u, channel_estimates, true_errors, beams);
    out.outage[u] = out.sinr[u] < targets.gamma[u] * (1.0 - kOutageRelTol);
  }
  return out;
}

CampaignResult run_campaign(const CampaignConfig& config) {
  config.validate();
  const int C = config.n_channels;
  const int G = static_cast<int>(config.gamma_db_list.size());
  const int S = static_cast<int>(config.schemes.size());

  std::vector<std::vector<Accumulator>> partial(C);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int c = next++; c < C; c = next++) {
      try {
        partial[c] = simulate_channel(config, c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, std::max(C, 1)));
  {
    std::vector<std::jthread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  // Merge in channel order so the output is independent of scheduling.
  std::vector<Accumulator> total(static_cast<std::size_t>(G) * S);
  for (auto& a : total) a.init(config.users, config.solver.i_max);
  for (const auto& p : partial)
    for (std::size_t k = 0; k < p.size(); ++k) total[k].merge(p[k]);

  CampaignResult result;
  result.config = config;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int s = 0; s < S; ++s) {
    for (int g = 0; g < G; ++g) {
      const Accumulator& a = total[static_cast<std::size_t>(g) * S + s];
      SchemeGammaResult r;
      r.scheme = config.schemes[s];
      r.gamma_db = config.gamma_db_list[g];
      r.mean_power_mw = a.power_count > 0 ? a.power_sum / a.power_count : nan;
      r.outage_probability =
          a.evaluations > 0 ? static_cast<double>(a.outage_events) / a.evaluations : 0.0;
      r.outage_adjusted_power_mw =
          r.outage_probability < 1.0 ? r.mean_power_mw / (1.0 - r.outage_probability)
                                     : std::numeric_limits<double>::infinity();
      r.sinr_samples_db = a.sinr_db;
      if (r.scheme == Scheme::Robust) r.iteration_histogram = a.histogram;
      r.feasibility_ratio = a.designs > 0 ? static_cast<double>(a.rank_one) / a.designs : 0.0;
      r.infeasible_count = a.infeasible;
      r.designs = a.designs;
      r.converged_runs = a.converged;
      r.outage_events = a.outage_events;
      r.evaluations = a.evaluations;
      r.wall_time = a.seconds;
      result.entries.push_back(std::move(r));
    }
  }
  return result;
}

}  // namespace nomabf
