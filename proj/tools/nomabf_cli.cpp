#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "nomabf/config.hpp"
#include "nomabf/export.hpp"
#include "nomabf/robust_solver.hpp"
#include "support/checks.hpp"

namespace {

using namespace nomabf;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma_db;
  std::optional<double> epsilon;
  std::optional<double> sigma2;
  std::optional<int> n_t;
  std::optional<int> users;
  std::optional<int> channels;
  std::optional<int> errors_per_channel;
  std::vector<std::string> schemes;
  std::string out;
  std::optional<int> i_max;
  std::optional<double> tol;
  std::optional<int> threads;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON config document")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--gamma-db", o.gamma_db, "SINR target in dB");
  app->add_option("--epsilon", o.epsilon, "CSI error radius");
  app->add_option("--sigma2", o.sigma2, "noise power");
  app->add_option("--nt", o.n_t, "transmit antennas");
  app->add_option("--users", o.users, "number of users");
  app->add_option("--imax", o.i_max, "maximum robust iterations");
  app->add_option("--tol", o.tol, "SDP tolerance");
}

void apply(const Overrides& o, CampaignConfig& c) {
  if (o.seed) c.master_seed = *o.seed;
  if (o.gamma_db) c.gamma_db_list = {*o.gamma_db};
  if (o.epsilon) c.epsilon = *o.epsilon;
  if (o.sigma2) c.sigma2 = *o.sigma2;
  if (o.n_t) c.n_t = *o.n_t;
  if (o.users) c.users = *o.users;
  if (o.channels) c.n_channels = *o.channels;
  if (o.errors_per_channel) c.n_errors_per_channel = *o.errors_per_channel;
  if (!o.schemes.empty()) {
    c.schemes.clear();
    for (const auto& s : o.schemes) c.schemes.push_back(parse_scheme(s));
  }
  if (!o.out.empty()) c.output_path = o.out;
  if (o.i_max) c.solver.i_max = *o.i_max;
  if (o.tol) c.solver.sdp_tol = *o.tol;
  if (o.threads) c.threads = *o.threads;
  c.validate();
}

std::string complex_text(Complex z) {
  std::ostringstream os;
  os << format_double(std::real(z)) << (std::imag(z) < 0 ? "-" : "+")
     << format_double(std::abs(std::imag(z))) << 'j';
  return os.str();
}

int run_solve(const Overrides& o) {
  InstanceConfig inst = o.config.empty() ? InstanceConfig{} : load_instance_config(o.config);
  CampaignConfig& c = inst.campaign;
  if (inst.channels && (o.n_t || o.users))
    throw std::invalid_argument("--nt/--users conflict with explicit channels");
  apply(o, c);
  if (c.gamma_db_list.empty()) throw std::invalid_argument("no SINR target given");

  ChannelSet given;
  if (inst.channels) {
    given = *inst.channels;
  } else {
    Rng rng = make_rng({c.master_seed});
    for (int u = 0; u < c.users; ++u) given.estimates.push_back(sample_channel(rng, c.n_t));
  }
  given.epsilon = c.epsilon;
  given.sigma2 = c.sigma2;
  const auto canon = canonicalize_order(given);
  const ChannelSet& ch = canon.channels;
  const QosTargets q = QosTargets::uniform_db(ch.users(), c.gamma_db_list.front());

  SolverConfig solver = c.solver;
  solver.seed = c.master_seed;
  const RobustSolution s = run(ch, q, solver);

  std::cout << "status: " << to_string(s.status) << '\n';
  if (s.status != SolverStatus::Optimal) {
    std::cout << "failed at iteration " << s.failed_iteration << '\n';
    return 2;
  }
  std::cout << "gamma_db: " << format_double(c.gamma_db_list.front()) << '\n'
            << "iterations: " << s.iterations << (s.converged ? " (converged)" : " (not converged)")
            << '\n'
            << "total_power_mw: " << format_double(s.total_power) << '\n'
            << "rank_one: " << (s.rank_one_all ? "yes" : "no")
            << (s.used_randomization ? ", randomized" : "") << '\n';
  const auto margins = qos_margins(s.beams, ch, s.errors, q);
  std::cout << "noma_index,input_user,channel_norm,power_mw,margin,beam\n";
  for (int u = 0; u < ch.users(); ++u) {
    std::cout << u << ',' << canon.original_index[u] << ','
              << format_double(ch.estimates[u].norm()) << ','
              << format_double(s.beams.beams[u].squaredNorm()) << ','
              << format_double(margins[u]) << ',';
    for (Eigen::Index k = 0; k < s.beams.beams[u].size(); ++k)
      std::cout << (k ? " " : "") << complex_text(s.beams.beams[u](k));
    std::cout << '\n';
  }
  return 0;
}

int run_campaign_cmd(const Overrides& o) {
  CampaignConfig c = o.config.empty() ? CampaignConfig{} : load_campaign_config(o.config);
  apply(o, c);
  const CampaignResult r = run_campaign(c);
  export_results(r, c.output_path);
  std::cout << "scheme,gamma_db,mean_power_mw,outage_probability,adjusted_power_mw,"
               "feasibility_ratio\n";
  for (const auto& e : r.entries)
    std::cout << to_string(e.scheme) << ',' << format_double(e.gamma_db) << ','
              << format_double(e.mean_power_mw) << ',' << format_double(e.outage_probability)
              << ',' << format_double(e.outage_adjusted_power_mw) << ','
              << format_double(e.feasibility_ratio) << '\n';
  std::cout << "results written to " << c.output_path << '\n';
  return 0;
}

int run_selftest(std::uint64_t seed) {
  const std::vector<testing::CheckResult> checks = {
      testing::check_qt_equivalence(200, seed),
      testing::check_inner_identity(100, 20, seed),
      testing::check_duality_gap(100, 30, seed),
      testing::check_brute_force(20, 100000, seed),
      testing::check_sdp_suite(),
      testing::check_single_user(20, seed),
  };
  int failed = 0;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    failed += c.passed ? 0 : 1;
  }
  std::cout << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust NOMA beamforming under bounded CSI error"};
  app.require_subcommand(1);
  Overrides solve_opt, campaign_opt;
  std::uint64_t selftest_seed = 2024;

  CLI::App* solve = app.add_subcommand("solve", "design beams for one channel instance");
  add_common(solve, solve_opt);

  CLI::App* campaign = app.add_subcommand("campaign", "Monte Carlo sweep with exported tables");
  add_common(campaign, campaign_opt);
  campaign->add_option("--channels", campaign_opt.channels, "channel realizations");
  campaign->add_option("--errors-per-channel", campaign_opt.errors_per_channel,
                       "error realizations per channel");
  campaign->add_option("--schemes", campaign_opt.schemes, "robust, nonrobust, perfect_csi")
      ->delimiter(',');
  campaign->add_option("--out", campaign_opt.out, "output directory");
  campaign->add_option("--threads", campaign_opt.threads, "worker threads (0: all cores)");

  CLI::App* selftest = app.add_subcommand("selftest", "run the oracle checks");
  selftest->add_option("--seed", selftest_seed, "check seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (solve->parsed()) return run_solve(solve_opt);
    if (campaign->parsed()) return run_campaign_cmd(campaign_opt);
    return run_selftest(selftest_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
