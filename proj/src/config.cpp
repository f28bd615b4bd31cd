#include "nomabf/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nomabf {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::invalid_argument(std::string(what) + ": unknown key '" + it.key() + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

SolverConfig solver_from_json(const json& j) {
  reject_unknown(j, {"i_max", "delta_tol", "sdp_tol", "rank_one_threshold",
                     "randomization_trials", "seed", "initial_beams"},
                 "solver");
  SolverConfig s;
  read(j, "i_max", s.i_max);
  read(j, "delta_tol", s.delta_tol);
  read(j, "sdp_tol", s.sdp_tol);
  read(j, "rank_one_threshold", s.rank_one_threshold);
  read(j, "randomization_trials", s.randomization_trials);
  read(j, "seed", s.seed);
  if (j.contains("initial_beams"))
    s.initial_beams = parse_initial_beams(j.at("initial_beams").get<std::string>());
  return s;
}

json solver_to_json(const SolverConfig& s) {
  return {{"i_max", s.i_max},
          {"delta_tol", s.delta_tol},
          {"sdp_tol", s.sdp_tol},
          {"rank_one_threshold", s.rank_one_threshold},
          {"randomization_trials", s.randomization_trials},
          {"seed", s.seed},
          {"initial_beams", std::string(to_string(s.initial_beams))}};
}

const std::set<std::string> kCampaignKeys = {
    "n_t",     "users",  "gamma_db_list", "epsilon",     "sigma2",  "n_channels",
    "n_errors_per_channel", "solver", "master_seed", "output_path", "schemes", "threads"};

CampaignConfig campaign_from_json(const json& j) {
  CampaignConfig c;
  read(j, "n_t", c.n_t);
  read(j, "users", c.users);
  read(j, "gamma_db_list", c.gamma_db_list);
  read(j, "epsilon", c.epsilon);
  read(j, "sigma2", c.sigma2);
  read(j, "n_channels", c.n_channels);
  read(j, "n_errors_per_channel", c.n_errors_per_channel);
  if (j.contains("solver")) c.solver = solver_from_json(j.at("solver"));
  read(j, "master_seed", c.master_seed);
  read(j, "output_path", c.output_path);
  read(j, "threads", c.threads);
  if (j.contains("schemes")) {
    c.schemes.clear();
    for (const auto& s : j.at("schemes")) c.schemes.push_back(parse_scheme(s.get<std::string>()));
  }
  return c;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
}

}  // namespace

CampaignConfig campaign_config_from_json(const std::string& text) {
  const json j = parse(text);
  reject_unknown(j, kCampaignKeys, "config");
  CampaignConfig c = campaign_from_json(j);
  c.validate();
  return c;
}

std::string campaign_config_to_json(const CampaignConfig& c) {
  json schemes = json::array();
  for (Scheme s : c.schemes) schemes.push_back(std::string(to_string(s)));
  const json j = {{"n_t", c.n_t},
                  {"users", c.users},
                  {"gamma_db_list", c.gamma_db_list},
                  {"epsilon", c.epsilon},
                  {"sigma2", c.sigma2},
                  {"n_channels", c.n_channels},
                  {"n_errors_per_channel", c.n_errors_per_channel},
                  {"solver", solver_to_json(c.solver)},
                  {"master_seed", c.master_seed},
                  {"output_path", c.output_path},
                  {"schemes", schemes},
                  {"threads", c.threads}};
  return j.dump(2);
}

CampaignConfig load_campaign_config(const std::filesystem::path& path) {
  return campaign_config_from_json(slurp(path));
}

InstanceConfig instance_config_from_json(const std::string& text) {
  json j = parse(text);
  InstanceConfig out;
  std::optional<json> channels;
  if (j.contains("channels")) {
    channels = j.at("channels");
    j.erase("channels");
  }
  reject_unknown(j, kCampaignKeys, "config");
  out.campaign = campaign_from_json(j);
  if (channels) {
    ChannelSet ch;
    ch.epsilon = out.campaign.epsilon;
    ch.sigma2 = out.campaign.sigma2;
    for (const auto& user : *channels) {
      CVec h(static_cast<Eigen::Index>(user.size()));
      for (std::size_t k = 0; k < user.size(); ++k) {
        const auto& z = user[k];
        if (!z.is_array() || z.size() != 2)
          throw std::invalid_argument("channels: entries must be [re, im] pairs");
        h(static_cast<Eigen::Index>(k)) = Complex(z[0].get<double>(), z[1].get<double>());
      }
      ch.estimates.push_back(std::move(h));
    }
    detail::require(ch.users() >= 1, "channels: empty");
    for (const auto& h : ch.estimates)
      detail::require(h.size() == ch.antennas() && h.size() >= 1,
                      "channels: inconsistent antenna count");
    out.campaign.users = ch.users();
    out.campaign.n_t = ch.antennas();
    out.channels = std::move(ch);
  }
  out.campaign.validate();
  return out;
}

InstanceConfig load_instance_config(const std::filesystem::path& path) {
  return instance_config_from_json(slurp(path));
}

}  // namespace nomabf
