#include "nomabf/export.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nomabf/config.hpp"

namespace nomabf {

using nlohmann::json;

namespace {

// JSON has no infinities or NaN; those travel as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double from_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  return std::strtod(s.c_str(), nullptr);
}

bool same(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

bool SummaryRecord::operator==(const SummaryRecord& o) const {
  return scheme == o.scheme && same(gamma_db, o.gamma_db) &&
         same(mean_power_mw, o.mean_power_mw) &&
         same(outage_probability, o.outage_probability) &&
         same(outage_adjusted_power_mw, o.outage_adjusted_power_mw) &&
         same(feasibility_ratio, o.feasibility_ratio) &&
         infeasible_count == o.infeasible_count && designs == o.designs &&
         converged_runs == o.converged_runs && outage_events == o.outage_events &&
         evaluations == o.evaluations && iteration_histogram == o.iteration_histogram;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<SummaryRecord> summary_records(const CampaignResult& result) {
  std::vector<SummaryRecord> out;
  for (const auto& e : result.entries) {
    SummaryRecord r;
    r.scheme = std::string(to_string(e.scheme));
    r.gamma_db = e.gamma_db;
    r.mean_power_mw = e.mean_power_mw;
    r.outage_probability = e.outage_probability;
    r.outage_adjusted_power_mw = e.outage_adjusted_power_mw;
    r.feasibility_ratio = e.feasibility_ratio;
    r.infeasible_count = e.infeasible_count;
    r.designs = e.designs;
    r.converged_runs = e.converged_runs;
    r.outage_events = e.outage_events;
    r.evaluations = e.evaluations;
    r.iteration_histogram = e.iteration_histogram;
    out.push_back(std::move(r));
  }
  return out;
}

void export_results(const CampaignResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());

  {
    json records = json::array();
    for (const auto& r : summary_records(result)) {
      records.push_back({{"scheme", r.scheme},
                         {"gamma_db", number(r.gamma_db)},
                         {"mean_power_mw", number(r.mean_power_mw)},
                         {"outage_probability", number(r.outage_probability)},
                         {"outage_adjusted_power_mw", number(r.outage_adjusted_power_mw)},
                         {"feasibility_ratio", number(r.feasibility_ratio)},
                         {"infeasible_count", r.infeasible_count},
                         {"designs", r.designs},
                         {"converged_runs", r.converged_runs},
                         {"outage_events", r.outage_events},
                         {"evaluations", r.evaluations},
                         {"iteration_histogram", r.iteration_histogram}});
    }
    const json doc = {{"config", json::parse(campaign_config_to_json(result.config))},
                      {"records", records}};
    const auto path = dir / kSummaryFile;
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
    close_out(out, path);
  }
  {
    const auto path = dir / kSinrSamplesFile;
    auto out = open_out(path);
    out << "scheme,gamma_db,user,sinr_db\n";
    for (const auto& e : result.entries) {
      const std::string scheme(to_string(e.scheme));
      const std::string gamma = format_double(e.gamma_db);
      for (std::size_t u = 0; u < e.sinr_samples_db.size(); ++u)
        for (double s : e.sinr_samples_db[u])
          out << scheme << ',' << gamma << ',' << (u + 1) << ',' << format_double(s) << '\n';
    }
    close_out(out, path);
  }
  {
    const auto path = dir / kIterationHistogramFile;
    auto out = open_out(path);
    out << "iterations,count\n";
    const auto hist = result.pooled_histogram();
    for (std::size_t k = 0; k < hist.size(); ++k) out << (k + 1) << ',' << hist[k] << '\n';
    close_out(out, path);
  }
  {
    const auto path = dir / kPowerVsGammaFile;
    auto out = open_out(path);
    out << "scheme,gamma_db,mean_power_mw,adjusted_power_mw\n";
    for (const auto& e : result.entries)
      out << to_string(e.scheme) << ',' << format_double(e.gamma_db) << ','
          << format_double(e.mean_power_mw) << ','
          << format_double(e.outage_adjusted_power_mw) << '\n';
    close_out(out, path);
  }
}

std::vector<SummaryRecord> read_summary(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open summary: " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed summary " + file.string() + ": " + e.what());
  }
  std::vector<SummaryRecord> out;
  for (const auto& j : doc.at("records")) {
    SummaryRecord r;
    r.scheme = j.at("scheme").get<std::string>();
    r.gamma_db = from_number(j.at("gamma_db"));
    r.mean_power_mw = from_number(j.at("mean_power_mw"));
    r.outage_probability = from_number(j.at("outage_probability"));
    r.outage_adjusted_power_mw = from_number(j.at("outage_adjusted_power_mw"));
    r.feasibility_ratio = from_number(j.at("feasibility_ratio"));
    r.infeasible_count = j.at("infeasible_count").get<long>();
    r.designs = j.at("designs").get<long>();
    r.converged_runs = j.at("converged_runs").get<long>();
    r.outage_events = j.at("outage_events").get<long>();
    r.evaluations = j.at("evaluations").get<long>();
    r.iteration_histogram = j.at("iteration_histogram").get<std::vector<long>>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace nomabf
