#include "tbsg/game_io.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tbsg {

using nlohmann::json;

namespace {

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

template <typename T>
T get(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + ": bad field '" + key + "': " + e.what());
  }
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from(const std::vector<double>& xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<Eigen::Index>(i)) = xs[i];
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw FormatError("write to '" + path + "' failed");
}

std::string game_to_json(const Game& game) {
  const RawGame raw = game.to_raw();
  json states = json::array();
  for (const RawState& s : raw.states) {
    json actions = json::array();
    for (const RawAction& a : s.actions) {
      json dist = json::array();
      for (const auto& [state, p] : a.dist) dist.push_back(json::array({state, p}));
      actions.push_back({{"cost", a.cost}, {"dist", dist}});
    }
    states.push_back({{"owner", s.owner}, {"actions", actions}});
  }
  return json{{"gamma", raw.gamma}, {"states", states}}.dump(1) + "\n";
}

Game game_from_json(const std::string& text) {
  constexpr const char* what = "game file";
  const json j = parse(text, what);
  RawGame raw;
  raw.gamma = get<double>(j, "gamma", what);
  const json states = get<json>(j, "states", what);
  if (!states.is_array()) throw FormatError("game file: 'states' must be an array");
  for (const json& s : states) {
    RawState rs;
    rs.owner = get<int>(s, "owner", what);
    const json actions = get<json>(s, "actions", what);
    if (!actions.is_array()) throw FormatError("game file: 'actions' must be an array");
    for (const json& a : actions) {
      RawAction ra;
      ra.cost = get<double>(a, "cost", what);
      ra.dist = get<std::vector<std::pair<std::int64_t, double>>>(a, "dist", what);
      rs.actions.push_back(std::move(ra));
    }
    raw.states.push_back(std::move(rs));
  }
  return validate_game(raw);
}

Game read_game_file(const std::string& path) { return game_from_json(read_text_file(path)); }

void write_game_file(const std::string& path, const Game& game) { write_text_file(path, game_to_json(game)); }

std::string partition_to_json(const PartitionFile& file) {
  json j{{"sigma", file.partition.sigma.choice()}, {"tau", file.partition.tau.choice()}};
  if (file.gn) {
    j["family"] = {{"name", "gn"},
                   {"n", file.gn->n},
                   {"gamma", file.gn->gamma},
                   {"a", file.gn->a},
                   {"a_mode", std::string(a_mode_name(file.gn->mode))}};
  }
  return j.dump(1) + "\n";
}

PartitionFile partition_from_json(const std::string& text) {
  constexpr const char* what = "partition file";
  const json j = parse(text, what);
  PartitionFile file;
  file.partition.sigma = StrategyProfile(get<std::vector<std::size_t>>(j, "sigma", what));
  file.partition.tau = StrategyProfile(get<std::vector<std::size_t>>(j, "tau", what));
  if (j.contains("family")) {
    const json& f = j.at("family");
    if (get<std::string>(f, "name", what) != "gn") throw FormatError("partition file: unknown family");
    GnSpec spec;
    spec.n = get<std::size_t>(f, "n", what);
    spec.gamma = get<double>(f, "gamma", what);
    spec.a = get<double>(f, "a", what);
    try {
      spec.mode = parse_a_mode(get<std::string>(f, "a_mode", what));
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("partition file: ") + e.what());
    }
    file.gn = spec;
  }
  return file;
}

PartitionFile read_partition_file(const std::string& path) {
  return partition_from_json(read_text_file(path));
}

void write_partition_file(const std::string& path, const PartitionFile& file) {
  write_text_file(path, partition_to_json(file));
}

std::string partition_sidecar_path(const std::string& game_path) {
  const std::string ext = ".json";
  if (game_path.size() > ext.size() && game_path.compare(game_path.size() - ext.size(), ext.size(), ext) == 0) {
    return game_path.substr(0, game_path.size() - ext.size()) + ".partition.json";
  }
  return game_path + ".partition.json";
}

std::string lcp_to_json(const Lcp& lcp) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < lcp.M.rows(); ++i) rows.push_back(vector_json(lcp.M.row(i).transpose()));
  return json{{"n", lcp.size()}, {"M", rows}, {"q", vector_json(lcp.q)}}.dump() + "\n";
}

Lcp lcp_from_json(const std::string& text) {
  constexpr const char* what = "LCP file";
  const json j = parse(text, what);
  const auto n = get<std::size_t>(j, "n", what);
  const auto rows = get<std::vector<std::vector<double>>>(j, "M", what);
  const auto q = get<std::vector<double>>(j, "q", what);
  if (rows.size() != n || q.size() != n) throw FormatError("LCP file: dimension mismatch");
  Lcp lcp;
  lcp.M.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw FormatError("LCP file: row " + std::to_string(i) + " has wrong length");
    lcp.M.row(static_cast<Eigen::Index>(i)) = vector_from(rows[i]).transpose();
  }
  lcp.q = vector_from(q);
  return lcp;
}

std::string report_to_json(const ConditioningReport& r) {
  json j{{"n", r.n},
         {"gamma", r.gamma},
         {"kappa_est", r.kappa_estimate},
         {"kappa_witness", vector_json(r.kappa_witness)},
         {"kappa_ub", r.kappa_global_upper},
         {"delta", r.delta},
         {"delta_eigenvector", vector_json(r.delta_eigenvector)},
         {"delta_lb", r.delta_global_lower},
         {"theta_est", r.theta_estimate},
         {"theta_witness", vector_json(r.theta_witness)},
         {"theta_lb", r.theta_global_lower},
         {"cond", r.condition_number()},
         {"pmatrix", std::string(verdict_name(r.pmatrix))},
         {"pmatrix_detail", r.pmatrix_detail},
         {"unified_ipm_runtime", r.unified_ipm_runtime()},
         {"potential_reduction_runtime", r.potential_reduction_runtime()},
         {"samples", r.samples},
         {"seed", r.seed}};
  return j.dump(1) + "\n";
}

std::string report_csv_header() {
  return "n,gamma,kappa_est,kappa_ub,delta,delta_lb,theta_est,theta_lb,cond,pmatrix,seed";
}

std::string report_csv_row(const ConditioningReport& r) {
  std::ostringstream os;
  os << r.n << ',' << format_double(r.gamma) << ',' << format_double(r.kappa_estimate) << ','
     << format_double(r.kappa_global_upper) << ',' << format_double(r.delta) << ','
     << format_double(r.delta_global_lower) << ',' << format_double(r.theta_estimate) << ','
     << format_double(r.theta_global_lower) << ',' << format_double(r.condition_number()) << ','
     << verdict_name(r.pmatrix) << ',' << r.seed;
  return os.str();
}

}  // namespace tbsg
