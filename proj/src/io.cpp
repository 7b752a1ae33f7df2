#include "bci/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace bci {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& ctx) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::runtime_error("bad number '" + s + "' in " + ctx);
  return v;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw std::runtime_error(path + " is empty");
  return rows;
}

}  // namespace

PlantsFile read_plants_csv(const std::string& path) {
  const auto rows = read_csv(path);
  const auto& header = rows[0];
  if (header.size() < 4 || header[0] != "id")
    throw std::runtime_error(path + ": expected header id,lat,lon,A,W1..");
  PlantsFile out;
  out.has_cluster = header.back() == "cluster";
  const std::size_t ncov = header.size() - 4 - (out.has_cluster ? 1 : 0);

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() != header.size())
      throw std::runtime_error(path + ": row " + std::to_string(r) +
                               " has wrong field count");
    InterventionalUnit u;
    u.id = f[0];
    if (!f[1].empty() && !f[2].empty())
      u.location = GeoPoint{parse_double(f[1], path), parse_double(f[2], path)};
    if (!f[3].empty())
      u.treatment = static_cast<int>(parse_double(f[3], path));
    for (std::size_t c = 0; c < ncov; ++c)
      u.covariates.push_back(parse_double(f[4 + c], path));
    out.units.push_back(std::move(u));
    out.cluster.push_back(
        out.has_cluster ? static_cast<int>(parse_double(f.back(), path)) - 1
                        : -1);
  }
  return out;
}

void write_plants_csv(const std::string& path,
                      const std::vector<InterventionalUnit>& units,
                      const std::vector<int>* cluster) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::size_t ncov = units.empty() ? 0 : units[0].covariates.size();
  out << "id,lat,lon,A";
  for (std::size_t c = 0; c < ncov; ++c) out << ",W" << c + 1;
  if (cluster) out << ",cluster";
  out << "\n";
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto& u = units[i];
    out << u.id << ",";
    if (u.location)
      out << format_double(u.location->lat) << ","
          << format_double(u.location->lon);
    else
      out << ",";
    out << ",";
    if (u.treatment) out << *u.treatment;
    for (double w : u.covariates) out << "," << format_double(w);
    if (cluster) out << "," << (*cluster)[i] + 1;
    out << "\n";
  }
}

std::vector<OutcomeUnit> read_outcomes_csv(const std::string& path) {
  const auto rows = read_csv(path);
  const auto& header = rows[0];
  if (header.size() < 4 || header[0] != "id")
    throw std::runtime_error(path + ": expected header id,lat,lon,Y,X1..");
  const std::size_t ncov = header.size() - 4;
  std::vector<OutcomeUnit> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() != header.size())
      throw std::runtime_error(path + ": row " + std::to_string(r) +
                               " has wrong field count");
    OutcomeUnit u;
    u.id = f[0];
    if (!f[1].empty() && !f[2].empty())
      u.location = GeoPoint{parse_double(f[1], path), parse_double(f[2], path)};
    if (!f[3].empty()) u.outcome = parse_double(f[3], path);
    for (std::size_t c = 0; c < ncov; ++c)
      u.covariates.push_back(parse_double(f[4 + c], path));
    out.push_back(std::move(u));
  }
  return out;
}

void write_outcomes_csv(const std::string& path,
                        const std::vector<OutcomeUnit>& units) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::size_t ncov = units.empty() ? 0 : units[0].covariates.size();
  out << "id,lat,lon,Y";
  for (std::size_t c = 0; c < ncov; ++c) out << ",X" << c + 1;
  out << "\n";
  for (const auto& u : units) {
    out << u.id << ",";
    if (u.location)
      out << format_double(u.location->lat) << ","
          << format_double(u.location->lon);
    else
      out << ",";
    out << ",";
    if (u.outcome) out << format_double(*u.outcome);
    for (double x : u.covariates) out << "," << format_double(x);
    out << "\n";
  }
}

std::vector<std::pair<int, int>> read_edges_csv(const std::string& path,
                                                const BipartiteDataset& ds) {
  const auto rows = read_csv(path);
  if (rows[0].size() != 2)
    throw std::runtime_error(path +
                             ": expected header outcome_id,interventional_id");
  std::vector<std::pair<int, int>> edges;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const int j = ds.outcome_index(rows[r][0]);
    const int i = ds.interventional_index(rows[r][1]);
    if (j < 0)
      throw std::runtime_error(path + ": unknown outcome id " + rows[r][0]);
    if (i < 0)
      throw std::runtime_error(path + ": unknown interventional id " +
                               rows[r][1]);
    edges.emplace_back(j, i);
  }
  return edges;
}

void write_edges_csv(const std::string& path, const InterferenceMapping& map,
                     const BipartiteDataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "outcome_id,interventional_id\n";
  for (int j = 0; j < map.num_outcome; ++j)
    for (int i : map.rows[j])
      out << ds.outcome[j].id << "," << ds.interventional[i].id << "\n";
}

void write_assignment_csv(const std::string& path, const BipartiteDataset& ds,
                          const std::vector<int>& outcome_cluster) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "outcome_id,cluster\n";
  for (std::size_t j = 0; j < outcome_cluster.size(); ++j)
    if (outcome_cluster[j] >= 0)
      out << ds.outcome[j].id << "," << outcome_cluster[j] + 1 << "\n";
}

void write_exclusions_csv(const std::string& path,
                          const std::vector<std::string>& excluded_ids) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "outcome_id\n";
  for (const auto& id : excluded_ids) out << id << "\n";
}

namespace {
json edges_json(const InterferenceMapping& map) {
  json edges = json::array();
  for (int j = 0; j < map.num_outcome; ++j)
    for (int i : map.rows[j]) edges.push_back({j, i});
  return edges;
}

const char* family_name(WorldFamily f) {
  switch (f) {
    case WorldFamily::Table: return "table";
    case WorldFamily::Linear: return "linear";
    case WorldFamily::Interactive: return "interactive";
    case WorldFamily::Threshold: return "threshold";
  }
  return "linear";
}
}  // namespace

std::string world_to_json(const PotentialOutcomeWorld& world) {
  json w;
  w["num_outcome"] = world.mapping().num_outcome;
  w["num_interventional"] = world.mapping().num_interventional;
  w["edges"] = edges_json(world.mapping());
  w["family"] = family_name(world.family());
  switch (world.family()) {
    case WorldFamily::Table:
      w["tables"] = world.tables();
      break;
    case WorldFamily::Linear:
      w["intercepts"] = world.intercepts();
      w["coefs"] = world.coefs();
      break;
    case WorldFamily::Interactive:
      w["intercepts"] = world.intercepts();
      w["coefs"] = world.coefs();
      w["gamma"] = world.gamma();
      break;
    case WorldFamily::Threshold:
      w["scale"] = world.scale();
      w["q"] = world.q();
      break;
  }
  return w.dump(2);
}

PotentialOutcomeWorld world_from_json(const std::string& text) {
  const json w = json::parse(text);
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : w.at("edges"))
    edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  auto mapping = build_mapping(w.at("num_outcome").get<int>(),
                               w.at("num_interventional").get<int>(), edges);
  const std::string family = w.at("family").get<std::string>();
  if (family == "table")
    return PotentialOutcomeWorld::table(
        std::move(mapping), w.at("tables").get<std::vector<std::vector<double>>>());
  if (family == "linear")
    return PotentialOutcomeWorld::linear(
        std::move(mapping), w.at("intercepts").get<std::vector<double>>(),
        w.at("coefs").get<std::vector<std::vector<double>>>());
  if (family == "interactive")
    return PotentialOutcomeWorld::interactive(
        std::move(mapping), w.at("intercepts").get<std::vector<double>>(),
        w.at("coefs").get<std::vector<std::vector<double>>>(),
        w.at("gamma").get<std::vector<double>>());
  if (family == "threshold")
    return PotentialOutcomeWorld::threshold(
        std::move(mapping), w.at("scale").get<std::vector<double>>(),
        w.at("q").get<std::vector<int>>());
  throw std::runtime_error("world_from_json: unknown family " + family);
}

std::string model_to_json(const LogisticModel& model) {
  json m;
  m["beta"] = std::vector<double>(model.beta.begin(), model.beta.end());
  m["sigma"] = model.sigma;
  m["w_columns"] = model.w_columns;
  m["covariate_names"] = model.covariate_names;
  m["center"] = std::vector<double>(model.center.begin(), model.center.end());
  m["scale"] = std::vector<double>(model.scale.begin(), model.scale.end());
  return m.dump(2);
}

LogisticModel model_from_json(const std::string& text) {
  const json m = json::parse(text);
  LogisticModel model;
  const auto beta = m.at("beta").get<std::vector<double>>();
  model.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), beta.size());
  model.sigma = m.at("sigma").get<double>();
  model.w_columns = m.at("w_columns").get<std::vector<int>>();
  model.covariate_names = m.at("covariate_names").get<std::vector<std::string>>();
  const auto center = m.at("center").get<std::vector<double>>();
  const auto scale = m.at("scale").get<std::vector<double>>();
  model.center = Eigen::Map<const Eigen::VectorXd>(center.data(), center.size());
  model.scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), scale.size());
  return model;
}

DGPConfig dgp_config_from_json(const std::string& text) {
  const json c = json::parse(text);
  DGPConfig cfg;
  cfg.num_clusters = c.value("num_clusters", cfg.num_clusters);
  cfg.min_plants = c.value("min_plants", cfg.min_plants);
  cfg.max_plants = c.value("max_plants", cfg.max_plants);
  cfg.min_outcomes = c.value("min_outcomes", cfg.min_outcomes);
  cfg.max_outcomes = c.value("max_outcomes", cfg.max_outcomes);
  cfg.cov_dim = c.value("cov_dim", cfg.cov_dim);
  cfg.beta = c.value("beta", cfg.beta);
  cfg.sigma = c.value("sigma", cfg.sigma);
  cfg.world_family = c.value("world_family", cfg.world_family);
  cfg.intercept_min = c.value("intercept_min", cfg.intercept_min);
  cfg.intercept_max = c.value("intercept_max", cfg.intercept_max);
  cfg.coef_min = c.value("coef_min", cfg.coef_min);
  cfg.coef_max = c.value("coef_max", cfg.coef_max);
  cfg.interaction = c.value("interaction", cfg.interaction);
  cfg.threshold_q = c.value("threshold_q", cfg.threshold_q);
  cfg.threshold_scale = c.value("threshold_scale", cfg.threshold_scale);
  cfg.noise_sd = c.value("noise_sd", cfg.noise_sd);
  cfg.seed = c.value("seed", cfg.seed);
  return cfg;
}

namespace {
json estimate_json(const EstimateWithCI& e) {
  json out;
  out["point"] = e.point;
  out["std_error"] = e.std_error;
  if (e.has_ci) {
    out["ci_low"] = e.ci_low;
    out["ci_high"] = e.ci_high;
  }
  return out;
}
}  // namespace

std::string report_to_json(const IptwReport& rep) {
  json r;
  r["ybar"] = json::array();
  for (const auto& cell : rep.ybar) {
    json c;
    c["a"] = cell.a;
    c["alpha"] = cell.alpha;
    c["estimate"] = estimate_json(cell.estimate);
    r["ybar"].push_back(std::move(c));
  }
  r["effects"] = json::array();
  for (const auto& row : rep.effects) {
    json c;
    c["estimand"] = row.estimand;
    c["alpha"] = row.alpha;
    if (row.estimand == "IE") {
      c["a"] = row.a;
      c["alpha2"] = row.alpha2;
    }
    c["estimate"] = estimate_json(row.estimate);
    r["effects"].push_back(std::move(c));
  }
  r["positivity_flags"] = json::array();
  for (const auto& f : rep.positivity.flags)
    r["positivity_flags"].push_back(
        {{"cluster", f.cluster}, {"alpha", f.alpha}, {"weight", f.weight}});
  return r.dump(2);
}

void write_report_csv(const std::string& path, const IptwReport& rep) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "estimand,a,alpha,alpha2,point,std_error,ci_low,ci_high\n";
  auto line = [&](const std::string& est, const std::string& a,
                  const std::string& alpha, const std::string& alpha2,
                  const EstimateWithCI& e) {
    out << est << "," << a << "," << alpha << "," << alpha2 << ","
        << format_double(e.point) << "," << format_double(e.std_error) << ",";
    if (e.has_ci)
      out << format_double(e.ci_low) << "," << format_double(e.ci_high);
    else
      out << ",";
    out << "\n";
  };
  for (const auto& cell : rep.ybar)
    line("ybar", std::to_string(cell.a), format_double(cell.alpha), "",
         cell.estimate);
  for (const auto& row : rep.effects)
    line(row.estimand, row.estimand == "IE" ? std::to_string(row.a) : "",
         format_double(row.alpha),
         row.estimand == "IE" ? format_double(row.alpha2) : "", row.estimate);
}

std::string simulation_report_to_json(const SimulationReport& rep) {
  json r;
  r["replicates"] = rep.replicates;
  r["mode"] = rep.mode == PropensityMode::Known ? "known" : "fitted";
  r["cells"] = json::array();
  for (const auto& c : rep.cells) {
    json cell;
    cell["tag"] = c.tag;
    cell["truth"] = c.truth;
    cell["mc_mean"] = c.mc_mean;
    cell["mc_sd"] = c.mc_sd;
    cell["mc_se"] = c.mc_se;
    cell["bias"] = c.bias;
    cell["relative_bias"] = c.relative_bias;
    cell["coverage"] = c.coverage;
    r["cells"].push_back(std::move(cell));
  }
  return r.dump(2);
}

void write_simulation_report_csv(const std::string& path,
                                 const SimulationReport& rep) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "tag,truth,mc_mean,mc_sd,mc_se,bias,relative_bias,coverage,replicates\n";
  for (const auto& c : rep.cells)
    out << c.tag << "," << format_double(c.truth) << ","
        << format_double(c.mc_mean) << "," << format_double(c.mc_sd) << ","
        << format_double(c.mc_se) << "," << format_double(c.bias) << ","
        << format_double(c.relative_bias) << "," << format_double(c.coverage)
        << "," << c.replicates << "\n";
}

}  // namespace bci
