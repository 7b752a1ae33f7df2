// Command-line front end: dataset validation, geospatial cluster assignment,
// propensity fitting, IPTW estimation, exact estimand evaluation, and Monte
// Carlo simulation. Exit codes: 0 success, 1 validation/runtime failure,
// 2 usage error.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bci/geospatial.hpp"
#include "bci/io.hpp"
#include "bci/oracle.hpp"
#include "bci/simulation.hpp"

using namespace bci;
using nlohmann::json;

namespace {

BipartiteDataset load_dataset(const std::string& plants_path,
                              const std::string& outcomes_path,
                              std::vector<int>* cluster = nullptr,
                              bool* has_cluster = nullptr) {
  auto plants = read_plants_csv(plants_path);
  BipartiteDataset ds;
  ds.interventional = std::move(plants.units);
  ds.outcome = read_outcomes_csv(outcomes_path);
  ds.rebuild_index();
  if (cluster) *cluster = std::move(plants.cluster);
  if (has_cluster) *has_cluster = plants.has_cluster;
  return ds;
}

int report_violations(const std::vector<Violation>& violations) {
  for (const auto& v : violations)
    std::fprintf(stderr, "violation: %s%s%s\n", v.unit_id.c_str(),
                 v.unit_id.empty() ? "" : ": ", v.message.c_str());
  return violations.empty() ? 0 : 1;
}

const char* kind_name(StructureKind k) {
  switch (k) {
    case StructureKind::ClusteredNoInterference:
      return "ClusteredNoInterference";
    case StructureKind::PartialInterference:
      return "PartialInterference";
    case StructureKind::General:
      return "General";
  }
  return "General";
}

// Partition from a 0-based plant cluster column plus an outcome assignment;
// outcome units without an assignment are dropped from estimation upstream.
ClusterPartition make_partition(const std::vector<int>& plant_cluster,
                                const std::vector<int>& outcome_cluster) {
  ClusterPartition part;
  part.interventional_cluster = plant_cluster;
  part.outcome_cluster = outcome_cluster;
  int mx = -1;
  for (int k : plant_cluster) mx = std::max(mx, k);
  for (int k : outcome_cluster) mx = std::max(mx, k);
  part.num_clusters = mx + 1;
  return part;
}

json config_echo(const std::vector<double>& alpha, int a_level,
                 const std::optional<double>& truncation,
                 const std::string& mode, std::uint64_t seed, int threads) {
  json cfg;
  cfg["alpha_grid"] = alpha;
  cfg["a_level"] = a_level;
  if (truncation) cfg["truncation"] = *truncation;
  cfg["propensity_mode"] = mode;
  cfg["seed"] = seed;
  cfg["threads"] = threads;
  return cfg;
}

int cmd_validate(const std::string& plants, const std::string& outcomes,
                 const std::string& edges_path) {
  std::vector<int> cluster;
  bool has_cluster = false;
  auto ds = load_dataset(plants, outcomes, &cluster, &has_cluster);
  auto violations = validate_dataset(ds);
  if (has_cluster) {
    auto part = make_partition(
        cluster, std::vector<int>(ds.num_outcome(), 0));
    for (int k : cluster)
      if (k < 0) violations.push_back({"", "plant without a cluster"});
    (void)part;
  }
  if (!edges_path.empty()) {
    auto edges = read_edges_csv(edges_path, ds);
    auto mapping =
        build_mapping(ds.num_outcome(), ds.num_interventional(), edges);
    auto cls = classify_structure(mapping);
    std::printf("structure: %s\n", kind_name(cls.kind));
    if (cls.partition)
      std::printf("clusters: %d\n", cls.partition->num_clusters);
  }
  std::printf("interventional units: %d\noutcome units: %d\n",
              ds.num_interventional(), ds.num_outcome());
  return report_violations(violations);
}

int cmd_assign(const std::string& plants, const std::string& outcomes,
               double buffer_km, const std::string& assignment_out,
               const std::string& exclusions_out) {
  std::vector<int> cluster;
  bool has_cluster = false;
  auto ds = load_dataset(plants, outcomes, &cluster, &has_cluster);
  if (!has_cluster)
    throw std::runtime_error("assign-clusters: plants file needs a cluster column");
  int num_clusters = 0;
  for (int k : cluster) num_clusters = std::max(num_clusters, k + 1);
  auto res = assign_outcome_units(ds, cluster, num_clusters, buffer_km);
  write_assignment_csv(assignment_out, ds, res.outcome_cluster);
  if (!exclusions_out.empty())
    write_exclusions_csv(exclusions_out, res.excluded_ids);
  std::printf("assigned: %zu\nexcluded: %zu\n",
              ds.outcome.size() - res.excluded_ids.size(),
              res.excluded_ids.size());
  return 0;
}

int cmd_fit(const std::string& plants, const std::string& outcomes,
            bool random_intercept, int nodes,
            const std::vector<int>& w_columns, const std::string& model_out) {
  std::vector<int> cluster;
  bool has_cluster = false;
  auto ds = load_dataset(plants, outcomes, &cluster, &has_cluster);
  if (!has_cluster && random_intercept)
    throw std::runtime_error(
        "fit-propensity: random intercept needs a cluster column");
  if (!has_cluster) cluster.assign(ds.num_interventional(), 0);
  auto part =
      make_partition(cluster, std::vector<int>(ds.num_outcome(), 0));
  PropensityOptions opt;
  opt.random_intercept = random_intercept;
  opt.quadrature_nodes = nodes;
  opt.w_columns = w_columns;
  auto fit = fit_logistic(ds, part, opt);
  std::printf("converged: %s\niterations: %d\nlog_likelihood: %s\nsigma: %s\n",
              fit.converged ? "yes" : "no", fit.iterations,
              format_double(fit.log_likelihood).c_str(),
              format_double(fit.model.sigma).c_str());
  auto raw = fit.model.raw_coefficients();
  std::printf("intercept: %s\n", format_double(raw[0]).c_str());
  for (int c = 1; c < raw.size(); ++c)
    std::printf("%s: %s\n", fit.model.covariate_names[c - 1].c_str(),
                format_double(raw[c]).c_str());
  if (!model_out.empty()) write_file(model_out, model_to_json(fit.model));
  return fit.converged ? 0 : 1;
}

int cmd_estimate(const std::string& plants, const std::string& outcomes,
                 const std::string& edges_path, const std::string& model_path,
                 const std::vector<double>& alpha, int a_level,
                 std::optional<double> truncation, int nodes, int threads,
                 const std::string& json_out, const std::string& csv_out) {
  std::vector<int> cluster;
  bool has_cluster = false;
  auto ds = load_dataset(plants, outcomes, &cluster, &has_cluster);
  if (!has_cluster)
    throw std::runtime_error("estimate: plants file needs a cluster column");
  auto edges = read_edges_csv(edges_path, ds);
  auto mapping = build_mapping(ds.num_outcome(), ds.num_interventional(), edges);

  // Outcome units inherit the cluster of their interference set.
  std::vector<int> outcome_cluster(ds.num_outcome());
  for (int j = 0; j < ds.num_outcome(); ++j)
    outcome_cluster[j] = cluster[mapping.rows[j].front()];
  auto part = make_partition(cluster, outcome_cluster);

  auto keys = assign_key_associated(mapping, ds);
  auto model = model_from_json(read_file(model_path));
  auto data = make_iptw_data(ds, part, keys, model, nodes);

  EstimatorConfig cfg;
  cfg.alpha_grid = alpha;
  cfg.a_level = a_level;
  cfg.truncation = truncation;
  auto rep = estimate_all(data, mapping, part, cfg);

  json out = json::parse(report_to_json(rep));
  out["config"] = config_echo(alpha, a_level, truncation, "fitted", 0, threads);
  const std::string text = out.dump(2) + "\n";
  if (json_out.empty())
    std::fputs(text.c_str(), stdout);
  else
    write_file(json_out, text);
  if (!csv_out.empty()) write_report_csv(csv_out, rep);
  return 0;
}

int cmd_oracle(const std::string& world_path, const std::vector<double>& alpha,
               int a_level, const std::string& csv_out) {
  auto world = world_from_json(read_file(world_path));
  const auto& mapping = world.mapping();
  // Keys default to the lowest-index member of each interference set.
  std::vector<int> keys(mapping.num_outcome);
  for (int j = 0; j < mapping.num_outcome; ++j)
    keys[j] = mapping.rows[j].front();

  std::string csv = "estimand,a,alpha,alpha2,value\n";
  for (double a1 : alpha) {
    auto de = key_population_effects(world, keys, a_level, {a1}, {a1}, {});
    csv += "DE,," + format_double(a1) + ",," + format_double(de.de.value) + "\n";
  }
  for (double a1 : alpha)
    for (double a2 : alpha) {
      if (a1 == a2) continue;
      auto eff = key_population_effects(world, keys, a_level, {a1}, {a2}, {});
      csv += "IE," + std::to_string(a_level) + "," + format_double(a1) + "," +
             format_double(a2) + "," + format_double(eff.ie.value) + "\n";
    }
  if (csv_out.empty())
    std::fputs(csv.c_str(), stdout);
  else
    write_file(csv_out, csv);
  return 0;
}

int cmd_simulate(const std::string& config_path,
                 const std::vector<double>& alpha, int replicates,
                 const std::string& mode_name, std::uint64_t seed, int threads,
                 const std::string& json_out, const std::string& csv_out) {
  auto cfg = dgp_config_from_json(read_file(config_path));
  cfg.seed = seed;  // the CLI seed governs all randomness
  auto bundle = generate_world(cfg);
  EstimatorConfig est;
  est.alpha_grid = alpha;
  const auto mode = mode_name == "fitted" ? PropensityMode::Fitted
                                          : PropensityMode::Known;
  auto rep =
      run_monte_carlo(bundle, est, replicates, mode, cfg.noise_sd, seed);

  json out = json::parse(simulation_report_to_json(rep));
  out["config"] =
      config_echo(alpha, est.a_level, est.truncation, mode_name, seed, threads);
  const std::string text = out.dump(2) + "\n";
  if (json_out.empty())
    std::fputs(text.c_str(), stdout);
  else
    write_file(json_out, text);
  if (!csv_out.empty()) write_simulation_report_csv(csv_out, rep);
  return 0;
}

int cmd_report(const std::string& in_path) {
  auto doc = json::parse(read_file(in_path));
  if (doc.contains("cells")) {
    std::printf("%-34s %12s %12s %12s %10s\n", "cell", "truth", "mc_mean",
                "bias", "coverage");
    for (const auto& c : doc["cells"])
      std::printf("%-34s %12.6f %12.6f %12.6f %10.3f\n",
                  c["tag"].get<std::string>().c_str(),
                  c["truth"].get<double>(), c["mc_mean"].get<double>(),
                  c["bias"].get<double>(), c["coverage"].get<double>());
    return 0;
  }
  std::printf("%-8s %6s %8s %8s %12s %12s\n", "estimand", "a", "alpha",
              "alpha2", "point", "std_error");
  for (const auto& row : doc["effects"])
    std::printf("%-8s %6d %8.3f %8.3f %12.6f %12.6f\n",
                row["estimand"].get<std::string>().c_str(),
                row.value("a", 0), row["alpha"].get<double>(),
                row.value("alpha2", 0.0), row["point"].get<double>(),
                row["std_error"].get<double>());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bipartite causal inference with interference"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads,
                 "Worker thread bound (0 = available parallelism)");

  std::string plants, outcomes, edges, model_path, world_path, config_path;
  std::string assignment_out, exclusions_out, model_out, json_out, csv_out;
  std::string in_path, mode_name = "known";
  std::vector<double> alpha;
  std::vector<int> w_columns;
  double buffer_km = 30.0;
  int a_level = 0, nodes = 21, replicates = 0;
  bool random_intercept = false;
  std::optional<double> truncation;
  std::uint64_t seed = 0;

  auto* validate = app.add_subcommand("validate", "Check dataset invariants");
  validate->add_option("--plants", plants)->required();
  validate->add_option("--outcomes", outcomes)->required();
  validate->add_option("--edges", edges);

  auto* assign = app.add_subcommand(
      "assign-clusters", "Assign outcome units to buffered plant-cluster hulls");
  assign->add_option("--plants", plants)->required();
  assign->add_option("--outcomes", outcomes)->required();
  assign->add_option("--buffer-km", buffer_km, "Hull buffer in km");
  assign->add_option("--assignment", assignment_out)->required();
  assign->add_option("--exclusions", exclusions_out);

  auto* fitcmd = app.add_subcommand("fit-propensity",
                                    "Fit the treatment model");
  fitcmd->add_option("--plants", plants)->required();
  fitcmd->add_option("--outcomes", outcomes)->required();
  fitcmd->add_flag("--random-intercept", random_intercept,
                   "Cluster random intercept, integrated by quadrature");
  fitcmd->add_option("--nodes", nodes, "Quadrature nodes");
  fitcmd->add_option("--w-columns", w_columns,
                     "Covariate column indices (default all)");
  fitcmd->add_option("--model", model_out, "Output model JSON");

  auto* estimate = app.add_subcommand("estimate", "IPTW estimate grid");
  estimate->add_option("--plants", plants)->required();
  estimate->add_option("--outcomes", outcomes)->required();
  estimate->add_option("--edges", edges)->required();
  estimate->add_option("--model", model_path, "Fitted model JSON")->required();
  estimate->add_option("--alpha", alpha, "Allocation grid")
      ->required()
      ->delimiter(',');
  estimate->add_option("--a-level", a_level, "Fixed level for indirect effects");
  estimate->add_option("--truncation", truncation, "Per-unit weight cap");
  estimate->add_option("--nodes", nodes, "Quadrature nodes");
  estimate->add_option("--report-json", json_out);
  estimate->add_option("--report-csv", csv_out);

  auto* oracle = app.add_subcommand("oracle",
                                    "Exact estimands on a world file");
  oracle->add_option("--world", world_path)->required();
  oracle->add_option("--alpha", alpha, "Allocation grid")
      ->required()
      ->delimiter(',');
  oracle->add_option("--a-level", a_level);
  oracle->add_option("--out", csv_out);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiment");
  simulate->add_option("--config", config_path, "DGP config JSON")->required();
  simulate->add_option("--alpha", alpha, "Allocation grid")
      ->required()
      ->delimiter(',');
  simulate->add_option("--replicates", replicates)->required();
  simulate->add_option("--mode", mode_name, "known | fitted")
      ->check(CLI::IsMember({"known", "fitted"}));
  simulate->add_option("--seed", seed, "Master seed (required)")->required();
  simulate->add_option("--report-json", json_out);
  simulate->add_option("--report-csv", csv_out);

  auto* report = app.add_subcommand("report", "Pretty-print a report JSON");
  report->add_option("--in", in_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(plants, outcomes, edges);
    if (assign->parsed())
      return cmd_assign(plants, outcomes, buffer_km, assignment_out,
                        exclusions_out);
    if (fitcmd->parsed())
      return cmd_fit(plants, outcomes, random_intercept, nodes, w_columns,
                     model_out);
    if (estimate->parsed())
      return cmd_estimate(plants, outcomes, edges, model_path, alpha, a_level,
                          truncation, nodes, threads, json_out, csv_out);
    if (oracle->parsed()) return cmd_oracle(world_path, alpha, a_level, csv_out);
    if (simulate->parsed())
      return cmd_simulate(config_path, alpha, replicates, mode_name, seed,
                          threads, json_out, csv_out);
    if (report->parsed()) return cmd_report(in_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
