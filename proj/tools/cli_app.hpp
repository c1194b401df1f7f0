#pragma once

// Command implementations behind the `netenet` executable. Kept in a header
// so the integration tests can drive commands in-process.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netenet/netenet.hpp"

namespace netenet::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct RunConfig {
  // inputs / outputs
  std::string expression;
  std::string clinical;
  std::string edges;  // optional explicit graph
  std::string out = ".";

  // solver
  double lambda = 1.0;
  double alpha = 0.5;
  double mu = 0.0;
  double rho = 1.0;
  double eps_abs = 1e-6;
  double eps_rel = 1e-5;
  int max_iters = 20000;

  // regularization path
  double gamma = 1.5;
  double lambda_init = 1e-3;
  std::vector<double> alpha_grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  double consensus_tol = 1e-4;
  int max_steps = 200;
  double zero_tol = 1e-6;
  double gene_norm_threshold = 0.05;

  // graph
  std::string kernel = "inverse_exposure";
  int knn = 5;
  double w_cap = 1e3;
  int diffusion_steps = 1;
  double bandwidth = 0.0;

  // data preparation and evaluation
  bool aft = true;
  bool intercept = true;
  bool standardize = true;
  int top_genes = 100;
  double train_frac = 0.8;
  std::uint64_t seed = 1;
  int attach_k = 5;
  double tol = 1e-4;  // consensus tolerance for clustering
  double significance = 0.05;

  // synthetic benchmark
  SynthSpec synth;

  SolverConfig solver() const {
    SolverConfig c;
    c.lambda = lambda;
    c.alpha = alpha;
    c.mu = mu;
    c.rho = rho;
    c.eps_abs = eps_abs;
    c.eps_rel = eps_rel;
    c.max_iters = max_iters;
    return c;
  }

  PathConfig path() const {
    PathConfig p;
    p.gamma = gamma;
    p.lambda_init = lambda_init;
    p.alpha_grid = alpha_grid;
    p.consensus_tol = consensus_tol;
    p.cv_fraction = 1.0 - train_frac;
    p.max_steps = max_steps;
    return p;
  }

  KernelOptions kernel_options() const {
    KernelOptions k;
    k.w_cap = w_cap;
    k.diffusion_steps = diffusion_steps;
    k.bandwidth = bandwidth;
    return k;
  }

  void validate() const {
    solver().validate();
    parse_kernel(kernel);
    if (knn < 1) throw InvalidInputError("knn must be >= 1");
    if (!(train_frac > 0.0 && train_frac <= 1.0)) throw InvalidInputError("train_frac must lie in (0,1]");
    if (!(tol >= 0.0)) throw InvalidInputError("tol must be >= 0");
    if (attach_k < 1) throw InvalidInputError("attach_k must be >= 1");
    if (!(w_cap > 0.0)) throw InvalidInputError("w_cap must be > 0");
  }
};

namespace detail {

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

inline std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

}  // namespace detail

/// Reads a JSON config file. Relative file paths in it resolve against the
/// directory holding the config.
inline void load_config(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(0, 0, "config '" + path + "': " + e.what());
  }
  const fs::path base = fs::path(path).parent_path();
  try {
    using detail::take;
    take(j, "expression", cfg.expression);
    take(j, "clinical", cfg.clinical);
    take(j, "edges", cfg.edges);
    take(j, "out", cfg.out);
    cfg.expression = detail::resolve(base, cfg.expression);
    cfg.clinical = detail::resolve(base, cfg.clinical);
    cfg.edges = detail::resolve(base, cfg.edges);
    if (j.contains("out")) cfg.out = detail::resolve(base, cfg.out);
    take(j, "lambda", cfg.lambda);
    take(j, "alpha", cfg.alpha);
    take(j, "mu", cfg.mu);
    take(j, "rho", cfg.rho);
    take(j, "eps_abs", cfg.eps_abs);
    take(j, "eps_rel", cfg.eps_rel);
    take(j, "max_iters", cfg.max_iters);
    take(j, "gamma", cfg.gamma);
    take(j, "lambda_init", cfg.lambda_init);
    take(j, "alpha_grid", cfg.alpha_grid);
    take(j, "consensus_tol", cfg.consensus_tol);
    take(j, "max_steps", cfg.max_steps);
    take(j, "zero_tol", cfg.zero_tol);
    take(j, "gene_norm_threshold", cfg.gene_norm_threshold);
    take(j, "kernel", cfg.kernel);
    take(j, "knn", cfg.knn);
    take(j, "w_cap", cfg.w_cap);
    take(j, "diffusion_steps", cfg.diffusion_steps);
    take(j, "bandwidth", cfg.bandwidth);
    take(j, "aft", cfg.aft);
    take(j, "intercept", cfg.intercept);
    take(j, "standardize", cfg.standardize);
    take(j, "top_genes", cfg.top_genes);
    take(j, "train_frac", cfg.train_frac);
    take(j, "seed", cfg.seed);
    take(j, "attach_k", cfg.attach_k);
    take(j, "tol", cfg.tol);
    take(j, "significance", cfg.significance);
    if (j.contains("synth")) {
      const json& s = j.at("synth");
      take(s, "n", cfg.synth.n);
      take(s, "p", cfg.synth.p);
      take(s, "block_sizes", cfg.synth.block_sizes);
      take(s, "noise_scale", cfg.synth.noise_scale);
      take(s, "intra_density", cfg.synth.intra_density);
      take(s, "global_density", cfg.synth.global_density);
      take(s, "exposure_spacing", cfg.synth.exposure_spacing);
      take(s, "exposure_jitter", cfg.synth.exposure_jitter);
    }
  } catch (const json::exception& e) {
    throw SchemaError("config '" + path + "': " + e.what());
  }
}

/// Loaded and prepared inputs shared by the data-driven commands.
struct Workspace {
  io::IngestResult ingested;
  PreparedData data;
  ProblemGraph graph;
};

inline Workspace load_workspace(const RunConfig& cfg, double train_frac) {
  if (cfg.expression.empty() || cfg.clinical.empty())
    throw InvalidInputError("expression and clinical files are required");
  for (const auto& p : {cfg.expression, cfg.clinical})
    if (!fs::exists(p)) throw InvalidInputError("input file '" + p + "' does not exist");
  if (!cfg.edges.empty() && !fs::exists(cfg.edges))
    throw InvalidInputError("edge file '" + cfg.edges + "' does not exist");

  Workspace ws;
  ws.ingested = io::ingest(cfg.expression, cfg.clinical, {cfg.aft});
  if (ws.ingested.records.size() < 2) throw InvalidInputError("fewer than 2 usable records after the join");
  Split split;
  if (train_frac >= 1.0) {
    for (std::size_t i = 0; i < ws.ingested.records.size(); ++i) split.train.push_back(i);
  } else {
    split = split_records(ws.ingested.records, train_frac, cfg.seed);
  }
  PrepareOptions popts;
  popts.aft = cfg.aft;
  popts.intercept = cfg.intercept;
  popts.standardize = cfg.standardize;
  popts.top_genes = cfg.top_genes;
  ws.data = prepare_data(ws.ingested.records, ws.ingested.gene_names, split, popts);
  std::optional<std::vector<io::NamedEdge>> edges;
  if (!cfg.edges.empty()) edges = io::read_edges(csv::read(cfg.edges));
  ws.graph = build_graph(ws.data, edges, parse_kernel(cfg.kernel), cfg.knn, cfg.intercept, cfg.kernel_options());
  return ws;
}

inline fs::path output_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out);
  fs::create_directories(dir);
  return dir;
}

inline std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write '" + path.string() + "'");
  return out;
}

inline json solution_summary(const Solution& sol) {
  return {{"converged", sol.converged},
          {"iterations", sol.iterations},
          {"objective", sol.objective},
          {"primal_residual", sol.primal_residuals.empty() ? 0.0 : sol.primal_residuals.back()},
          {"dual_residual", sol.dual_residuals.empty() ? 0.0 : sol.dual_residuals.back()}};
}

// ---------------------------------------------------------------------------
// Commands. Each returns a JSON summary that main() prints on stdout.

inline json cmd_synth(const RunConfig& cfg) {
  SynthSpec spec = cfg.synth;
  spec.seed = cfg.seed;
  const SynthData data = generate_data(spec);
  const BlockEdges block = generate_block_edges(spec);

  std::vector<std::string> ids;
  std::vector<std::string> genes;
  for (int j = 0; j < spec.p; ++j) genes.push_back("x" + std::to_string(j + 1));
  std::vector<SurvivalRecord> records;
  for (int i = 0; i < spec.n; ++i) {
    std::ostringstream id;
    id << 'n' << std::setw(3) << std::setfill('0') << i;
    ids.push_back(id.str());
    const NodeData& node = data.nodes[static_cast<std::size_t>(i)];
    SurvivalRecord r;
    r.id = ids.back();
    r.time = node.response[0];
    r.event = 1;
    r.covariates = node.design.row(0).transpose();
    r.exposure = node.exposure;
    r.stage = data.blocks[static_cast<std::size_t>(i)] + 1;
    records.push_back(std::move(r));
  }
  const ProblemGraph graph(data.nodes, block.edges);

  const fs::path dir = output_dir(cfg);
  {
    auto out = open_output(dir / "expression.csv");
    io::write_expression(out, records, genes);
  }
  {
    auto out = open_output(dir / "clinical.csv");
    io::write_clinical(out, records);
  }
  {
    auto out = open_output(dir / "edges.csv");
    io::write_edges(out, graph, ids);
  }
  {
    auto out = open_output(dir / "truth.csv");
    io::write_coefficients(out, ids, genes, data.true_coefficients);
  }
  json config = {{"expression", "expression.csv"},
                 {"clinical", "clinical.csv"},
                 {"edges", "edges.csv"},
                 {"aft", false},
                 {"standardize", false},
                 {"top_genes", 0},
                 {"intercept", true},
                 {"lambda", 1.12},
                 {"alpha", cfg.alpha},
                 {"mu", 0.0},
                 {"seed", cfg.seed}};
  {
    auto out = open_output(dir / "config.json");
    out << config.dump(2) << '\n';
  }
  return {{"command", "synth"},
          {"nodes", spec.n},
          {"features", spec.p},
          {"edges", graph.num_edges()},
          {"block_retries", block.retries}};
}

inline json cmd_fit(const RunConfig& cfg) {
  Workspace ws = load_workspace(cfg, 1.0);
  const Solution sol = admm_fit(ws.graph, cfg.solver());
  const fs::path dir = output_dir(cfg);
  auto out = open_output(dir / "coefficients.csv");
  io::write_coefficients(out, ws.data.ids, ws.data.feature_names, sol.coefficients);
  json summary = solution_summary(sol);
  summary["command"] = "fit";
  summary["nodes"] = ws.graph.num_nodes();
  summary["edges"] = ws.graph.num_edges();
  summary["dropped_rows"] = ws.ingested.dropped;
  return summary;
}

inline json cmd_path(const RunConfig& cfg) {
  Workspace ws = load_workspace(cfg, cfg.train_frac);
  if (ws.data.test_nodes.empty()) throw InvalidInputError("path: the holdout split is empty");
  PathResult path = regularization_path(ws.graph, cfg.solver(), cfg.path());
  HoldoutOptions hopts{cfg.attach_k, cfg.w_cap, cfg.zero_tol};
  const PathEntry& best = select_model(path, ws.graph, ws.data.test_nodes, hopts);

  const fs::path dir = output_dir(cfg);
  {
    auto out = open_output(dir / "path.csv");
    io::write_path(out, path, ws.data.ids);
  }
  {
    auto out = open_output(dir / "scores.csv");
    io::write_scores(out, path);
  }
  json genes = json::array();
  for (int j : significant_features(best.solution.coefficients, cfg.gene_norm_threshold))
    genes.push_back(ws.data.feature_names.at(static_cast<std::size_t>(j)));
  json crit = json::array();
  for (std::size_t a = 0; a < cfg.alpha_grid.size(); ++a)
    crit.push_back({{"alpha", cfg.alpha_grid[a]},
                    {"lambda_critical", path.lambda_critical[a]},
                    {"reached_consensus", static_cast<bool>(path.reached_consensus[a])}});
  return {{"command", "path"},
          {"entries", path.entries.size()},
          {"selected", {{"alpha", best.alpha}, {"lambda", best.lambda}, {"aic", best.aic},
                        {"cv_score", best.cv_score}, {"K", best.k_nonzero}}},
          {"lambda_critical", crit},
          {"significant_features", genes}};
}

inline json cmd_predict(const RunConfig& cfg) {
  Workspace ws = load_workspace(cfg, cfg.train_frac);
  if (ws.data.test_nodes.empty()) throw InvalidInputError("predict: the holdout split is empty");
  const Solution sol = admm_fit(ws.graph, cfg.solver());
  HoldoutOptions hopts{cfg.attach_k, cfg.w_cap, cfg.zero_tol};
  const auto preds = predict_holdout(ws.graph, sol.coefficients, ws.data.test_nodes, hopts);

  std::vector<io::PredictionRow> rows;
  std::vector<double> predicted, actual;
  for (const auto& p : preds) {
    io::PredictionRow row{ws.data.test_ids.at(p.node), p.predicted, std::nullopt};
    if (ws.data.test_known.at(p.node)) {
      row.actual = p.actual;
      predicted.push_back(p.predicted);
      actual.push_back(p.actual);
    }
    rows.push_back(std::move(row));
  }
  const fs::path dir = output_dir(cfg);
  auto out = open_output(dir / "predictions.csv");
  io::write_predictions(out, rows);
  json summary = solution_summary(sol);
  summary["command"] = "predict";
  summary["test_patients"] = rows.size();
  summary["response_mean"] = ws.data.response_mean;
  if (predicted.size() >= 2)
    summary["correlation"] = pearson_correlation(predicted, actual);
  else
    summary["correlation"] = nullptr;
  return summary;
}

inline std::pair<Workspace, ClusterAssignment> fit_and_cluster(const RunConfig& cfg, json& summary) {
  Workspace ws = load_workspace(cfg, 1.0);
  const Solution sol = admm_fit(ws.graph, cfg.solver());
  ClusterAssignment assignment = consensus_clusters(ws.graph, sol, cfg.tol);
  summary = solution_summary(sol);
  summary["clusters"] = assignment.num_clusters();
  summary["cluster_sizes"] = assignment.sizes;
  const fs::path dir = output_dir(cfg);
  auto out = open_output(dir / "clusters.csv");
  io::write_clusters(out, assignment, ws.data.ids);
  return {std::move(ws), std::move(assignment)};
}

inline json cmd_cluster(const RunConfig& cfg) {
  json summary;
  fit_and_cluster(cfg, summary);
  summary["command"] = "cluster";
  return summary;
}

inline json cmd_enrich(const RunConfig& cfg) {
  json summary;
  auto [ws, assignment] = fit_and_cluster(cfg, summary);
  const EnrichmentTable table = stage_enrichment(assignment, ws.data.stages);
  const fs::path dir = output_dir(cfg);
  auto out = open_output(dir / "enrichment.csv");
  io::write_enrichment(out, table, cfg.significance);
  for (const auto& w : table.warnings) std::cerr << "warning: " << w << '\n';
  summary["command"] = "enrich";
  summary["rows"] = table.rows.size();
  summary["warnings"] = table.warnings;
  return summary;
}

inline std::string error_line(std::string_view kind, const std::string& message) {
  return json{{"error", kind}, {"message", message}}.dump();
}

/// Parses arguments, runs one command and returns the process exit code:
/// 0 success, 1 runtime/module error, 2 usage error. Diagnostics go to `err`
/// as a single JSON line; the command summary goes to `out`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"netenet: network elastic net regression, clustering and survival pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<double> lambda, alpha, mu, rho, gamma, tol, train_frac;
  std::optional<std::string> kernel, expression, clinical, edges, outdir;
  std::optional<int> knn;
  std::optional<std::uint64_t> seed;

  app.add_option("--config", config_path, "JSON configuration file (flags override it)");
  app.add_option("--expression", expression, "expression CSV: patient_id + one column per gene");
  app.add_option("--clinical", clinical,
                 "clinical CSV: patient_id,survival_months,censored(1=event),pack_years,stage");
  app.add_option("--edges", edges, "optional edge CSV (node_a,node_b,weight); default builds a k-NN graph");
  app.add_option("--out", outdir, "output directory [.]");
  app.add_option("--lambda", lambda, "edge penalty strength lambda [1.0]");
  app.add_option("--alpha", alpha, "L1 share of the edge penalty, in [0,1] [0.5]");
  app.add_option("--mu", mu, "ridge strength on node coefficients [0]");
  app.add_option("--rho", rho, "ADMM penalty parameter [1.0]");
  app.add_option("--gamma", gamma, "lambda multiplier along the path, > 1 [1.5]");
  app.add_option("--kernel", kernel, "euclidean | correlation | inverse_exposure | diffusion [inverse_exposure]");
  app.add_option("--knn", knn, "neighbours per node when building the graph [5]");
  app.add_option("--tol", tol, "coefficient agreement tolerance for consensus clusters [1e-4]");
  app.add_option("--seed", seed, "random seed for the split and the synthetic generator [1]");
  app.add_option("--train-frac", train_frac, "training share of the stratified split [0.8]");

  app.add_subcommand("synth", "write the three-block synthetic benchmark (CSV + config.json)");
  app.add_subcommand("fit", "fit all records and write coefficients.csv");
  app.add_subcommand("path", "regularization path over the alpha grid; writes path.csv and scores.csv");
  app.add_subcommand("predict", "fit the training split, predict the holdout; writes predictions.csv");
  app.add_subcommand("cluster", "fit and write consensus clusters to clusters.csv");
  app.add_subcommand("enrich", "fit, cluster and test stage enrichment; writes enrichment.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_line("usage", e.what()) << '\n';
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg;
    if (!config_path.empty()) load_config(config_path, cfg);
    if (expression) cfg.expression = *expression;
    if (clinical) cfg.clinical = *clinical;
    if (edges) cfg.edges = *edges;
    if (outdir) cfg.out = *outdir;
    if (lambda) cfg.lambda = *lambda;
    if (alpha) cfg.alpha = *alpha;
    if (mu) cfg.mu = *mu;
    if (rho) cfg.rho = *rho;
    if (gamma) cfg.gamma = *gamma;
    if (kernel) cfg.kernel = *kernel;
    if (knn) cfg.knn = *knn;
    if (tol) cfg.tol = *tol;
    if (seed) cfg.seed = *seed;
    if (train_frac) cfg.train_frac = *train_frac;
    cfg.validate();

    json summary;
    if (command == "synth") summary = cmd_synth(cfg);
    else if (command == "fit") summary = cmd_fit(cfg);
    else if (command == "path") summary = cmd_path(cfg);
    else if (command == "predict") summary = cmd_predict(cfg);
    else if (command == "cluster") summary = cmd_cluster(cfg);
    else summary = cmd_enrich(cfg);
    out << summary.dump() << '\n';
    return 0;
  } catch (const Error& e) {
    err << error_line(to_string(e.kind()), e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << error_line("internal", e.what()) << '\n';
    return 1;
  }
}

}  // namespace netenet::cli
