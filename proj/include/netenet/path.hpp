#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "netenet/admm.hpp"
#include "netenet/errors.hpp"
#include "netenet/graph.hpp"
#include "netenet/inference.hpp"

namespace netenet {

struct PathConfig {
  double gamma = 1.5;
  double lambda_init = 1e-3;
  std::vector<double> alpha_grid{0.0};
  double consensus_tol = 1e-4;
  double cv_fraction = 0.2;
  int max_steps = 200;  // hard cap on nonzero lambdas per alpha

  void validate() const {
    if (!(gamma > 1.0) || !std::isfinite(gamma)) throw InvalidInputError("gamma must be > 1");
    if (!(lambda_init > 0.0) || !std::isfinite(lambda_init))
      throw InvalidInputError("lambda_init must be > 0");
    if (alpha_grid.empty()) throw InvalidInputError("alpha grid is empty");
    for (double a : alpha_grid)
      if (!(a >= 0.0 && a <= 1.0)) throw InvalidInputError("alpha grid values must lie in [0,1]");
    if (!(consensus_tol > 0.0)) throw InvalidInputError("consensus_tol must be > 0");
    if (!(cv_fraction > 0.0 && cv_fraction < 1.0))
      throw InvalidInputError("cv_fraction must lie in (0,1)");
    if (max_steps < 1) throw InvalidInputError("max_steps must be >= 1");
  }
};

struct PathEntry {
  double lambda = 0.0;
  double alpha = 0.0;
  Solution solution;
  double cv_score = std::numeric_limits<double>::quiet_NaN();
  int k_nonzero = 0;
  double aic = std::numeric_limits<double>::quiet_NaN();
};

struct PathResult {
  std::vector<PathEntry> entries;  // grouped by alpha, increasing lambda within a group
  int selected = -1;
  std::vector<double> lambda_critical;  // one per alpha, in grid order
  std::vector<bool> reached_consensus;  // false when max_steps cut the ladder short

  double lambda_critical_for(std::size_t alpha_index) const { return lambda_critical.at(alpha_index); }
};

inline double max_coefficient_change(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  double change = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    change = std::max(change, (a[i] - b[i]).lpNorm<Eigen::Infinity>());
  return change;
}

/// Warm-started geometric lambda ladder for every alpha in the grid.
///
/// Each ladder starts with a fit at lambda = 0, continues at lambda_init and
/// multiplies by gamma until no coefficient moves by more than consensus_tol
/// between consecutive fits; that lambda is recorded as lambda_critical.
inline PathResult regularization_path(const ProblemGraph& graph, const SolverConfig& solver,
                                      const PathConfig& path) {
  solver.validate();
  path.validate();
  PathResult result;
  for (double alpha : path.alpha_grid) {
    SolverConfig cfg = solver;
    cfg.alpha = alpha;
    cfg.lambda = 0.0;
    Solution previous = admm_fit(graph, cfg);
    result.entries.push_back({0.0, alpha, previous});

    double lambda = path.lambda_init;
    bool merged = false;
    for (int step = 0; step < path.max_steps; ++step) {
      cfg.lambda = lambda;
      Solution current = admm_fit(graph, cfg, previous.warm_start());
      const double change = max_coefficient_change(current.coefficients, previous.coefficients);
      result.entries.push_back({lambda, alpha, current});
      previous = std::move(current);
      if (change <= path.consensus_tol) {
        merged = true;
        break;
      }
      lambda *= path.gamma;
    }
    result.lambda_critical.push_back(merged ? lambda : result.entries.back().lambda);
    result.reached_consensus.push_back(merged);
  }
  return result;
}

/// n ln(cv_score) + 2k.
inline double aic_score(long n, double cv_score, long k_nonzero) {
  if (n < 1) throw InvalidInputError("aic_score: n must be >= 1");
  if (!(cv_score > 0.0) || !std::isfinite(cv_score))
    throw InvalidInputError("aic_score: cv_score must be positive and finite");
  if (k_nonzero < 0) throw InvalidInputError("aic_score: k must be >= 0");
  return static_cast<double>(n) * std::log(cv_score) + 2.0 * static_cast<double>(k_nonzero);
}

inline int count_nonzero(const std::vector<Vector>& coefficients, double zero_tol = 1e-6) {
  int k = 0;
  for (const Vector& x : coefficients) k += static_cast<int>((x.array().abs() > zero_tol).count());
  return k;
}

/// Per-feature L2 norm of the coefficient column across nodes.
inline Vector coefficient_column_norms(const std::vector<Vector>& coefficients) {
  if (coefficients.empty()) return Vector();
  Vector norms = Vector::Zero(coefficients.front().size());
  for (const Vector& x : coefficients) norms.array() += x.array().square();
  return norms.array().sqrt();
}

/// Feature indices whose column norm exceeds `threshold`.
inline std::vector<int> significant_features(const std::vector<Vector>& coefficients,
                                             double threshold = 0.05) {
  const Vector norms = coefficient_column_norms(coefficients);
  std::vector<int> out;
  for (Eigen::Index j = 0; j < norms.size(); ++j)
    if (norms[j] > threshold) out.push_back(static_cast<int>(j));
  return out;
}

struct HoldoutOptions {
  int attach_k = 5;
  double w_cap = 1e3;
  double zero_tol = 1e-6;
};

struct HoldoutPrediction {
  std::size_t node = 0;  // index into the holdout list
  Eigen::Index row = 0;
  double predicted = 0.0;
  double actual = 0.0;
};

/// Predict every holdout row from coefficients inferred by attachment.
inline std::vector<HoldoutPrediction> predict_holdout(const ProblemGraph& graph,
                                                      const std::vector<Vector>& coefficients,
                                                      const std::vector<NodeData>& holdout,
                                                      const HoldoutOptions& opts = {}) {
  std::vector<HoldoutPrediction> out;
  const int k = std::min<int>(opts.attach_k, static_cast<int>(graph.num_nodes()));
  for (std::size_t h = 0; h < holdout.size(); ++h) {
    const NodeData& node = holdout[h];
    AttachmentResult att = infer_coefficients(node.exposure, graph, coefficients, k, opts.w_cap);
    for (Eigen::Index r = 0; r < node.design.rows(); ++r)
      out.push_back({h, r, predict_response(att.inferred_x, node.design.row(r).transpose()),
                     node.response[r]});
  }
  return out;
}

inline double mean_squared_error(const std::vector<HoldoutPrediction>& preds) {
  if (preds.empty()) throw InvalidInputError("mean_squared_error: no predictions");
  double s = 0.0;
  for (const auto& p : preds) s += (p.predicted - p.actual) * (p.predicted - p.actual);
  return s / static_cast<double>(preds.size());
}

/// Index of the minimum-AIC entry (first one on ties). Entries must already
/// carry cv_score and k_nonzero; `n` is the holdout size.
inline int select_by_aic(std::vector<PathEntry>& entries, long n) {
  if (entries.empty()) throw InvalidInputError("select_model: empty path");
  int best = -1;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    entries[e].aic = aic_score(n, entries[e].cv_score, entries[e].k_nonzero);
    if (best < 0 || entries[e].aic < entries[static_cast<std::size_t>(best)].aic)
      best = static_cast<int>(e);
  }
  return best;
}

/// Scores every path entry on held-out nodes (mean squared prediction error,
/// nonzero coefficient count) and selects the minimum-AIC entry.
inline const PathEntry& select_model(PathResult& path, const ProblemGraph& graph,
                                     const std::vector<NodeData>& holdout,
                                     const HoldoutOptions& opts = {}) {
  if (path.entries.empty()) throw InvalidInputError("select_model: empty path");
  long n = 0;
  for (const NodeData& h : holdout) n += static_cast<long>(h.design.rows());
  if (n < 1) throw InvalidInputError("select_model: empty holdout");
  for (PathEntry& entry : path.entries) {
    entry.cv_score = mean_squared_error(predict_holdout(graph, entry.solution.coefficients, holdout, opts));
    entry.k_nonzero = count_nonzero(entry.solution.coefficients, opts.zero_tol);
  }
  path.selected = select_by_aic(path.entries, n);
  return path.entries[static_cast<std::size_t>(path.selected)];
}

}  // namespace netenet
