#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "netenet/errors.hpp"
#include "netenet/graph.hpp"

namespace netenet {

struct Neighbor {
  int node = 0;
  double weight = 0.0;
};

/// The k training nodes most similar to a new exposure under the
/// inverse-difference kernel, by descending weight (ties: lower id first).
inline std::vector<Neighbor> attach_neighbors(double new_exposure, const ProblemGraph& graph, int k,
                                              double w_cap = 1e3) {
  if (graph.num_nodes() == 0) throw InvalidInputError("attach_neighbors: empty graph");
  if (k < 1 || static_cast<std::size_t>(k) > graph.num_nodes())
    throw InvalidInputError("attach_neighbors: k must lie in [1, n]");
  std::vector<Neighbor> all;
  all.reserve(graph.num_nodes());
  for (const NodeData& node : graph.nodes())
    all.push_back({node.node_id, inverse_exposure_weight(new_exposure, node.exposure, w_cap)});
  std::stable_sort(all.begin(), all.end(), [](const Neighbor& x, const Neighbor& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    return x.node < y.node;
  });
  all.resize(static_cast<std::size_t>(k));
  return all;
}

struct WeberResult {
  Vector point;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // objective of every accepted iterate
};

inline double weber_objective(const Vector& y, const std::vector<Vector>& anchors,
                              const std::vector<double>& weights) {
  double f = 0.0;
  for (std::size_t k = 0; k < anchors.size(); ++k) f += weights[k] * (y - anchors[k]).norm();
  return f;
}

/// Weighted geometric median by Weiszfeld iteration.
///
/// Anchors that are themselves optimal (the weighted pull of the others does
/// not exceed their own weight) are detected up front and returned exactly.
/// An iterate that lands on an anchor takes the Vardi-Zhang step away from
/// it. When two distinct equal-weight anchors make the minimiser a segment,
/// the start point (their midpoint) is returned.
inline WeberResult weber_point(const std::vector<Vector>& anchors, const std::vector<double>& weights,
                               double tol = 1e-8, int max_iters = 1000) {
  if (anchors.empty()) throw InvalidInputError("weber_point: need at least one anchor");
  if (anchors.size() != weights.size()) throw InvalidInputError("weber_point: weight count mismatch");
  const Eigen::Index dim = anchors.front().size();
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    if (anchors[k].size() != dim) throw InvalidInputError("weber_point: anchor dimension mismatch");
    if (!anchors[k].allFinite()) throw InvalidInputError("weber_point: non-finite anchor");
    if (!(weights[k] > 0.0) || !std::isfinite(weights[k]))
      throw InvalidInputError("weber_point: weights must be positive and finite");
  }

  WeberResult result;
  auto finish = [&](const Vector& y, bool converged) {
    result.point = y;
    result.objective = weber_objective(y, anchors, weights);
    result.converged = converged;
    if (result.objective_history.empty()) result.objective_history.push_back(result.objective);
    return result;
  };

  // Anchor optimality: sum_{k: x_k != x_m} w_k (x_k - x_m)/|x_k - x_m| has
  // norm strictly below the total weight sitting on x_m.
  for (std::size_t m = 0; m < anchors.size(); ++m) {
    double own = 0.0;
    Vector pull = Vector::Zero(dim);
    for (std::size_t k = 0; k < anchors.size(); ++k) {
      const double d = (anchors[k] - anchors[m]).norm();
      if (d == 0.0)
        own += weights[k];
      else
        pull += weights[k] * (anchors[k] - anchors[m]) / d;
    }
    if (pull.norm() < own * (1.0 - 1e-12)) return finish(anchors[m], true);
  }

  const double total_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
  Vector y = Vector::Zero(dim);
  for (std::size_t k = 0; k < anchors.size(); ++k) y += weights[k] * anchors[k];
  y /= total_weight;
  double f = weber_objective(y, anchors, weights);
  result.objective_history.push_back(f);

  double scale = 0.0;
  for (const Vector& a : anchors) scale = std::max(scale, a.norm());
  const double collide = 1e-14 * std::max(1.0, scale);

  for (int iter = 1; iter <= max_iters; ++iter) {
    Vector numer = Vector::Zero(dim);
    double denom = 0.0;
    double on_anchor = 0.0;
    Vector pull = Vector::Zero(dim);
    for (std::size_t k = 0; k < anchors.size(); ++k) {
      const double d = (anchors[k] - y).norm();
      if (d <= collide) {
        on_anchor += weights[k];
        continue;
      }
      numer += weights[k] * anchors[k] / d;
      denom += weights[k] / d;
      pull += weights[k] * (anchors[k] - y) / d;
    }
    Vector next = numer / denom;
    if (on_anchor > 0.0) {
      const double r = pull.norm();
      if (r <= on_anchor) {
        result.iterations = iter;
        return finish(y, true);
      }
      const double t = on_anchor / r;
      next = (1.0 - t) * next + t * y;
    }
    const double f_next = weber_objective(next, anchors, weights);
    result.iterations = iter;
    if (!(f_next <= f)) return finish(y, true);  // no further decrease at working precision
    const double step = (next - y).norm();
    y = std::move(next);
    f = f_next;
    result.objective_history.push_back(f);
    if (step <= tol * std::max(1.0, y.norm())) return finish(y, true);
  }
  return finish(y, false);
}

/// Dot product of coefficients with a covariate row (intercept as a
/// constant-1 entry when the model carries one).
inline double predict_response(const Vector& coefficients, const Vector& covariates) {
  if (coefficients.size() != covariates.size())
    throw InvalidInputError("predict_response: dimension mismatch");
  return coefficients.dot(covariates);
}

struct AttachmentResult {
  std::vector<int> neighbor_ids;
  std::vector<double> weights;
  Vector inferred_x;
  bool converged = true;
};

/// Coefficients for an unseen node: Weber point of the fitted coefficients of
/// its k most similar training nodes.
inline AttachmentResult infer_coefficients(double new_exposure, const ProblemGraph& graph,
                                           const std::vector<Vector>& coefficients, int k,
                                           double w_cap = 1e3) {
  if (coefficients.size() != graph.num_nodes())
    throw InvalidInputError("infer_coefficients: coefficient count != node count");
  AttachmentResult out;
  std::vector<Vector> anchors;
  for (const Neighbor& nb : attach_neighbors(new_exposure, graph, k, w_cap)) {
    out.neighbor_ids.push_back(nb.node);
    out.weights.push_back(nb.weight);
    anchors.push_back(coefficients[static_cast<std::size_t>(nb.node)]);
  }
  WeberResult weber = weber_point(anchors, out.weights);
  out.inferred_x = std::move(weber.point);
  out.converged = weber.converged;
  return out;
}

}  // namespace netenet
