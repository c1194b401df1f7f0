#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netenet/errors.hpp"
#include "netenet/graph.hpp"
#include "netenet/prox.hpp"

namespace netenet {

struct SolverConfig {
  double lambda = 0.0;  // overall edge strength
  double alpha = 0.0;   // L1 share of the edge penalty
  double mu = 0.0;      // ridge strength on each node's coefficients
  double rho = 1.0;
  double eps_abs = 1e-6;
  double eps_rel = 1e-5;
  int max_iters = 20000;

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(lambda) || lambda < 0.0) throw InvalidInputError("lambda must be finite and >= 0");
    if (!finite(alpha) || alpha < 0.0 || alpha > 1.0) throw InvalidInputError("alpha must lie in [0,1]");
    if (!finite(mu) || mu < 0.0) throw InvalidInputError("mu must be finite and >= 0");
    if (!finite(rho) || rho <= 0.0) throw InvalidInputError("rho must be finite and > 0");
    if (!finite(eps_abs) || eps_abs <= 0.0) throw InvalidInputError("eps_abs must be > 0");
    if (!finite(eps_rel) || eps_rel <= 0.0) throw InvalidInputError("eps_rel must be > 0");
    if (max_iters < 1) throw InvalidInputError("max_iters must be >= 1");
  }

  /// Edge prox coefficients for an edge of weight w.
  EdgeProxParams edge_params(double weight) const {
    return {rho, lambda * (1.0 - alpha) * weight, lambda * alpha * weight};
  }
};

/// Consensus copies and scaled duals of one edge (a, b); the `_ij` members
/// belong to endpoint a, the `_ji` members to endpoint b.
struct EdgeState {
  Vector z_ij, z_ji;
  Vector u_ij, u_ji;
};

struct WarmStart {
  std::vector<Vector> coefficients;
  std::vector<EdgeState> edges;
};

struct Solution {
  std::vector<Vector> coefficients;
  std::vector<EdgeState> edge_states;
  int iterations = 0;
  std::vector<double> primal_residuals;
  std::vector<double> dual_residuals;
  bool converged = false;
  double objective = 0.0;

  WarmStart warm_start() const { return {coefficients, edge_states}; }
};

/// ||response - design x||^2 + mu ||x||^2.
inline double node_objective(const NodeData& node, const Vector& x, double mu) {
  if (x.size() != node.design.cols())
    throw InvalidInputError("node_objective: coefficient length != feature count");
  return (node.response - node.design * x).squaredNorm() + mu * x.squaredNorm();
}

/// Full objective of the network elastic net at the given coefficients.
inline double network_objective(const ProblemGraph& graph, const std::vector<Vector>& x,
                                double lambda, double alpha, double mu) {
  if (x.size() != graph.num_nodes()) throw InvalidInputError("objective: wrong coefficient count");
  double total = 0.0;
  for (std::size_t i = 0; i < graph.num_nodes(); ++i) total += node_objective(graph.node(i), x[i], mu);
  for (const Edge& e : graph.edges()) {
    const Vector d = x[e.a] - x[e.b];
    total += lambda * (1.0 - alpha) * e.weight * d.norm() + lambda * alpha * e.weight * d.lpNorm<1>();
  }
  return total;
}

/// Per-node factorisation of 2 A'A + (2 mu + rho deg) I, reused across
/// iterations because rho and the graph stay fixed during a fit.
class NodeSystem {
 public:
  NodeSystem(const NodeData& node, std::size_t degree, double mu, double rho)
      : rho_(rho) {
    const Eigen::Index p = node.design.cols();
    if (mu == 0.0 && degree == 0) {
      Eigen::ColPivHouseholderQR<Matrix> qr(node.design);
      if (qr.rank() < p)
        throw SingularityError(node.node_id, "x-update is singular at node " +
                                                 std::to_string(node.node_id) +
                                                 " (rank-deficient design, no neighbours, mu = 0)");
    }
    Matrix system = 2.0 * node.design.transpose() * node.design;
    system.diagonal().array() += 2.0 * mu + rho * static_cast<double>(degree);
    llt_.compute(system);
    if (llt_.info() != Eigen::Success)
      throw SingularityError(node.node_id, "x-update factorisation failed at node " +
                                               std::to_string(node.node_id));
    base_rhs_ = 2.0 * node.design.transpose() * node.response;
  }

  /// `proximity` is the sum of (z_ij - u_ij) over the node's edges.
  Vector solve(const Vector& proximity) const { return llt_.solve(base_rhs_ + rho_ * proximity); }

  /// In-place variant: `work` holds the proximity sum on entry, x on exit.
  void solve_in_place(Vector& work) const {
    work = base_rhs_ + rho_ * work;
    llt_.solveInPlace(work);
  }

 private:
  double rho_;
  Eigen::LLT<Matrix> llt_;
  Vector base_rhs_;
};

/// Exact minimiser of f_i(x) + sum_j rho/2 ||x - v_j||^2 with v_j = z_ij - u_ij.
inline Vector x_update(const NodeData& node, const std::vector<Vector>& neighbors,
                       const SolverConfig& config) {
  config.validate();
  const Eigen::Index p = node.design.cols();
  Vector proximity = Vector::Zero(p);
  for (const Vector& v : neighbors) {
    if (v.size() != p) throw InvalidInputError("x_update: neighbour vector length mismatch");
    proximity += v;
  }
  NodeSystem system(node, neighbors.size(), config.mu, config.rho);
  return system.solve(proximity);
}

/// Two-block ADMM for the network elastic net: all x-updates, then all edge
/// proxes, then the scaled dual step. Stops once the primal and dual residual
/// norms fall below their thresholds, or after max_iters.
inline Solution admm_fit(const ProblemGraph& graph, const SolverConfig& config,
                         const std::optional<WarmStart>& warm = std::nullopt) {
  config.validate();
  const std::size_t n = graph.num_nodes();
  const std::size_t m = graph.num_edges();
  const Eigen::Index p = graph.num_features();
  const double rho = config.rho;

  std::vector<NodeSystem> systems;
  systems.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    systems.emplace_back(graph.node(i), graph.degree(i), config.mu, rho);

  Solution sol;
  sol.coefficients.assign(n, Vector::Zero(p));
  sol.edge_states.resize(m);
  if (warm) {
    if (warm->coefficients.size() != n || warm->edges.size() != m)
      throw InvalidInputError("admm_fit: warm start does not match the graph");
    sol.coefficients = warm->coefficients;
    sol.edge_states = warm->edges;
    for (const Vector& x : sol.coefficients)
      if (x.size() != p) throw InvalidInputError("admm_fit: warm coefficient length mismatch");
    for (const EdgeState& s : sol.edge_states)
      if (s.z_ij.size() != p || s.z_ji.size() != p || s.u_ij.size() != p || s.u_ji.size() != p)
        throw InvalidInputError("admm_fit: warm edge state length mismatch");
  } else {
    for (EdgeState& s : sol.edge_states) {
      s.z_ij = s.z_ji = s.u_ij = s.u_ji = Vector::Zero(p);
    }
  }

  std::vector<Vector>& x = sol.coefficients;
  std::vector<EdgeState>& state = sol.edge_states;
  const auto& edges = graph.edges();
  const double dim_scale = std::sqrt(static_cast<double>(n) * static_cast<double>(p));

  std::vector<EdgeProxParams> params;
  params.reserve(m);
  for (const Edge& edge : edges) params.push_back(config.edge_params(edge.weight));
  Vector va(p), vb(p), delta(p), zi(p), zj(p);

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      Vector& xi = x[i];
      xi.setZero();
      for (const Incidence& inc : graph.neighbors(i)) {
        const EdgeState& s = state[inc.edge];
        if (edges[inc.edge].a == static_cast<int>(i))
          xi += s.z_ij - s.u_ij;
        else
          xi += s.z_ji - s.u_ji;
      }
      systems[i].solve_in_place(xi);
    }

    double primal_sq = 0.0, dual_sq = 0.0, z_sq = 0.0, u_sq = 0.0;
    for (std::size_t e = 0; e < m; ++e) {
      EdgeState& s = state[e];
      const Edge& edge = edges[e];
      const Vector& xi = x[edge.a];
      const Vector& xj = x[edge.b];
      va = xi + s.u_ij;
      vb = xj + s.u_ji;
      detail::edge_prox_into(va, vb, 2.0 * params[e].c2 / rho, 2.0 * params[e].c1 / rho, delta, zi, zj);
      dual_sq += (zi - s.z_ij).squaredNorm() + (zj - s.z_ji).squaredNorm();
      s.z_ij.swap(zi);
      s.z_ji.swap(zj);
      s.u_ij += xi - s.z_ij;
      s.u_ji += xj - s.z_ji;
      primal_sq += (xi - s.z_ij).squaredNorm() + (xj - s.z_ji).squaredNorm();
      z_sq += s.z_ij.squaredNorm() + s.z_ji.squaredNorm();
      u_sq += s.u_ij.squaredNorm() + s.u_ji.squaredNorm();
    }

    double x_sq = 0.0;
    for (const Vector& xi : x) x_sq += xi.squaredNorm();
    const double primal = std::sqrt(primal_sq);
    const double dual = rho * std::sqrt(dual_sq);
    if (!std::isfinite(primal) || !std::isfinite(dual) || !std::isfinite(x_sq) ||
        !std::isfinite(u_sq))
      throw DivergenceError(iter, "ADMM produced a non-finite iterate at iteration " +
                                      std::to_string(iter));
    sol.primal_residuals.push_back(primal);
    sol.dual_residuals.push_back(dual);
    sol.iterations = iter;

    const double eps_pri =
        dim_scale * config.eps_abs + config.eps_rel * std::max(std::sqrt(x_sq), std::sqrt(z_sq));
    const double eps_dual = dim_scale * config.eps_abs + config.eps_rel * rho * std::sqrt(u_sq);
    if (primal <= eps_pri && dual <= eps_dual) {
      sol.converged = true;
      break;
    }
  }

  sol.objective = network_objective(graph, x, config.lambda, config.alpha, config.mu);
  return sol;
}

}  // namespace netenet
