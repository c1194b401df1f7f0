#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "netenet/errors.hpp"

namespace netenet {

/// Componentwise sign(v) * max(|v| - t, 0).
inline Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  if (!(t >= 0.0)) throw InvalidInputError("soft_threshold: threshold must be >= 0");
  return v.unaryExpr([t](double x) {
    const double m = std::abs(x) - t;
    return m > 0.0 ? std::copysign(m, x) : 0.0;
  });
}

/// Block shrinkage max(1 - t/||v||, 0) * v. The zero vector maps to zero.
inline Eigen::VectorXd group_shrink(const Eigen::VectorXd& v, double t) {
  if (!(t >= 0.0)) throw InvalidInputError("group_shrink: threshold must be >= 0");
  const double norm = v.norm();
  if (norm <= t || norm == 0.0) return Eigen::VectorXd::Zero(v.size());
  return (1.0 - t / norm) * v;
}

struct EdgeProxParams {
  double rho = 1.0;
  double c1 = 0.0;  // weight of ||z_i - z_j||_2
  double c2 = 0.0;  // weight of ||z_i - z_j||_1

  void validate() const {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidInputError("edge prox: rho must be > 0");
    if (!(c1 >= 0.0) || !std::isfinite(c1)) throw InvalidInputError("edge prox: c1 must be >= 0");
    if (!(c2 >= 0.0) || !std::isfinite(c2)) throw InvalidInputError("edge prox: c2 must be >= 0");
  }
};

/// Value of the edge subproblem
///   c1 ||zi - zj||_2 + c2 ||zi - zj||_1 + rho/2 (||zi - a||^2 + ||zj - b||^2).
inline double edge_objective(const Eigen::VectorXd& zi, const Eigen::VectorXd& zj,
                             const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                             const EdgeProxParams& p) {
  const Eigen::VectorXd d = zi - zj;
  return p.c1 * d.norm() + p.c2 * d.lpNorm<1>() +
         0.5 * p.rho * ((zi - a).squaredNorm() + (zj - b).squaredNorm());
}

/// Exact minimiser of edge_objective over (zi, zj).
///
/// With s = zi + zj and delta = zi - zj the objective separates into
/// rho/4 ||s - (a + b)||^2 and c1||delta||_2 + c2||delta||_1 + rho/4 ||delta - (a - b)||^2,
/// whose minimiser is the sparse-group prox: soft threshold at 2 c2/rho,
/// then block shrinkage at 2 c1/rho.
namespace detail {

// Allocation-free edge prox for the solver loop: `delta`, `zi` and `zj` must
// already have the length of `a` and must not alias the inputs.
inline void edge_prox_into(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double l1_threshold,
                           double l2_threshold, Eigen::VectorXd& delta, Eigen::VectorXd& zi,
                           Eigen::VectorXd& zj) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double m = std::abs(a[k] - b[k]) - l1_threshold;
    delta[k] = m > 0.0 ? std::copysign(m, a[k] - b[k]) : 0.0;
  }
  const double norm = delta.norm();
  if (norm <= l2_threshold || norm == 0.0)
    delta.setZero();
  else
    delta *= 1.0 - l2_threshold / norm;
  zi = 0.5 * (a + b + delta);
  zj = 0.5 * (a + b - delta);
}

}  // namespace detail

inline std::pair<Eigen::VectorXd, Eigen::VectorXd> edge_prox(const Eigen::VectorXd& a,
                                                             const Eigen::VectorXd& b,
                                                             const EdgeProxParams& params) {
  if (a.size() != b.size()) throw InvalidInputError("edge_prox: length mismatch");
  params.validate();
  Eigen::VectorXd delta(a.size()), zi(a.size()), zj(a.size());
  detail::edge_prox_into(a, b, 2.0 * params.c2 / params.rho, 2.0 * params.c1 / params.rho, delta, zi, zj);
  return {std::move(zi), std::move(zj)};
}

}  // namespace netenet
