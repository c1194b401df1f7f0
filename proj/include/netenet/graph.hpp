#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "netenet/errors.hpp"

namespace netenet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Local data held by one node: a design block, its response and a scalar
/// exposure used by the inverse-difference kernel.
struct NodeData {
  int node_id = 0;
  Matrix design;
  Vector response;
  double exposure = 0.0;

  Eigen::Index num_features() const { return design.cols(); }
};

struct Edge {
  int a = 0;
  int b = 0;
  double weight = 1.0;
};

struct Incidence {
  int neighbor = 0;
  std::size_t edge = 0;
};

/// Undirected weighted graph whose nodes carry regression data.
///
/// Node ids must equal their position in the node list. Edges are stored
/// with a < b and at most once per unordered pair.
class ProblemGraph {
 public:
  ProblemGraph() = default;

  ProblemGraph(std::vector<NodeData> nodes, std::vector<Edge> edges)
      : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    validate_nodes();
    std::map<std::pair<int, int>, std::size_t> seen;
    adjacency_.assign(nodes_.size(), {});
    const int n = static_cast<int>(nodes_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      Edge& edge = edges_[e];
      if (edge.a == edge.b)
        throw InvalidInputError("self-loop at node " + std::to_string(edge.a));
      if (edge.a < 0 || edge.b < 0 || edge.a >= n || edge.b >= n)
        throw InvalidInputError("edge endpoint out of range");
      if (!(edge.weight > 0.0) || !std::isfinite(edge.weight))
        throw InvalidInputError("edge weight must be positive and finite");
      if (edge.a > edge.b) std::swap(edge.a, edge.b);
      if (!seen.emplace(std::pair{edge.a, edge.b}, e).second)
        throw InvalidInputError("duplicate edge (" + std::to_string(edge.a) + "," +
                                std::to_string(edge.b) + ")");
      adjacency_[edge.a].push_back({edge.b, e});
      adjacency_[edge.b].push_back({edge.a, e});
    }
  }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  Eigen::Index num_features() const { return nodes_.empty() ? 0 : nodes_.front().num_features(); }

  const std::vector<NodeData>& nodes() const { return nodes_; }
  const NodeData& node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Incidence>& neighbors(std::size_t i) const { return adjacency_.at(i); }
  std::size_t degree(std::size_t i) const { return adjacency_.at(i).size(); }

  bool has_edge(int a, int b) const {
    for (const auto& inc : adjacency_.at(a))
      if (inc.neighbor == b) return true;
    return false;
  }

  /// Connected component id per node, numbered in order of first appearance.
  std::vector<int> components() const {
    std::vector<int> comp(nodes_.size(), -1);
    int next = 0;
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
      if (comp[s] >= 0) continue;
      std::vector<std::size_t> stack{s};
      comp[s] = next;
      while (!stack.empty()) {
        std::size_t v = stack.back();
        stack.pop_back();
        for (const auto& inc : adjacency_[v]) {
          if (comp[inc.neighbor] < 0) {
            comp[inc.neighbor] = next;
            stack.push_back(inc.neighbor);
          }
        }
      }
      ++next;
    }
    return comp;
  }

  bool connected() const {
    auto comp = components();
    return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
  }

 private:
  void validate_nodes() const {
    Eigen::Index p = -1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const NodeData& nd = nodes_[i];
      if (nd.node_id != static_cast<int>(i))
        throw InvalidInputError("node id " + std::to_string(nd.node_id) + " at position " +
                                std::to_string(i));
      if (nd.design.rows() != nd.response.size())
        throw InvalidInputError("node " + std::to_string(i) +
                                ": design rows differ from response length");
      if (p < 0) p = nd.design.cols();
      if (nd.design.cols() != p)
        throw InvalidInputError("node " + std::to_string(i) + ": feature count mismatch");
      if (!std::isfinite(nd.exposure) || nd.exposure < 0.0)
        throw InvalidInputError("node " + std::to_string(i) + ": exposure must be finite and >= 0");
      if (!nd.design.allFinite() || !nd.response.allFinite())
        throw InvalidInputError("node " + std::to_string(i) + ": non-finite data");
    }
  }

  std::vector<NodeData> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
};

// ---------------------------------------------------------------------------
// Similarity kernels

enum class KernelKind { Euclidean, Correlation, InverseExposure, Diffusion };

inline std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Euclidean: return "euclidean";
    case KernelKind::Correlation: return "correlation";
    case KernelKind::InverseExposure: return "inverse_exposure";
    case KernelKind::Diffusion: return "diffusion";
  }
  return "unknown";
}

inline KernelKind parse_kernel(const std::string& name) {
  if (name == "euclidean") return KernelKind::Euclidean;
  if (name == "correlation") return KernelKind::Correlation;
  if (name == "inverse_exposure") return KernelKind::InverseExposure;
  if (name == "diffusion") return KernelKind::Diffusion;
  throw InvalidInputError("unknown kernel '" + name + "'");
}

struct KernelOptions {
  double w_cap = 1e3;     // cap for the inverse-difference kernel
  double floor = 1e-6;    // distance offset / correlation floor
  int diffusion_steps = 1;
  double bandwidth = 0.0;  // <= 0 selects the median pairwise distance
};

/// 1/|w_i - w_j|, capped at w_cap when the difference is below 1/w_cap.
inline double inverse_exposure_weight(double wi, double wj, double w_cap = 1e3) {
  if (!std::isfinite(wi) || !std::isfinite(wj))
    throw InvalidInputError("inverse_exposure: non-finite exposure");
  if (!(w_cap > 0.0)) throw InvalidInputError("inverse_exposure: w_cap must be positive");
  const double diff = std::abs(wi - wj);
  if (diff < 1.0 / w_cap) return w_cap;
  return 1.0 / diff;
}

namespace detail {

inline double pearson(const Vector& x, const Vector& y) {
  const double mx = x.mean();
  const double my = y.mean();
  const Vector cx = x.array() - mx;
  const Vector cy = y.array() - my;
  const double sx = cx.norm();
  const double sy = cy.norm();
  if (sx == 0.0 || sy == 0.0) return std::nan("");
  return std::clamp(cx.dot(cy) / (sx * sy), -1.0, 1.0);
}

}  // namespace detail

/// Pairwise similarity for the point-wise kernels. The diffusion kernel needs
/// the whole point set; use diffusion_weight or DiffusionMap for it.
inline double kernel_weight(KernelKind kind, const Vector& fi, const Vector& fj,
                            const KernelOptions& opts = {}) {
  if (fi.size() != fj.size()) throw InvalidInputError("kernel_weight: length mismatch");
  if (!fi.allFinite() || !fj.allFinite()) throw InvalidInputError("kernel_weight: non-finite input");
  switch (kind) {
    case KernelKind::InverseExposure:
      if (fi.size() != 1) throw InvalidInputError("inverse_exposure expects scalar exposures");
      return inverse_exposure_weight(fi[0], fj[0], opts.w_cap);
    case KernelKind::Euclidean:
      return 1.0 / ((fi - fj).norm() + opts.floor);
    case KernelKind::Correlation: {
      const double r = detail::pearson(fi, fj);
      if (std::isnan(r)) throw DegenerateKernelError("correlation kernel on a constant vector");
      return std::max((1.0 + r) / 2.0, opts.floor);
    }
    case KernelKind::Diffusion:
      throw InvalidInputError("diffusion kernel needs the full point set");
  }
  throw InvalidInputError("unknown kernel");
}

inline double median_pairwise_distance(const Matrix& points) {
  std::vector<double> d;
  const Eigen::Index n = points.rows();
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d.push_back((points.row(i) - points.row(j)).norm());
  if (d.empty()) return 0.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double m = *mid;
  if (d.size() % 2 == 0) {
    m = (m + *std::max_element(d.begin(), mid)) / 2.0;
  }
  return m;
}

/// Diffusion-map embedding of a point set (rows of `points`).
///
/// Gaussian affinities exp(-d^2 / bandwidth^2) are normalised into a
/// row-stochastic transition matrix P = D^-1 K. Its spectrum is obtained from
/// the symmetric conjugate D^-1/2 K D^-1/2, and the t-step coordinates are
/// lambda_k^t psi_k with psi_k normalised in the stationary measure.
class DiffusionMap {
 public:
  DiffusionMap(const Matrix& points, int steps, double bandwidth) {
    if (steps < 1) throw InvalidInputError("diffusion: step count must be >= 1");
    if (!points.allFinite()) throw InvalidInputError("diffusion: non-finite input");
    const Eigen::Index n = points.rows();
    if (n < 1) throw InvalidInputError("diffusion: empty point set");
    if (bandwidth <= 0.0) bandwidth = median_pairwise_distance(points);
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
      throw DegenerateKernelError("diffusion: all points identical (singular kernel)");
    bool all_same = true;
    for (Eigen::Index i = 1; i < n && all_same; ++i)
      all_same = (points.row(i) - points.row(0)).squaredNorm() == 0.0;
    if (all_same) throw DegenerateKernelError("diffusion: all points identical (singular kernel)");

    Matrix kernel(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        kernel(i, j) = std::exp(-(points.row(i) - points.row(j)).squaredNorm() /
                                (bandwidth * bandwidth));
    const Vector deg = kernel.rowwise().sum();
    const double volume = deg.sum();
    const Vector inv_sqrt = deg.array().rsqrt();
    const Matrix sym = inv_sqrt.asDiagonal() * kernel * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    if (eig.info() != Eigen::Success) throw DegenerateKernelError("diffusion: eigensolver failed");
    // psi_k = sqrt(volume) D^-1/2 v_k, so that sum_l pi_l psi_k(l)^2 = 1.
    Matrix psi = std::sqrt(volume) * inv_sqrt.asDiagonal() * eig.eigenvectors();
    Vector scale = eig.eigenvalues().array().pow(static_cast<double>(steps));
    coords_ = psi * scale.asDiagonal();
  }

  double distance(Eigen::Index i, Eigen::Index j) const {
    return (coords_.row(i) - coords_.row(j)).norm();
  }

  Eigen::Index size() const { return coords_.rows(); }

 private:
  Matrix coords_;
};

/// 1/(diffusion distance + floor) between rows i and j of `features_all`.
inline double diffusion_weight(const Matrix& features_all, Eigen::Index i, Eigen::Index j, int steps,
                               double bandwidth, double floor = 1e-6) {
  if (!(bandwidth > 0.0)) throw InvalidInputError("diffusion: bandwidth must be positive");
  if (i < 0 || j < 0 || i >= features_all.rows() || j >= features_all.rows())
    throw InvalidInputError("diffusion: node index out of range");
  DiffusionMap map(features_all, steps, bandwidth);
  return 1.0 / (map.distance(i, j) + floor);
}

/// Per-node feature vectors used by the kernels: exposure for the
/// inverse-difference kernel, design column means otherwise.
inline Matrix node_features(const std::vector<NodeData>& nodes, KernelKind kind) {
  if (nodes.empty()) return Matrix(0, 0);
  if (kind == KernelKind::InverseExposure) {
    Matrix f(static_cast<Eigen::Index>(nodes.size()), 1);
    for (std::size_t i = 0; i < nodes.size(); ++i) f(static_cast<Eigen::Index>(i), 0) = nodes[i].exposure;
    return f;
  }
  Matrix f(static_cast<Eigen::Index>(nodes.size()), nodes.front().design.cols());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].design.rows() == 0) throw InvalidInputError("node without observations");
    f.row(static_cast<Eigen::Index>(i)) = nodes[i].design.colwise().mean();
  }
  return f;
}

/// Full symmetric weight matrix for `features` (rows are nodes). Diagonal is 0.
inline Matrix kernel_matrix(const Matrix& features, KernelKind kind, const KernelOptions& opts = {}) {
  const Eigen::Index n = features.rows();
  Matrix w = Matrix::Zero(n, n);
  if (kind == KernelKind::Diffusion) {
    DiffusionMap map(features, opts.diffusion_steps, opts.bandwidth);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) w(i, j) = w(j, i) = 1.0 / (map.distance(i, j) + opts.floor);
    return w;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      w(i, j) = w(j, i) = kernel_weight(kind, features.row(i).transpose(), features.row(j).transpose(), opts);
  return w;
}

/// Symmetric k-nearest-neighbour graph: every node keeps its k
/// largest-weight peers (ties by lower id), then edges are united.
inline ProblemGraph build_knn_graph(std::vector<NodeData> nodes, const Matrix& features,
                                    KernelKind kind, int k, const KernelOptions& opts = {}) {
  const int n = static_cast<int>(nodes.size());
  if (n < 2) throw InvalidInputError("build_knn_graph: need at least 2 nodes");
  if (k < 1 || k >= n) throw InvalidInputError("build_knn_graph: k must satisfy 1 <= k < n");
  if (features.rows() != n) throw InvalidInputError("build_knn_graph: feature rows != node count");
  const Matrix w = kernel_matrix(features, kind, opts);

  std::map<std::pair<int, int>, double> chosen;
  std::vector<int> order;
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int x, int y) {
      if (w(i, x) != w(i, y)) return w(i, x) > w(i, y);
      return x < y;
    });
    for (int r = 0; r < k; ++r) {
      const int j = order[static_cast<std::size_t>(r)];
      chosen[{std::min(i, j), std::max(i, j)}] = w(i, j);
    }
  }
  std::vector<Edge> edges;
  edges.reserve(chosen.size());
  for (const auto& [key, weight] : chosen) edges.push_back({key.first, key.second, weight});
  return ProblemGraph(std::move(nodes), std::move(edges));
}

inline ProblemGraph build_knn_graph(std::vector<NodeData> nodes, KernelKind kind, int k,
                                    const KernelOptions& opts = {}) {
  if (nodes.size() < 2) throw InvalidInputError("build_knn_graph: need at least 2 nodes");
  Matrix features = node_features(nodes, kind);
  return build_knn_graph(std::move(nodes), features, kind, k, opts);
}

}  // namespace netenet
