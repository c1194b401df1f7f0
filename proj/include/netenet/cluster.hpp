#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "netenet/admm.hpp"
#include "netenet/errors.hpp"
#include "netenet/graph.hpp"

namespace netenet {

struct ClusterAssignment {
  std::vector<int> labels;  // 1-based, cluster 1 is the largest
  std::vector<int> sizes;   // sizes[c - 1] for cluster c

  int num_clusters() const { return static_cast<int>(sizes.size()); }
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

}  // namespace detail

/// Relabel arbitrary group ids into clusters 1..K ordered by decreasing size
/// (ties: the cluster holding the smallest node id comes first).
inline ClusterAssignment relabel_by_size(const std::vector<std::size_t>& group) {
  std::map<std::size_t, std::pair<int, std::size_t>> info;  // root -> (size, first node)
  for (std::size_t i = 0; i < group.size(); ++i) {
    auto [it, fresh] = info.try_emplace(group[i], 0, i);
    ++it->second.first;
  }
  std::vector<std::pair<std::size_t, std::pair<int, std::size_t>>> order(info.begin(), info.end());
  std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
    if (x.second.first != y.second.first) return x.second.first > y.second.first;
    return x.second.second < y.second.second;
  });
  std::map<std::size_t, int> label_of;
  ClusterAssignment out;
  for (std::size_t c = 0; c < order.size(); ++c) {
    label_of[order[c].first] = static_cast<int>(c) + 1;
    out.sizes.push_back(order[c].second.first);
  }
  out.labels.reserve(group.size());
  for (std::size_t g : group) out.labels.push_back(label_of[g]);
  return out;
}

/// Connected components of the subgraph keeping edges whose endpoint
/// coefficients agree to within `tol` in the max norm.
inline ClusterAssignment consensus_clusters(const ProblemGraph& graph, const std::vector<Vector>& coefficients,
                                            double tol = 1e-4) {
  if (coefficients.size() != graph.num_nodes())
    throw InvalidInputError("consensus_clusters: coefficient count != node count");
  if (!(tol >= 0.0)) throw InvalidInputError("consensus_clusters: tol must be >= 0");
  detail::DisjointSets sets(graph.num_nodes());
  for (const Edge& e : graph.edges()) {
    if ((coefficients[e.a] - coefficients[e.b]).lpNorm<Eigen::Infinity>() <= tol)
      sets.unite(static_cast<std::size_t>(e.a), static_cast<std::size_t>(e.b));
  }
  std::vector<std::size_t> root(graph.num_nodes());
  for (std::size_t i = 0; i < root.size(); ++i) root[i] = sets.find(i);
  return relabel_by_size(root);
}

inline ClusterAssignment consensus_clusters(const ProblemGraph& graph, const Solution& solution,
                                            double tol = 1e-4) {
  return consensus_clusters(graph, solution.coefficients, tol);
}

/// P[X >= m] for X hypergeometric: population N, M marked, n drawn.
///
/// Terms are built by the ratio recurrence in extended precision and
/// normalised by their own total, so no binomial coefficient is formed.
inline double hypergeometric_upper_tail(long population, long marked, long drawn, long observed) {
  if (population < 0 || marked < 0 || drawn < 0 || marked > population || drawn > population)
    throw InvalidInputError("hypergeometric: invalid urn parameters");
  const long lo = std::max(0L, drawn - (population - marked));
  const long hi = std::min(marked, drawn);
  if (observed <= lo) return 1.0;
  if (observed > hi) return 0.0;
  std::vector<long double> term(static_cast<std::size_t>(hi - lo + 1));
  term[0] = 1.0L;
  for (long x = lo; x < hi; ++x) {
    const long double num = static_cast<long double>(marked - x) * static_cast<long double>(drawn - x);
    const long double den =
        static_cast<long double>(x + 1) * static_cast<long double>(population - marked - drawn + x + 1);
    term[static_cast<std::size_t>(x - lo + 1)] = term[static_cast<std::size_t>(x - lo)] * num / den;
  }
  long double total = 0.0L, tail = 0.0L;
  for (long x = hi; x >= lo; --x) {
    total += term[static_cast<std::size_t>(x - lo)];
    if (x >= observed) tail += term[static_cast<std::size_t>(x - lo)];
  }
  return static_cast<double>(std::min(1.0L, tail / total));
}

struct EnrichmentRow {
  int cluster = 0;
  int stage = 0;
  int count = 0;
  double p_value = 1.0;
  bool significant(double level = 0.05) const { return p_value < level; }
};

struct EnrichmentTable {
  std::vector<EnrichmentRow> rows;
  std::vector<std::string> warnings;
};

/// One-sided hypergeometric over-representation test of every stage in every
/// cluster. Nodes without a stage label are left out of the population.
inline EnrichmentTable stage_enrichment(const ClusterAssignment& assignment,
                                        const std::vector<std::optional<int>>& stages) {
  if (stages.size() != assignment.labels.size())
    throw InvalidInputError("stage_enrichment: stage count != node count");
  EnrichmentTable table;
  std::map<int, long> stage_total;
  std::map<int, long> cluster_size;
  std::map<std::pair<int, int>, int> cell;
  long population = 0;
  std::size_t unlabeled = 0;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (!stages[i]) {
      ++unlabeled;
      continue;
    }
    ++population;
    ++stage_total[*stages[i]];
    ++cluster_size[assignment.labels[i]];
    ++cell[{assignment.labels[i], *stages[i]}];
  }
  if (unlabeled > 0)
    table.warnings.push_back(std::to_string(unlabeled) + " node(s) without a stage were excluded");
  for (int c = 1; c <= assignment.num_clusters(); ++c) {
    auto size_it = cluster_size.find(c);
    if (size_it == cluster_size.end()) {
      table.warnings.push_back("cluster " + std::to_string(c) + " has no staged nodes; skipped");
      continue;
    }
    for (const auto& [stage, total] : stage_total) {
      auto it = cell.find({c, stage});
      const int count = it == cell.end() ? 0 : it->second;
      table.rows.push_back(
          {c, stage, count, hypergeometric_upper_tail(population, total, size_it->second, count)});
    }
  }
  return table;
}

}  // namespace netenet
