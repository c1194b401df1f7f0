#pragma once

#include <random>
#include <utility>
#include <vector>

#include "netenet/graph.hpp"
#include "support/oracles.hpp"

namespace fixtures {

/// Connected random problem: a spanning path plus extra edges with the given
/// probability, Gaussian designs of `rows` x `p`, weights in [0.5, 1.5].
inline netenet::ProblemGraph random_graph(int n, int p, int rows, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<netenet::NodeData> nodes;
  for (int i = 0; i < n; ++i) {
    netenet::NodeData nd{i, netenet::Matrix(rows, p), netenet::Vector(rows), 10.0 * u(rng)};
    for (Eigen::Index k = 0; k < nd.design.size(); ++k) nd.design.data()[k] = g(rng);
    for (int r = 0; r < rows; ++r) nd.response[r] = g(rng) + (i < n / 2 ? 2.0 : -2.0);
    nodes.push_back(std::move(nd));
  }
  std::vector<netenet::Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 0.5 + u(rng)});
  for (int i = 0; i < n; ++i)
    for (int j = i + 2; j < n; ++j)
      if (u(rng) < density) edges.push_back({i, j, 0.5 + u(rng)});
  return netenet::ProblemGraph(std::move(nodes), std::move(edges));
}

/// All node rows stacked into one regression problem.
inline std::pair<netenet::Matrix, netenet::Vector> stack(const netenet::ProblemGraph& g) {
  Eigen::Index rows = 0;
  for (const auto& nd : g.nodes()) rows += nd.design.rows();
  netenet::Matrix x(rows, static_cast<Eigen::Index>(g.num_features()));
  netenet::Vector y(rows);
  Eigen::Index at = 0;
  for (const auto& nd : g.nodes()) {
    x.middleRows(at, nd.design.rows()) = nd.design;
    y.segment(at, nd.design.rows()) = nd.response;
    at += nd.design.rows();
  }
  return {x, y};
}

inline oracle::SimpleGraph to_simple(const netenet::ProblemGraph& g) {
  oracle::SimpleGraph s;
  for (const auto& nd : g.nodes()) {
    s.designs.push_back(nd.design);
    s.responses.push_back(nd.response);
  }
  for (const auto& e : g.edges()) {
    s.edges.push_back({e.a, e.b});
    s.weights.push_back(e.weight);
  }
  return s;
}

}  // namespace fixtures
