#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "netenet/errors.hpp"
#include "netenet/graph.hpp"

namespace netenet {

/// Three-block synthetic benchmark: one observation per node, coefficients
/// shared within a block, and a link matrix that is dense inside blocks and
/// sparse across them.
struct SynthSpec {
  int n = 100;
  int p = 10;
  std::vector<int> block_sizes{33, 33, 34};
  double noise_scale = 0.1;
  double intra_density = 0.95;
  double global_density = 0.01;
  std::uint64_t seed = 1;
  // Block b draws exposures uniformly from [b * spacing, b * spacing + jitter].
  double exposure_spacing = 20.0;
  double exposure_jitter = 10.0;
  int max_block_retries = 100;

  void validate() const {
    if (block_sizes.size() != 3) throw InvalidInputError("synth: exactly three blocks are supported");
    if (std::accumulate(block_sizes.begin(), block_sizes.end(), 0) != n)
      throw InvalidInputError("synth: block sizes must sum to n");
    for (int s : block_sizes)
      if (s < 1) throw InvalidInputError("synth: block sizes must be positive");
    if (p < 6) throw InvalidInputError("synth: need at least 6 features");
    if (!(intra_density >= 0.0 && intra_density <= 1.0) ||
        !(global_density >= 0.0 && global_density <= 1.0))
      throw InvalidInputError("synth: densities must lie in [0,1]");
    if (!(noise_scale >= 0.0)) throw InvalidInputError("synth: noise_scale must be >= 0");
    if (!(exposure_spacing >= 0.0) || !(exposure_jitter >= 0.0))
      throw InvalidInputError("synth: exposure spacing/jitter must be >= 0");
  }
};

/// True coefficients of block 0, 1 or 2.
inline Vector synth_block_coefficients(int block, int p) {
  Vector beta = Vector::Zero(p);
  switch (block) {
    case 0: beta[1] = 2.0; beta[2] = 3.0; beta[3] = 2.0; break;
    case 1: beta[2] = 4.0; beta[3] = -6.0; beta[4] = -5.0; break;
    case 2: beta[3] = -5.0; beta[4] = 6.0; beta[5] = 3.0; break;
    default: throw InvalidInputError("synth: block index out of range");
  }
  return beta;
}

struct SynthData {
  std::vector<NodeData> nodes;
  std::vector<Vector> true_coefficients;
  std::vector<int> blocks;  // 0-based block per node
};

inline std::vector<int> synth_block_labels(const SynthSpec& spec) {
  std::vector<int> blocks;
  for (std::size_t b = 0; b < spec.block_sizes.size(); ++b)
    blocks.insert(blocks.end(), static_cast<std::size_t>(spec.block_sizes[b]), static_cast<int>(b));
  return blocks;
}

inline SynthData generate_data(const SynthSpec& spec) {
  spec.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32), 1u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> feature(-1.0, 1.0);
  std::uniform_real_distribution<double> jitter(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  SynthData out;
  out.blocks = synth_block_labels(spec);
  for (int i = 0; i < spec.n; ++i) {
    const int block = out.blocks[static_cast<std::size_t>(i)];
    NodeData node;
    node.node_id = i;
    node.design.resize(1, spec.p);
    for (int j = 0; j < spec.p; ++j) node.design(0, j) = feature(rng);
    const Vector beta = synth_block_coefficients(block, spec.p);
    node.response.resize(1);
    node.response[0] = node.design.row(0).dot(beta) + spec.noise_scale * noise(rng);
    node.exposure = spec.exposure_spacing * block + spec.exposure_jitter * jitter(rng);
    out.nodes.push_back(std::move(node));
    out.true_coefficients.push_back(beta);
  }
  return out;
}

struct BlockEdges {
  std::vector<Edge> edges;
  int retries = 0;  // redraws of disconnected dense blocks
};

namespace detail {

inline bool block_connected(const std::vector<std::vector<char>>& adj, int begin, int end) {
  if (end - begin <= 1) return true;
  std::vector<char> seen(static_cast<std::size_t>(end - begin), 0);
  std::vector<int> stack{begin};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u = begin; u < end; ++u) {
      if (adj[v][u] && !seen[static_cast<std::size_t>(u - begin)]) {
        seen[static_cast<std::size_t>(u - begin)] = 1;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == end - begin;
}

}  // namespace detail

/// Symmetric 0/1 link matrix: background density everywhere, then each
/// diagonal block overwritten at the intra-block density. A disconnected
/// block is redrawn (up to max_block_retries times).
inline BlockEdges generate_block_edges(const SynthSpec& spec) {
  spec.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32), 2u};
  std::mt19937_64 rng(seq);
  std::bernoulli_distribution background(spec.global_density);
  std::bernoulli_distribution dense(spec.intra_density);

  const int n = spec.n;
  std::vector<std::vector<char>> adj(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) adj[i][j] = adj[j][i] = background(rng) ? 1 : 0;

  BlockEdges out;
  int begin = 0;
  for (int size : spec.block_sizes) {
    const int end = begin + size;
    for (int attempt = 0;; ++attempt) {
      for (int i = begin; i < end; ++i)
        for (int j = i + 1; j < end; ++j) adj[i][j] = adj[j][i] = dense(rng) ? 1 : 0;
      if (spec.intra_density == 0.0 || detail::block_connected(adj, begin, end) ||
          attempt >= spec.max_block_retries)
        break;
      ++out.retries;
    }
    begin = end;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (adj[i][j]) out.edges.push_back({i, j, 1.0});
  return out;
}

inline ProblemGraph generate_block_graph(const SynthSpec& spec) {
  return ProblemGraph(generate_data(spec).nodes, generate_block_edges(spec).edges);
}

}  // namespace netenet
