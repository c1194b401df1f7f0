#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "netenet/aft.hpp"
#include "netenet/errors.hpp"
#include "netenet/graph.hpp"
#include "netenet/io.hpp"

namespace netenet {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded train/test split, stratified by stage (unstaged records form their
/// own stratum). Each stratum contributes round(train_frac * size) records to
/// the training side. Both index lists come back sorted.
inline Split split_records(const std::vector<SurvivalRecord>& records, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac <= 1.0)) throw InvalidInputError("train fraction must lie in (0,1]");
  std::map<int, std::vector<std::size_t>> strata;  // unstaged records use key INT_MIN
  for (std::size_t i = 0; i < records.size(); ++i)
    strata[records[i].stage.value_or(std::numeric_limits<int>::min())].push_back(i);
  std::mt19937_64 rng(seed);
  Split out;
  for (auto& [stage, members] : strata) {
    std::shuffle(members.begin(), members.end(), rng);
    const auto keep = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(members.size())));
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(keep));
    out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(keep), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

struct PrepareOptions {
  bool aft = true;        // Kaplan-Meier weighting and weighted centring
  bool intercept = true;  // append a per-node baseline column
  bool standardize = true;
  int top_genes = 100;    // screening keeps this many columns when fewer than p
};

/// Training nodes and holdout nodes in model space.
///
/// With `aft`, training rows are sqrt(n w_i)(x_i - xbar_w) and responses
/// sqrt(n w_i)(y_i - ybar_w); the intercept column carries sqrt(n w_i) so a
/// censored patient contributes an all-zero row. Holdout rows are centred by
/// the training weighted means without rescaling, so predictions live on the
/// centred survival scale.
struct PreparedData {
  std::vector<std::string> ids;
  std::vector<NodeData> nodes;
  std::vector<std::optional<int>> stages;
  std::vector<std::string> feature_names;  // columns of each design row
  std::vector<int> selected_genes;

  std::vector<std::string> test_ids;
  std::vector<NodeData> test_nodes;
  std::vector<bool> test_known;  // actual response observed (event, or no AFT)

  double response_mean = 0.0;  // training weighted mean, 0 without AFT
};

inline PreparedData prepare_data(const std::vector<SurvivalRecord>& records,
                                 const std::vector<std::string>& gene_names, const Split& split,
                                 const PrepareOptions& opts) {
  if (split.train.size() < 2) throw InvalidInputError("need at least 2 training records");
  std::vector<SurvivalRecord> train;
  for (std::size_t i : split.train) train.push_back(records.at(i));
  std::vector<SurvivalRecord> test;
  for (std::size_t i : split.test) test.push_back(records.at(i));
  const Eigen::Index p = train.front().covariates.size();

  if (opts.standardize) {
    Vector mean = Vector::Zero(p);
    for (const auto& r : train) mean += r.covariates;
    mean /= static_cast<double>(train.size());
    Vector sd = Vector::Zero(p);
    for (const auto& r : train) sd.array() += (r.covariates - mean).array().square();
    sd = (sd / static_cast<double>(train.size())).array().sqrt();
    for (Eigen::Index j = 0; j < p; ++j)
      if (sd[j] == 0.0) sd[j] = 1.0;
    auto apply = [&](SurvivalRecord& r) { r.covariates = (r.covariates - mean).cwiseQuotient(sd); };
    std::for_each(train.begin(), train.end(), apply);
    std::for_each(test.begin(), test.end(), apply);
  }

  PreparedData out;
  const auto n = static_cast<Eigen::Index>(train.size());
  Matrix design(n, p);
  Vector response(n);
  Vector row_scale = Vector::Ones(n);
  Vector covariate_mean = Vector::Zero(p);
  if (opts.aft) {
    sort_records(train);
    StuteTransform st = stute_transform(train, km_weights(train));
    design = st.design;
    response = st.response;
    row_scale = st.row_scale;
    covariate_mean = st.covariate_mean;
    out.response_mean = st.response_mean;
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      design.row(i) = train[static_cast<std::size_t>(i)].covariates.transpose();
      response[i] = train[static_cast<std::size_t>(i)].time;
    }
  }

  std::vector<int> keep(static_cast<std::size_t>(p));
  std::iota(keep.begin(), keep.end(), 0);
  if (opts.top_genes > 0 && opts.top_genes < p) {
    keep = screen_top_genes(design, response, opts.top_genes);
    std::sort(keep.begin(), keep.end());
  }
  out.selected_genes = keep;
  for (int j : keep) out.feature_names.push_back(gene_names.at(static_cast<std::size_t>(j)));
  if (opts.intercept) out.feature_names.push_back("intercept");
  const auto width = static_cast<Eigen::Index>(out.feature_names.size());

  auto select = [&](const Vector& row) {
    Vector v(width);
    for (std::size_t k = 0; k < keep.size(); ++k) v[static_cast<Eigen::Index>(k)] = row[keep[k]];
    return v;
  };

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& rec = train[static_cast<std::size_t>(i)];
    NodeData node;
    node.node_id = static_cast<int>(i);
    node.design.resize(1, width);
    Vector row = select(design.row(i).transpose());
    if (opts.intercept) row[width - 1] = row_scale[i];
    node.design.row(0) = row.transpose();
    node.response = Vector::Constant(1, response[i]);
    node.exposure = rec.exposure;
    out.ids.push_back(rec.id);
    out.stages.push_back(rec.stage);
    out.nodes.push_back(std::move(node));
  }

  for (std::size_t t = 0; t < test.size(); ++t) {
    const auto& rec = test[t];
    NodeData node;
    node.node_id = static_cast<int>(t);
    Vector row = select(rec.covariates - covariate_mean);
    if (opts.intercept) row[width - 1] = 1.0;
    node.design = row.transpose();
    node.response = Vector::Constant(1, rec.time - out.response_mean);
    node.exposure = rec.exposure;
    out.test_ids.push_back(rec.id);
    out.test_known.push_back(!opts.aft || rec.event == 1);
    out.test_nodes.push_back(std::move(node));
  }
  return out;
}

/// Design columns without the intercept, used as kernel features.
inline Matrix kernel_features(const PreparedData& data, KernelKind kind, bool intercept) {
  if (kind == KernelKind::InverseExposure) return node_features(data.nodes, kind);
  Matrix f = node_features(data.nodes, kind);
  return intercept ? Matrix(f.leftCols(f.cols() - 1)) : f;
}

/// Graph over the prepared training nodes, from explicit named edges (edges
/// touching nodes outside the training set are dropped) or by k-NN.
inline ProblemGraph build_graph(const PreparedData& data, const std::optional<std::vector<io::NamedEdge>>& edges,
                                KernelKind kind, int knn, bool intercept, const KernelOptions& kopts = {}) {
  if (edges) {
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < data.ids.size(); ++i) index[data.ids[i]] = static_cast<int>(i);
    std::vector<Edge> kept;
    for (const auto& e : *edges) {
      auto a = index.find(e.a);
      auto b = index.find(e.b);
      if (a == index.end() || b == index.end()) continue;
      kept.push_back({a->second, b->second, e.weight});
    }
    return ProblemGraph(data.nodes, std::move(kept));
  }
  const int k = std::min(knn, static_cast<int>(data.nodes.size()) - 1);
  return build_knn_graph(data.nodes, kernel_features(data, kind, intercept), kind, k, kopts);
}

inline double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInputError("correlation needs >= 2 paired values");
  Eigen::Map<const Vector> vx(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::Map<const Vector> vy(y.data(), static_cast<Eigen::Index>(y.size()));
  const Vector cx = vx.array() - vx.mean();
  const Vector cy = vy.array() - vy.mean();
  const double den = cx.norm() * cy.norm();
  if (den == 0.0) throw DegenerateDataError("correlation of a constant series");
  return cx.dot(cy) / den;
}

}  // namespace netenet
