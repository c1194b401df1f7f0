#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netenet/errors.hpp"
#include "netenet/graph.hpp"

namespace netenet {

struct SurvivalRecord {
  std::string id;
  double time = 0.0;  // survival months
  int event = 1;      // 1 = death observed, 0 = censored
  Vector covariates;
  double exposure = 0.0;
  std::optional<int> stage;
};

namespace detail {

// Ascending time; on ties events precede censored observations.
inline bool survival_before(const SurvivalRecord& x, const SurvivalRecord& y) {
  if (x.time != y.time) return x.time < y.time;
  return x.event > y.event;
}

}  // namespace detail

inline void sort_records(std::vector<SurvivalRecord>& records) {
  std::stable_sort(records.begin(), records.end(), detail::survival_before);
}

inline bool records_sorted(const std::vector<SurvivalRecord>& records) {
  for (std::size_t i = 1; i < records.size(); ++i)
    if (detail::survival_before(records[i], records[i - 1])) return false;
  return true;
}

/// Kaplan-Meier jump (Stute) weights of time-ordered records:
///   w_i = d_i/(n-i+1) * prod_{j<i} ((n-j)/(n-j+1))^{d_j}.
inline Vector km_weights(const std::vector<SurvivalRecord>& records) {
  if (!records_sorted(records))
    throw InvalidInputError("km_weights: records must be sorted by time, events first on ties");
  const std::size_t n = records.size();
  Vector w(static_cast<Eigen::Index>(n));
  double survival = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records[i];
    if (r.event != 0 && r.event != 1) throw InvalidInputError("km_weights: event indicator must be 0/1");
    const double remaining = static_cast<double>(n - i);  // n - i + 1 in 1-based indexing
    w[static_cast<Eigen::Index>(i)] = r.event * survival / remaining;
    if (r.event == 1) survival *= (remaining - 1.0) / remaining;
  }
  return w;
}

struct StuteTransform {
  Matrix design;     // rows sqrt(n w_i) (X_i - weighted mean)
  Vector response;   // sqrt(n w_i) (Y_i - weighted mean)
  Vector row_scale;  // sqrt(n w_i)
  Vector covariate_mean;
  double response_mean = 0.0;
};

/// Weighted centring and rescaling of time-ordered records. Responses are
/// the survival times as given; pass log times in `records` for a log-AFT.
inline StuteTransform stute_transform(const std::vector<SurvivalRecord>& records, const Vector& weights) {
  const auto n = static_cast<Eigen::Index>(records.size());
  if (weights.size() != n) throw InvalidInputError("stute_transform: weight count mismatch");
  if (n == 0) throw DegenerateDataError("stute_transform: no records");
  const double total = weights.sum();
  if (!(total > 0.0)) throw DegenerateDataError("stute_transform: all weights are zero");
  const Eigen::Index p = records.front().covariates.size();

  StuteTransform out;
  out.covariate_mean = Vector::Zero(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    if (r.covariates.size() != p) throw InvalidInputError("stute_transform: covariate length mismatch");
    out.covariate_mean += weights[i] * r.covariates;
    out.response_mean += weights[i] * r.time;
  }
  out.covariate_mean /= total;
  out.response_mean /= total;

  out.design.resize(n, p);
  out.response.resize(n);
  out.row_scale = (static_cast<double>(n) * weights.array()).sqrt();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    out.design.row(i) = out.row_scale[i] * (r.covariates - out.covariate_mean).transpose();
    out.response[i] = out.row_scale[i] * (r.time - out.response_mean);
  }
  return out;
}

/// The k columns of X most correlated (in absolute Pearson value) with y,
/// best first; ties go to the lower index and constant columns score 0.
inline std::vector<int> screen_top_genes(const Matrix& x, const Vector& y, int k) {
  if (x.rows() != y.size()) throw InvalidInputError("screen_top_genes: row count mismatch");
  if (k < 0 || k > x.cols()) throw InvalidInputError("screen_top_genes: k must lie in [0, p]");
  const Vector yc = y.array() - y.mean();
  const double ynorm = yc.norm();
  std::vector<double> score(static_cast<std::size_t>(x.cols()), 0.0);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Vector xc = x.col(j).array() - x.col(j).mean();
    const double xnorm = xc.norm();
    if (xnorm > 0.0 && ynorm > 0.0) score[static_cast<std::size_t>(j)] = std::abs(xc.dot(yc) / (xnorm * ynorm));
  }
  std::vector<int> idx(score.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
  });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace netenet
