#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netenet/aft.hpp"
#include "netenet/cluster.hpp"
#include "netenet/csv.hpp"
#include "netenet/errors.hpp"
#include "netenet/graph.hpp"
#include "netenet/path.hpp"

namespace netenet::io {

struct IngestResult {
  std::vector<SurvivalRecord> records;  // sorted by patient id
  std::vector<std::string> gene_names;
  std::size_t dropped = 0;  // unmatched or incomplete rows, from either file
};

struct IngestOptions {
  // Survival data needs positive times and 0/1 event flags; plain regression
  // responses (e.g. the synthetic benchmark) may be any finite value.
  bool require_positive_time = true;
};

/// Inner join of an expression table (patient_id + one column per gene) with
/// a clinical table (patient_id, survival_months, censored, pack_years, stage).
/// `censored` holds the event indicator: 1 = death observed, 0 = censored.
inline IngestResult ingest(const csv::Table& expression, const csv::Table& clinical,
                           const IngestOptions& opts = {}) {
  const std::size_t expr_id = expression.require("patient_id");
  const std::size_t cid = clinical.require("patient_id");
  const std::size_t c_time = clinical.require("survival_months");
  const std::size_t c_event = clinical.require("censored");
  const std::size_t c_exposure = clinical.require("pack_years");
  const std::size_t c_stage = clinical.require("stage");

  IngestResult out;
  std::vector<std::size_t> gene_cols;
  for (std::size_t c = 0; c < expression.header.size(); ++c) {
    if (c == expr_id) continue;
    gene_cols.push_back(c);
    out.gene_names.push_back(expression.header[c]);
  }

  std::map<std::string, std::size_t> expr_rows;
  for (std::size_t r = 0; r < expression.rows.size(); ++r) {
    if (!expr_rows.emplace(expression.rows[r][expr_id], r).second)
      throw SchemaError(expression.source + ": duplicate patient_id '" + expression.rows[r][expr_id] + "'");
  }

  std::map<std::string, bool> seen_clinical;
  for (std::size_t r = 0; r < clinical.rows.size(); ++r) {
    const auto& row = clinical.rows[r];
    const std::string& id = row[cid];
    if (!seen_clinical.emplace(id, true).second)
      throw SchemaError(clinical.source + ": duplicate patient_id '" + id + "'");
    auto it = expr_rows.find(id);
    if (it == expr_rows.end() || csv::is_missing(row[c_time]) || csv::is_missing(row[c_exposure])) {
      ++out.dropped;
      continue;
    }
    SurvivalRecord rec;
    rec.id = id;
    rec.time = csv::to_double(clinical, r, c_time);
    rec.exposure = csv::to_double(clinical, r, c_exposure);
    const double event = csv::is_missing(row[c_event]) ? 1.0 : csv::to_double(clinical, r, c_event);
    if (event != 0.0 && event != 1.0)
      throw ParseError(r + 1, c_event + 1, clinical.source + ": censored must be 0 or 1 at row " +
                                               std::to_string(r + 1));
    rec.event = static_cast<int>(event);
    if (!std::isfinite(rec.time) || (opts.require_positive_time && rec.time <= 0.0))
      throw ParseError(r + 1, c_time + 1, clinical.source + ": invalid survival_months at row " +
                                              std::to_string(r + 1));
    if (!std::isfinite(rec.exposure) || rec.exposure < 0.0)
      throw ParseError(r + 1, c_exposure + 1, clinical.source + ": pack_years must be >= 0 at row " +
                                                  std::to_string(r + 1));
    if (!csv::is_missing(row[c_stage])) rec.stage = static_cast<int>(csv::to_double(clinical, r, c_stage));
    rec.covariates.resize(static_cast<Eigen::Index>(gene_cols.size()));
    for (std::size_t g = 0; g < gene_cols.size(); ++g)
      rec.covariates[static_cast<Eigen::Index>(g)] = csv::to_double(expression, it->second, gene_cols[g]);
    out.records.push_back(std::move(rec));
  }
  for (const auto& [id, row] : expr_rows)
    if (!seen_clinical.count(id)) ++out.dropped;
  std::sort(out.records.begin(), out.records.end(),
            [](const SurvivalRecord& a, const SurvivalRecord& b) { return a.id < b.id; });
  return out;
}

inline IngestResult ingest(const std::string& expression_path, const std::string& clinical_path,
                           const IngestOptions& opts = {}) {
  return ingest(csv::read(expression_path), csv::read(clinical_path), opts);
}

// ---------------------------------------------------------------------------
// Writers. Every table is plain CSV with a header row.

inline void write_expression(std::ostream& out, const std::vector<SurvivalRecord>& records,
                             const std::vector<std::string>& gene_names) {
  csv::Writer w(out);
  std::vector<std::string> header{"patient_id"};
  header.insert(header.end(), gene_names.begin(), gene_names.end());
  w.row(header);
  for (const auto& r : records) {
    std::vector<std::string> cells{r.id};
    for (Eigen::Index j = 0; j < r.covariates.size(); ++j) cells.push_back(csv::format(r.covariates[j]));
    w.row(cells);
  }
}

inline void write_clinical(std::ostream& out, const std::vector<SurvivalRecord>& records) {
  csv::Writer w(out);
  w.row("patient_id", "survival_months", "censored", "pack_years", "stage");
  for (const auto& r : records)
    w.row(r.id, r.time, r.event, r.exposure, r.stage ? std::to_string(*r.stage) : std::string());
}

/// Edges by patient id.
inline void write_edges(std::ostream& out, const ProblemGraph& graph, const std::vector<std::string>& ids) {
  csv::Writer w(out);
  w.row("node_a", "node_b", "weight");
  for (const Edge& e : graph.edges()) w.row(ids.at(e.a), ids.at(e.b), e.weight);
}

struct NamedEdge {
  std::string a, b;
  double weight = 1.0;
};

inline std::vector<NamedEdge> read_edges(const csv::Table& t) {
  const auto ca = t.require("node_a");
  const auto cb = t.require("node_b");
  const int cw = t.find("weight");
  std::vector<NamedEdge> edges;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    edges.push_back({t.rows[r][ca], t.rows[r][cb],
                     cw < 0 ? 1.0 : csv::to_double(t, r, static_cast<std::size_t>(cw))});
  return edges;
}

/// Node x coefficient matrix, one row per node.
inline void write_coefficients(std::ostream& out, const std::vector<std::string>& ids,
                               const std::vector<std::string>& feature_names,
                               const std::vector<Vector>& coefficients) {
  csv::Writer w(out);
  std::vector<std::string> header{"node_id"};
  header.insert(header.end(), feature_names.begin(), feature_names.end());
  w.row(header);
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    std::vector<std::string> cells{ids.at(i)};
    for (Eigen::Index j = 0; j < coefficients[i].size(); ++j) cells.push_back(csv::format(coefficients[i][j]));
    w.row(cells);
  }
}

struct CoefficientTable {
  std::vector<std::string> ids;
  std::vector<std::string> feature_names;
  std::vector<Vector> coefficients;
};

inline CoefficientTable read_coefficients(const csv::Table& t) {
  const auto cid = t.require("node_id");
  CoefficientTable out;
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (c != cid) out.feature_names.push_back(t.header[c]);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out.ids.push_back(t.rows[r][cid]);
    Vector x(static_cast<Eigen::Index>(out.feature_names.size()));
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < t.header.size(); ++c)
      if (c != cid) x[j++] = csv::to_double(t, r, c);
    out.coefficients.push_back(std::move(x));
  }
  return out;
}

inline void write_path(std::ostream& out, const PathResult& path, const std::vector<std::string>& ids) {
  csv::Writer w(out);
  w.row("alpha", "lambda", "node_id", "coefficient", "value");
  for (const PathEntry& e : path.entries)
    for (std::size_t i = 0; i < e.solution.coefficients.size(); ++i)
      for (Eigen::Index j = 0; j < e.solution.coefficients[i].size(); ++j)
        w.row(e.alpha, e.lambda, ids.at(i), static_cast<long>(j), e.solution.coefficients[i][j]);
}

inline void write_scores(std::ostream& out, const PathResult& path) {
  csv::Writer w(out);
  w.row("alpha", "lambda", "cv_score", "K", "aic");
  for (const PathEntry& e : path.entries) w.row(e.alpha, e.lambda, e.cv_score, e.k_nonzero, e.aic);
}

struct PredictionRow {
  std::string id;
  double predicted = 0.0;
  std::optional<double> actual;
};

inline void write_predictions(std::ostream& out, const std::vector<PredictionRow>& rows) {
  csv::Writer w(out);
  w.row("patient_id", "predicted", "actual");
  for (const auto& r : rows) w.row(r.id, r.predicted, r.actual ? csv::format(*r.actual) : std::string());
}

inline void write_clusters(std::ostream& out, const ClusterAssignment& a, const std::vector<std::string>& ids) {
  csv::Writer w(out);
  w.row("node_id", "cluster");
  for (std::size_t i = 0; i < a.labels.size(); ++i) w.row(ids.at(i), a.labels[i]);
}

inline std::map<std::string, int> read_clusters(const csv::Table& t) {
  const auto cid = t.require("node_id");
  const auto cc = t.require("cluster");
  std::map<std::string, int> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out[t.rows[r][cid]] = static_cast<int>(csv::to_double(t, r, cc));
  return out;
}

inline void write_enrichment(std::ostream& out, const EnrichmentTable& table, double level = 0.05) {
  csv::Writer w(out);
  w.row("cluster", "stage", "count", "p_value", "significant");
  for (const auto& r : table.rows) w.row(r.cluster, r.stage, r.count, r.p_value, r.significant(level) ? 1 : 0);
}

}  // namespace netenet::io
