#include <sstream>

#include <gtest/gtest.h>

#include "netenet/csv.hpp"
#include "netenet/io.hpp"
#include "netenet/pipeline.hpp"

using namespace netenet;

namespace {

csv::Table table(const std::string& text, const std::string& name = "t.csv") {
  std::istringstream in(text);
  return csv::parse(in, name);
}

const char* kExpression =
    "patient_id,g1,g2\n"
    "a,1.5,2\n"
    "b,-1,0.25\n"
    "c,3,4\n";

const char* kClinical =
    "patient_id,survival_months,censored,pack_years,stage\n"
    "a,10,1,20,1\n"
    "b,5,0,35.5,2\n"
    "c,7,1,0,\n";

}  // namespace

TEST(Csv, SplitsQuotedCells) {
  EXPECT_EQ(csv::split_line("a,\"b,c\",\"d\"\"e\""), (std::vector<std::string>{"a", "b,c", "d\"e"}));
  EXPECT_EQ(csv::split_line("x,,y\r"), (std::vector<std::string>{"x", "", "y"}));
}

TEST(Csv, ParseErrorsCarryLocation) {
  try {
    table("a,b\n1,2\n3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  auto t = table("a,b\n1,zz\n");
  try {
    csv::to_double(t, 0, 1);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos);
  }
  EXPECT_THROW(table(""), SchemaError);
}

TEST(Csv, FormatRoundTrips) {
  for (double v : {0.1, -1e-300, 123456789.125, 1.0 / 3.0}) {
    auto t = table("v\n" + csv::format(v) + "\n");
    EXPECT_EQ(csv::to_double(t, 0, 0), v);
  }
}

TEST(Ingest, ToyFiles) {
  auto r = io::ingest(table(kExpression, "expr.csv"), table(kClinical, "clin.csv"));
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.gene_names, (std::vector<std::string>{"g1", "g2"}));
  EXPECT_EQ(r.records[0].id, "a");
  EXPECT_EQ(r.records[0].covariates, (Vector(2) << 1.5, 2).finished());
  EXPECT_EQ(r.records[1].event, 0);
  EXPECT_EQ(r.records[1].exposure, 35.5);
  EXPECT_EQ(r.records[0].stage, 1);
  EXPECT_FALSE(r.records[2].stage.has_value());
  EXPECT_EQ(r.dropped, 0u);
}

TEST(Ingest, UnmatchedAndIncompleteRowsAreDropped) {
  auto clin = table(std::string(kClinical) + "d,4,1,3,1\ne,4,1,,1\n");
  auto expr = table(std::string(kExpression) + "e,0,0\n");
  auto r = io::ingest(expr, clin);
  EXPECT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.dropped, 2u);
}

TEST(Ingest, ShuffledOrderGivesSameRecords) {
  auto r1 = io::ingest(table(kExpression), table(kClinical));
  auto r2 = io::ingest(table("patient_id,g1,g2\nc,3,4\na,1.5,2\nb,-1,0.25\n"),
                       table("patient_id,survival_months,censored,pack_years,stage\nb,5,0,35.5,2\nc,7,1,0,\na,10,1,20,1\n"));
  ASSERT_EQ(r1.records.size(), r2.records.size());
  for (std::size_t i = 0; i < r1.records.size(); ++i) {
    EXPECT_EQ(r1.records[i].id, r2.records[i].id);
    EXPECT_EQ(r1.records[i].covariates, r2.records[i].covariates);
    EXPECT_EQ(r1.records[i].time, r2.records[i].time);
  }
}

TEST(Ingest, SchemaAndParseErrors) {
  try {
    io::ingest(table(kExpression), table("patient_id,survival_months,censored,stage\na,1,1,1\n", "clin.csv"));
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("pack_years"), std::string::npos);
  }
  try {
    io::ingest(table("patient_id,g1\na,oops\n", "expr.csv"), table(kClinical));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 1u);
    EXPECT_NE(std::string(e.what()).find("g1"), std::string::npos);
  }
  EXPECT_THROW(io::ingest(table(kExpression), table("patient_id,survival_months,censored,pack_years,stage\na,10,2,20,1\n")),
               ParseError);
  EXPECT_THROW(io::ingest(table(kExpression), table("patient_id,survival_months,censored,pack_years,stage\na,-1,1,20,1\n")),
               ParseError);
}

TEST(Writers, TablesReadBack) {
  auto r = io::ingest(table(kExpression), table(kClinical));
  std::ostringstream expr, clin;
  io::write_expression(expr, r.records, r.gene_names);
  io::write_clinical(clin, r.records);
  auto again = io::ingest(table(expr.str()), table(clin.str()));
  ASSERT_EQ(again.records.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(again.records[i].covariates, r.records[i].covariates);
    EXPECT_EQ(again.records[i].stage, r.records[i].stage);
    EXPECT_EQ(again.records[i].event, r.records[i].event);
  }

  std::vector<Vector> coefs{(Vector(2) << 0.1, -2).finished(), (Vector(2) << 1.0 / 3.0, 7).finished()};
  std::ostringstream co;
  io::write_coefficients(co, {"a", "b"}, {"g1", "g2"}, coefs);
  auto back = io::read_coefficients(table(co.str()));
  EXPECT_EQ(back.ids, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(back.coefficients[1], coefs[1]);

  std::vector<NodeData> nodes{{0, Matrix::Ones(1, 1), Vector::Ones(1), 0.0}, {1, Matrix::Ones(1, 1), Vector::Ones(1), 0.0}};
  ProblemGraph g(nodes, {{0, 1, 0.75}});
  std::ostringstream ed;
  io::write_edges(ed, g, {"a", "b"});
  auto edges = io::read_edges(table(ed.str()));
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0].a, "a");
  EXPECT_EQ(edges[0].weight, 0.75);

  std::ostringstream cl;
  io::write_clusters(cl, ClusterAssignment{{2, 1}, {1, 1}}, {"a", "b"});
  auto clusters = io::read_clusters(table(cl.str()));
  EXPECT_EQ(clusters.at("a"), 2);

  std::ostringstream pr;
  io::write_predictions(pr, {{"a", 1.5, 2.0}, {"b", -1.0, std::nullopt}});
  EXPECT_EQ(pr.str(), "patient_id,predicted,actual\na,1.5,2\nb,-1,\n");

  std::ostringstream en;
  EnrichmentTable et;
  et.rows.push_back({1, 2, 3, 0.01});
  io::write_enrichment(en, et);
  EXPECT_EQ(en.str(), "cluster,stage,count,p_value,significant\n1,2,3,0.01,1\n");
}

TEST(SplitRecords, StratifiedAndSeeded) {
  std::vector<SurvivalRecord> recs(50);
  for (int i = 0; i < 50; ++i) {
    recs[static_cast<std::size_t>(i)].id = std::to_string(i);
    if (i % 5 != 4) recs[static_cast<std::size_t>(i)].stage = i % 2;
  }
  auto a = split_records(recs, 0.8, 3);
  auto b = split_records(recs, 0.8, 3);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.train.size() + a.test.size(), 50u);
  int stage0 = 0, stage1 = 0, none = 0;
  for (std::size_t i : a.train) {
    if (!recs[i].stage) ++none;
    else (*recs[i].stage == 0 ? stage0 : stage1) += 1;
  }
  EXPECT_EQ(stage0, 16);
  EXPECT_EQ(stage1, 16);
  EXPECT_EQ(none, 8);
  EXPECT_NE(split_records(recs, 0.8, 4).train, a.train);
  EXPECT_THROW(split_records(recs, 0.0, 1), InvalidInputError);
}

TEST(PrepareData, AftRowsAndHoldout) {
  auto r = io::ingest(table(kExpression), table(kClinical));
  Split split{{0, 1, 2}, {}};
  PrepareOptions opts;
  opts.standardize = false;
  auto d = prepare_data(r.records, r.gene_names, split, opts);
  ASSERT_EQ(d.nodes.size(), 3u);
  EXPECT_EQ(d.feature_names.back(), "intercept");
  // b is censored, so its row carries no weight.
  const auto b = static_cast<std::size_t>(std::find(d.ids.begin(), d.ids.end(), "b") - d.ids.begin());
  EXPECT_EQ(d.nodes[b].design.norm(), 0.0);
  EXPECT_EQ(d.nodes[b].response[0], 0.0);
}

TEST(PearsonCorrelation, Fixtures) {
  EXPECT_NEAR(pearson_correlation({1, 2, 3}, {2, 4, 6}), 1.0, 1e-15);
  EXPECT_NEAR(pearson_correlation({1, 2, 3}, {3, 2, 1}), -1.0, 1e-15);
  EXPECT_THROW(pearson_correlation({1, 1}, {1, 2}), DegenerateDataError);
}
