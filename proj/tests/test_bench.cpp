#include <gtest/gtest.h>

#include <cmath>

#include "gbart/bench.hpp"
#include "gbart/errors.hpp"
#include "gbart/serialize.hpp"

using namespace gbart;

namespace {

McmcConfig short_chain() {
  McmcConfig c;
  c.ndpost = 60;
  c.burn_in = 30;
  return c;
}

GroupSearchConfig small_search() {
  GroupSearchConfig s;
  s.stage1_trees = 20;
  s.stage2_trees = 40;
  return s;
}

// Cross-validated MSE of predicting each held-out fold by its training mean.
double mean_predictor_mse(const Dataset& d, std::size_t folds, std::uint64_t seed) {
  const FoldSpec spec = kfold_split(d.n(), folds, seed);
  double sse = 0.0;
  for (std::size_t f = 0; f < folds; ++f) {
    double mean = 0.0;
    const auto train = spec.other_rows(f);
    for (auto i : train) mean += d.y[i];
    mean /= static_cast<double>(train.size());
    for (auto i : spec.fold_rows(f)) sse += (d.y[i] - mean) * (d.y[i] - mean);
  }
  return sse / static_cast<double>(d.n());
}

}  // namespace

TEST(SummarizeTest, MeanAndStandardError) {
  const auto [mean, se] = summarize({1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(mean, 2.0);
  EXPECT_NEAR(se, 0.5774, 1e-4);
  EXPECT_DOUBLE_EQ(se, 1.0 / std::sqrt(3.0));
}

TEST(SummarizeTest, SingleValueHasZeroError) {
  const auto [mean, se] = summarize({4.5});
  EXPECT_EQ(mean, 4.5);
  EXPECT_EQ(se, 0.0);
}

TEST(PlanTest, ParsesKeysAndComments) {
  const BenchmarkPlan plan = parse_plan(R"(
# desk plan
datasets = synthetic:2:500; synthetic:12:300
methods = GBART, bart
folds = 4
replications = 3   # trailing comment
master_seed = 42
workers = 2
record_time = false
mcmc.ndpost = 250
mcmc.alpha = 0.9
search.stage1_trees = 50
search.stage1_ndpost = 120
)");
  ASSERT_EQ(plan.datasets.size(), 2u);
  EXPECT_EQ(plan.datasets[0].id(), "synthetic:2:500");
  EXPECT_EQ(plan.datasets[1].case_id, 12);
  EXPECT_EQ(plan.datasets[1].n, 300u);
  EXPECT_EQ(plan.methods, (std::vector<Method>{Method::Gbart, Method::Bart}));
  EXPECT_EQ(plan.folds, 4u);
  EXPECT_EQ(plan.replications, 3u);
  EXPECT_EQ(plan.master_seed, 42u);
  EXPECT_EQ(plan.workers, 2);
  EXPECT_FALSE(plan.record_time);
  EXPECT_EQ(plan.mcmc.ndpost, 250u);
  EXPECT_EQ(plan.mcmc.burn_in, 100u);
  EXPECT_EQ(plan.mcmc.alpha, 0.9);
  EXPECT_EQ(plan.search.stage1_trees, 50u);
  ASSERT_TRUE(plan.search.stage1_mcmc.has_value());
  EXPECT_EQ(plan.search.stage1_mcmc->ndpost, 120u);
  EXPECT_EQ(plan.search.stage1_mcmc->alpha, 0.9);
}

TEST(PlanTest, DeskDefaults) {
  const BenchmarkPlan plan = parse_plan("datasets = synthetic:3:100\n");
  EXPECT_EQ(plan.folds, 5u);
  EXPECT_EQ(plan.replications, 5u);
  EXPECT_EQ(plan.mcmc.ndpost, 300u);
  EXPECT_EQ(plan.mcmc.burn_in, 100u);
  EXPECT_EQ(plan.methods.size(), 2u);
  EXPECT_FALSE(plan.search.stage1_mcmc.has_value());
}

TEST(PlanTest, CsvDatasetSpec) {
  const DatasetSpec s = parse_dataset_spec("csv:data/slump.csv:8:0|9|10");
  EXPECT_EQ(s.kind, DatasetSpec::Kind::Csv);
  EXPECT_EQ(s.path, "data/slump.csv");
  EXPECT_EQ(s.target, "8");
  EXPECT_EQ(s.drop, (std::vector<std::string>{"0", "9", "10"}));
}

TEST(PlanTest, Errors) {
  EXPECT_THROW(parse_plan(""), InvalidConfig);
  EXPECT_THROW(parse_plan("datasets = synthetic:2:100\nfolds = 1\n"), InvalidConfig);
  EXPECT_THROW(parse_plan("datasets = synthetic:2:100\nreplications = 0\n"), InvalidConfig);
  EXPECT_THROW(parse_plan("datasets = synthetic:2:100\nbogus = 1\n"), InvalidConfig);
  EXPECT_THROW(parse_plan("datasets = synthetic:2:100\nmethods = rf\n"), InvalidConfig);
  EXPECT_THROW(parse_plan("datasets = synthetic:2:100\nfolds = five\n"), InvalidConfig);
  EXPECT_THROW(parse_plan("datasets = synthetic:2:100\nmaster_seed = -3\n"), InvalidConfig);
  EXPECT_THROW(parse_plan("datasets = synthetic:2:100\nno equals sign\n"), InvalidConfig);
  EXPECT_THROW(parse_plan("datasets = synthetic:13:100\n"), InvalidCase);
  EXPECT_THROW(parse_plan("datasets = parquet:x\n"), InvalidConfig);
  EXPECT_THROW(load_plan("/nonexistent/plan.txt"), InvalidInput);
}

TEST(ResultTableTest, CsvAndJsonLayout) {
  ResultTable t;
  ResultRow r;
  r.dataset = "synthetic:2:500";
  r.method = Method::Gbart;
  r.mses = {1.0, 2.0, 3.0};
  std::tie(r.mean_mse, r.std_err) = summarize(r.mses);
  t.rows.push_back(r);
  EXPECT_EQ(t.to_csv(),
            "dataset,method,mean_mse,std_err,replications,wall_time_s\n"
            "synthetic:2:500,GBART,2,0.5773502692,3,0\n");
  const auto j = Json::parse(t.to_json());
  EXPECT_EQ(j.at("rows").at(0).at("mses"), Json({1.0, 2.0, 3.0}));
  EXPECT_EQ(j.at("rows").at(0).at("method"), "GBART");
}

TEST(CellSeedsTest, DataAndFoldsSharedAcrossMethods) {
  const CellSeeds g = cell_seeds(1, "synthetic:2:500", Method::Gbart, 3);
  const CellSeeds b = cell_seeds(1, "synthetic:2:500", Method::Bart, 3);
  EXPECT_EQ(g.data, b.data);
  EXPECT_EQ(g.folds, b.folds);
  EXPECT_NE(g.fit, b.fit);
  EXPECT_NE(g.data, cell_seeds(1, "synthetic:2:500", Method::Gbart, 4).data);
  EXPECT_NE(g.data, cell_seeds(2, "synthetic:2:500", Method::Gbart, 3).data);
}

TEST(EvaluateMethodTest, ConstantResponseIsFitExactly) {
  Dataset d = generate_synthetic(2, 60, 1);
  for (double& v : d.y) v = 3.25;
  const double mse = evaluate_method(d, Method::Bart, 5, short_chain(), small_search(), 4);
  EXPECT_LT(mse, 1e-3);
}

TEST(EvaluateMethodTest, DisabledSearchMatchesBart) {
  const Dataset d = generate_synthetic(3, 100, 2);
  GroupSearchConfig s = small_search();
  s.enabled = false;
  const double g = evaluate_method(d, Method::Gbart, 5, short_chain(), s, 8);
  const double b = evaluate_method(d, Method::Bart, 5, short_chain(), s, 8);
  EXPECT_EQ(g, b);
}

TEST(EvaluateMethodTest, BartBeatsMeanPredictor) {
  const Dataset d = generate_synthetic(2, 500, 6);
  McmcConfig c;
  c.ndpost = 200;
  c.burn_in = 100;
  GroupSearchConfig s;
  const double bart = evaluate_method(d, Method::Bart, 5, c, s, 11);
  EXPECT_LT(bart, mean_predictor_mse(d, 5, 11));
}

TEST(EvaluateMethodTest, TooFewRowsForFolds) {
  const Dataset d = generate_synthetic(2, 3, 1);
  EXPECT_THROW(evaluate_method(d, Method::Bart, 5, short_chain(), small_search(), 1), Error);
}

TEST(RunBenchmarkTest, SingleCellTable) {
  BenchmarkPlan plan;
  plan.datasets = {parse_dataset_spec("synthetic:12:60")};
  plan.methods = {Method::Bart};
  plan.replications = 1;
  plan.mcmc = short_chain();
  plan.search = small_search();
  plan.record_time = false;
  const ResultTable t = run_benchmark(plan);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].mses.size(), 1u);
  EXPECT_EQ(t.rows[0].std_err, 0.0);
  EXPECT_EQ(t.rows[0].mean_mse, t.rows[0].mses[0]);
  EXPECT_EQ(t.rows[0].wall_time_s, 0.0);
  EXPECT_GT(t.rows[0].mean_mse, 0.0);
}

TEST(RunBenchmarkTest, ReorderingDatasetsKeepsCellValues) {
  BenchmarkPlan plan;
  plan.datasets = {parse_dataset_spec("synthetic:2:50"), parse_dataset_spec("synthetic:12:50")};
  plan.methods = {Method::Bart, Method::Gbart};
  plan.folds = 2;
  plan.replications = 2;
  plan.mcmc = short_chain();
  plan.search = small_search();
  plan.record_time = false;
  const ResultTable a = run_benchmark(plan);
  std::swap(plan.datasets[0], plan.datasets[1]);
  std::swap(plan.methods[0], plan.methods[1]);
  plan.workers = 3;
  const ResultTable b = run_benchmark(plan);
  ASSERT_EQ(a.rows.size(), 4u);
  for (const auto& ra : a.rows) {
    bool found = false;
    for (const auto& rb : b.rows) {
      if (rb.dataset == ra.dataset && rb.method == ra.method) {
        EXPECT_EQ(rb.mses, ra.mses);
        found = true;
      }
    }
    EXPECT_TRUE(found) << ra.dataset;
  }
}

TEST(RunBenchmarkTest, CsvDatasetResamplesFolds) {
  const std::string path = ::testing::TempDir() + "bench_small.csv";
  write_csv(generate_synthetic(3, 60, 5), path);
  BenchmarkPlan plan;
  plan.datasets = {parse_dataset_spec("csv:" + path + ":y")};
  plan.methods = {Method::Bart};
  plan.folds = 3;
  plan.replications = 2;
  plan.mcmc = short_chain();
  plan.search = small_search();
  const ResultTable t = run_benchmark(plan);
  ASSERT_EQ(t.rows[0].mses.size(), 2u);
  EXPECT_NE(t.rows[0].mses[0], t.rows[0].mses[1]);
}

TEST(RunBenchmarkTest, FailureNamesTheCell) {
  BenchmarkPlan plan;
  plan.datasets = {parse_dataset_spec("csv:/nonexistent.csv:y")};
  EXPECT_THROW(run_benchmark(plan), InvalidInput);
  plan.datasets = {parse_dataset_spec("synthetic:2:4")};
  plan.methods = {Method::Bart};
  plan.replications = 1;
  try {
    run_benchmark(plan);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("synthetic:2:4 / BART / replication 0"),
              std::string::npos);
  }
}
