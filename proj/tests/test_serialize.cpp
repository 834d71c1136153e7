#include <gtest/gtest.h>

#include <sstream>

#include "gbart/errors.hpp"
#include "gbart/grouping.hpp"
#include "gbart/serialize.hpp"

using namespace gbart;

namespace {

RegressionTree sample_tree() {
  RegressionTree t({0, 2, 3});
  t = apply_move(t, GrowMove{0, {2, 0.125}, -1.5, 2.25});
  t = apply_move(t, GrowMove{2, {0, 0.1 + 0.2}, 1.0 / 3.0, -7e-300});
  return t;
}

}  // namespace

TEST(TreeJsonTest, NestedLayout) {
  const Json j = tree_to_json(sample_tree());
  EXPECT_EQ(j.at("group"), Json({0, 2, 3}));
  EXPECT_EQ(j.at("var"), 2);
  EXPECT_EQ(j.at("cut").get<double>(), 0.125);
  EXPECT_EQ(j.at("left").at("mu").get<double>(), -1.5);
  EXPECT_EQ(j.at("right").at("var"), 0);
  EXPECT_FALSE(j.at("left").contains("var"));
}

TEST(TreeJsonTest, TextRoundTripIsExact) {
  const std::string s = tree_to_json(sample_tree()).dump();
  const RegressionTree back = tree_from_json(Json::parse(s));
  EXPECT_EQ(back, sample_tree());
  EXPECT_EQ(tree_to_json(back).dump(), s);
}

TEST(TreeJsonTest, StumpRoundTrip) {
  RegressionTree t({1});
  t.set_value(0, 0.5);
  const RegressionTree back = tree_from_json(Json::parse(tree_to_json(t).dump()));
  EXPECT_EQ(back, t);
  EXPECT_EQ(back.node(0).value, 0.5);
}

TEST(TreeJsonTest, MalformedNodesThrow) {
  EXPECT_THROW(tree_from_json(Json::parse(R"({"group":[0],"var":0,"cut":1.0})")), SchemaError);
  EXPECT_THROW(tree_from_json(Json::parse(R"({"mu":1.0})")), SchemaError);
  EXPECT_THROW(tree_from_json(Json::parse(R"({"group":[0],"mu":"x"})")), SchemaError);
  // split on a variable outside the group
  EXPECT_THROW(tree_from_json(Json::parse(
                   R"({"group":[0],"var":1,"cut":0.5,"left":{"mu":0},"right":{"mu":1}})")),
               GroupViolation);
}

TEST(PartitionJsonTest, ArrayOfArrays) {
  const Partition p({{1, 0}, {2, 3}, {5, 4}}, 6);
  EXPECT_EQ(partition_to_json(p).dump(), "[[0,1],[2,3],[4,5]]");
  EXPECT_EQ(partition_from_json(Json::parse("[[0,1],[2,3],[4,5]]")), p);
  // group order is kept: it decides which group each tree draws
  EXPECT_EQ(partition_to_json(Partition({{4, 5}, {0, 1, 2, 3}}, 6)).dump(), "[[4,5],[0,1,2,3]]");
  EXPECT_EQ(partition_from_json(Json::parse("[[1,0],[2]]"), 3), Partition({{0, 1}, {2}}, 3));
}

TEST(PartitionJsonTest, InvalidPartitionsThrow) {
  EXPECT_THROW(partition_from_json(Json::parse("[[0,1],[1,2]]")), InvalidPartition);
  EXPECT_THROW(partition_from_json(Json::parse("[[0],[2]]"), 3), InvalidPartition);
  EXPECT_THROW(partition_from_json(Json::parse("[0,1]")), SchemaError);
}

TEST(ConfigJsonTest, RoundTrip) {
  McmcConfig c;
  c.num_trees = 17;
  c.ndpost = 33;
  c.burn_in = 0;
  c.alpha = 0.9;
  c.proposal_probs = {0.25, 0.25, 0.5};
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
  c.fixed_sigma = 2.5;
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
  EXPECT_TRUE(config_to_json(McmcConfig{}).at("fixed_sigma").is_null());
}

TEST(ConfigJsonTest, RejectsInvalidValues) {
  Json j = config_to_json(McmcConfig{});
  j["alpha"] = 1.5;
  EXPECT_THROW(config_from_json(j), InvalidConfig);
  j = config_to_json(McmcConfig{});
  j["proposal_probs"] = {0.5, 0.5};
  EXPECT_THROW(config_from_json(j), SchemaError);
  j = config_to_json(McmcConfig{});
  j.erase("ndpost");
  EXPECT_THROW(config_from_json(j), SchemaError);
}

TEST(ModelJsonTest, RoundTripKeepsPredictions) {
  const Dataset d = generate_synthetic(4, 80, 3);
  McmcConfig c;
  c.ndpost = 20;
  c.burn_in = 10;
  const FitResult fit = fit_grouped(d, Partition({{0, 1}, {2, 3}, {4}, {5}}, 6), 12, c, 9);
  const std::string text = model_to_json(fit).dump();
  const FitResult back = model_from_json(Json::parse(text));
  EXPECT_EQ(back.snapshots, fit.snapshots);
  EXPECT_EQ(back.transform, fit.transform);
  EXPECT_EQ(back.partition, fit.partition);
  EXPECT_EQ(back.config, fit.config);
  EXPECT_EQ(back.seed, fit.seed);
  EXPECT_EQ(predict(back, d.X), predict(fit, d.X));
  EXPECT_EQ(model_to_json(back).dump(), text);
}

TEST(ModelJsonTest, SchemaErrors) {
  const Dataset d = generate_synthetic(2, 40, 1);
  McmcConfig c;
  c.ndpost = 2;
  c.burn_in = 0;
  const Json good = model_to_json(fit_grouped(d, Partition::trivial(6), 3, c, 1));
  Json j = good;
  j["sigmas"].erase(0);
  EXPECT_THROW(model_from_json(j), SchemaError);
  j = good;
  j["transform"]["y_max"] = j["transform"]["y_min"];
  EXPECT_THROW(model_from_json(j), SchemaError);
  j = good;
  j.erase("snapshots");
  EXPECT_THROW(model_from_json(j), SchemaError);
}

TEST(TraceJsonTest, OneRecordPerRound) {
  SearchTrace trace;
  trace.rounds.push_back({1, 1.5, {{0, 1.6}, {1, 1.4}}, 0, {{1, 1.2}}, 1, true});
  trace.rounds.push_back({2, 1.2, {{2, 1.25}, {3, 1.1}}, 2, {{3, 1.3}}, 3, false});
  std::istringstream in(trace_to_jsonl(trace));
  std::string line;
  std::vector<Json> records;
  while (std::getline(in, line)) records.push_back(Json::parse(line));
  ASSERT_EQ(records.size(), 2u);
  for (const char* key : {"round", "e0", "ei", "i_star", "ek", "k_star", "accepted"}) {
    EXPECT_TRUE(records[0].contains(key)) << key;
  }
  EXPECT_EQ(records[0].at("ei").at("1").get<double>(), 1.4);
  EXPECT_EQ(records[1].at("accepted"), false);
  EXPECT_EQ(records[1].at("k_star"), 3);
}

TEST(JsonFileTest, MissingAndMalformedFiles) {
  EXPECT_THROW(read_json_file("/nonexistent/model.json"), InvalidInput);
  const std::string path = ::testing::TempDir() + "bad.json";
  write_text_file(path, "{not json");
  EXPECT_THROW(read_json_file(path), ParseError);
}
