#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "gbart/data.hpp"
#include "gbart/errors.hpp"

using namespace gbart;

namespace {

std::string temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / ("gbart_test_" + name);
  std::ofstream(path) << contents;
  return path.string();
}

double sample_sd(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST(SyntheticTest, GoldenFormulaValues) {
  EXPECT_DOUBLE_EQ(synthetic_signal(2, std::vector<double>{1, 2, 3, 4, 5, 6}), 44.0);
  const std::vector<double> half(7, 0.5);
  EXPECT_NEAR(synthetic_signal(12, half), 14.5710678118654755, 1e-12);
  EXPECT_EQ(synthetic_signal(1, std::vector<double>(6, 0.0)), 0.0);
  // row 3: x1x2 + x3 + x4 + x5, x6 inert
  EXPECT_DOUBLE_EQ(synthetic_signal(3, std::vector<double>{2, 3, 1, 1, 1, 100}), 9.0);
  // row 7 tail: 0.04 * sum of x7..x20
  std::vector<double> x(20, 1.0);
  EXPECT_NEAR(synthetic_signal(7, x), 5 + 1 + 0.2 + 0.04 * 14, 1e-12);
  EXPECT_NEAR(synthetic_signal(6, x), 5 * 4 + 4 + 0.2 * 4 + 0.04 * 14, 1e-12);
  EXPECT_NEAR(synthetic_signal(11, x), 5 + 1 + 0.2, 1e-12);
}

TEST(SyntheticTest, ShapesPerCase) {
  for (int c = 1; c <= 12; ++c) {
    const Dataset d = generate_synthetic(c, 17, 3);
    EXPECT_EQ(d.n(), 17u);
    EXPECT_EQ(d.p(), c <= 5 ? 6u : (c == 12 ? 7u : 20u));
    EXPECT_NO_THROW(d.validate());
  }
  EXPECT_THROW(generate_synthetic(0, 10, 1), InvalidCase);
  EXPECT_THROW(generate_synthetic(13, 10, 1), InvalidCase);
}

TEST(SyntheticTest, Deterministic) {
  const Dataset a = generate_synthetic(5, 100, 77);
  const Dataset b = generate_synthetic(5, 100, 77);
  EXPECT_EQ(a.X, b.X);
  EXPECT_EQ(a.y, b.y);
  const Dataset c = generate_synthetic(5, 100, 78);
  EXPECT_NE(a.y, c.y);
}

TEST(SyntheticTest, MomentsAndNoise) {
  const std::size_t n = 100000;
  const Dataset d2 = generate_synthetic(2, n, 2024);
  const double mean = std::accumulate(d2.y.begin(), d2.y.end(), 0.0) / static_cast<double>(n);
  EXPECT_NEAR(mean, 3.0, 0.1);

  for (int c : {2, 9, 12}) {
    const Dataset d = generate_synthetic(c, n, 99 + c);
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = d.y[i] - synthetic_signal(c, d.X.row(i));
    const double target = c == 12 ? 1.0 : 0.5;
    EXPECT_NEAR(sample_sd(resid), target, 0.03 * target) << "case " << c;
  }

  // uniform tail and Friedman predictors stay inside [0, 1]
  const Dataset d7 = generate_synthetic(7, 1000, 1);
  for (std::size_t i = 0; i < d7.n(); ++i) {
    for (std::size_t j = 6; j < 20; ++j) {
      ASSERT_GE(d7.X(i, j), 0.0);
      ASSERT_LT(d7.X(i, j), 1.0);
    }
  }
}

TEST(CsvTest, TargetByIndex) {
  const auto path = temp_file("three.csv", "a,b,c\n1,2,3\n4,5,6\n");
  const Dataset d = load_csv(path, "2");
  EXPECT_EQ(d.p(), 2u);
  EXPECT_EQ(d.n(), 2u);
  EXPECT_EQ(d.y, (std::vector<double>{3, 6}));
  EXPECT_EQ(d.X(1, 1), 5.0);
  EXPECT_EQ(d.target_name, "c");
}

TEST(CsvTest, TargetByNameWithDrop) {
  const auto path = temp_file("named.csv", "id, u ,v,w\r\n1,0.5,2,9\r\n2,1.5,3,8\r\n");
  const Dataset d = load_csv(path, "v", {"id"});
  EXPECT_EQ(d.names, (std::vector<std::string>{"u", "w"}));
  EXPECT_EQ(d.y, (std::vector<double>{2, 3}));
  EXPECT_EQ(d.X(0, 0), 0.5);
}

TEST(CsvTest, ParseErrorNamesCell) {
  const auto path = temp_file("bad.csv", "a,b,c\n1,2,3\n4,oops,6\n");
  try {
    load_csv(path, "c");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("oops"), std::string::npos);
    EXPECT_NE(msg.find("row 2"), std::string::npos);
    EXPECT_NE(msg.find("'b'"), std::string::npos);
  }
}

TEST(CsvTest, MissingTargetIsSchemaError) {
  const auto path = temp_file("schema.csv", "a,b\n1,2\n");
  EXPECT_THROW(load_csv(path, "zzz"), SchemaError);
  EXPECT_THROW(load_csv(path, "7"), SchemaError);
}

TEST(CsvTest, SlumpShapedFile) {
  // Same header layout as the public slump test data: an index column,
  // seven inputs, three outputs.
  std::string text =
      "No,Cement,Slag,Fly ash,Water,SP,Coarse Aggr.,Fine Aggr.,SLUMP(cm),FLOW(cm),"
      "Compressive Strength (28-day)(Mpa)\n";
  for (int r = 1; r <= 103; ++r) {
    text += std::to_string(r);
    for (int c = 0; c < 10; ++c) text += "," + std::to_string(100 + r * 0.5 + c);
    text += "\n";
  }
  const auto path = temp_file("slump.csv", text);
  const Dataset d = load_csv(path, "SLUMP(cm)",
                             {"No", "FLOW(cm)", "Compressive Strength (28-day)(Mpa)"});
  EXPECT_EQ(d.n(), 103u);
  EXPECT_EQ(d.p(), 7u);
  EXPECT_EQ(d.names.front(), "Cement");
}

TEST(CsvTest, WriteThenReadRoundTrip) {
  const Dataset d = generate_synthetic(4, 12, 6);
  const auto path = (std::filesystem::temp_directory_path() / "gbart_test_rt.csv").string();
  write_csv(d, path);
  const Dataset back = load_csv(path, "y");
  EXPECT_EQ(back.X, d.X);
  EXPECT_EQ(back.y, d.y);
}

TEST(FoldTest, EvenSplit) {
  const FoldSpec f = kfold_split(10, 5, 1);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(f.fold_rows(k).size(), 2u);
  std::vector<std::size_t> all;
  for (std::size_t k = 0; k < 5; ++k) {
    auto rows = f.fold_rows(k);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(all[i], i);
}

TEST(FoldTest, UnevenSizesDifferByOne) {
  const std::size_t n = 103;
  const std::size_t k = 5;
  const FoldSpec f = kfold_split(n, k, 9);
  std::vector<std::size_t> sizes;
  for (std::size_t j = 0; j < k; ++j) sizes.push_back(f.fold_rows(j).size());
  // floor(n/k) everywhere plus one extra on the first n mod k folds
  std::vector<std::size_t> expected;
  for (std::size_t j = 0; j < k; ++j) expected.push_back(n / k + (j < n % k ? 1 : 0));
  EXPECT_EQ(sizes, expected);
  EXPECT_EQ(expected, (std::vector<std::size_t>{21, 21, 21, 20, 20}));
}

TEST(FoldTest, DeterministicAndValidated) {
  EXPECT_EQ(kfold_split(50, 5, 3).assignments, kfold_split(50, 5, 3).assignments);
  EXPECT_NE(kfold_split(50, 5, 3).assignments, kfold_split(50, 5, 4).assignments);
  EXPECT_THROW(kfold_split(10, 1, 0), InvalidFold);
  EXPECT_THROW(kfold_split(10, 11, 0), InvalidFold);
  EXPECT_NO_THROW(kfold_split(10, 10, 0));
}

TEST(SplitTest, SizesUnionAndDeterminism) {
  const Dataset d = generate_synthetic(2, 10, 1);
  const auto [train, val] = train_val_split(d, 0.2, 5);
  EXPECT_EQ(train.n(), 8u);
  EXPECT_EQ(val.n(), 2u);
  std::vector<double> joined = train.y;
  joined.insert(joined.end(), val.y.begin(), val.y.end());
  std::vector<double> original = d.y;
  std::sort(joined.begin(), joined.end());
  std::sort(original.begin(), original.end());
  EXPECT_EQ(joined, original);

  const auto [train2, val2] = train_val_split(d, 0.2, 5);
  EXPECT_EQ(train2.y, train.y);
  EXPECT_EQ(val2.X, val.X);

  const Dataset big = generate_synthetic(2, 400, 1);
  EXPECT_EQ(train_val_split(big, 0.2, 1).second.n(), 80u);
}

TEST(SplitTest, DegenerateParts) {
  const Dataset one = generate_synthetic(2, 1, 1);
  EXPECT_THROW(train_val_split(one, 0.5, 1), InsufficientData);
  const Dataset d = generate_synthetic(2, 10, 1);
  EXPECT_THROW(train_val_split(d, 0.0, 1), InvalidInput);
  EXPECT_THROW(train_val_split(d, 1.0, 1), InvalidInput);
}
