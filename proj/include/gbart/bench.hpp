#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gbart/data.hpp"
#include "gbart/grouping.hpp"
#include "gbart/sampler.hpp"

namespace gbart {

enum class Method { Gbart, Bart };

std::string method_name(Method m);
Method parse_method(const std::string& name);

/// Either a synthetic generator (case + n) or a CSV file with a target column.
struct DatasetSpec {
  enum class Kind { Synthetic, Csv } kind = Kind::Synthetic;
  int case_id = 1;
  std::size_t n = 500;
  std::string path;
  std::string target;
  std::vector<std::string> drop;
  std::string name;  // optional display id

  /// Stable identifier; also the label that seeds are derived from.
  std::string id() const;
};

/// Parses "synthetic:<case>:<n>" or "csv:<path>:<target>[:<drop>|<drop>...]".
DatasetSpec parse_dataset_spec(const std::string& text);

struct BenchmarkPlan {
  std::vector<DatasetSpec> datasets;
  std::vector<Method> methods{Method::Gbart, Method::Bart};
  std::size_t folds = 5;
  std::size_t replications = 5;
  std::uint64_t master_seed = 1;
  McmcConfig mcmc = desk_mcmc();
  GroupSearchConfig search;
  int workers = 0;
  /// When false, wall times are written as 0 so repeated runs give
  /// byte-identical files.
  bool record_time = true;

  void validate() const;
  static McmcConfig desk_mcmc();
};

/// Flat key=value text; '#' starts a comment. Keys: datasets (';'-separated
/// dataset specs), methods, folds, replications, master_seed, workers,
/// record_time, mcmc.<field>, search.<field>.
BenchmarkPlan parse_plan(const std::string& text);
BenchmarkPlan load_plan(const std::string& path);

struct ResultRow {
  std::string dataset;
  Method method = Method::Bart;
  double mean_mse = 0.0;
  double std_err = 0.0;
  std::vector<double> mses;
  double wall_time_s = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;

  std::string to_csv() const;
  std::string to_json() const;
};

/// Mean and standard error (sample sd / sqrt(R)); the error is 0 for R = 1.
std::pair<double, double> summarize(const std::vector<double>& values);

/// Cross-validated MSE pooled over all held-out points. Folds come from
/// fold_seed; each fold's fit seed derives from fit_seed and the fold index.
double evaluate_method(const Dataset& data, Method method, std::size_t folds,
                       const McmcConfig& mcmc, const GroupSearchConfig& search,
                       std::uint64_t fold_seed, std::uint64_t fit_seed);
double evaluate_method(const Dataset& data, Method method, std::size_t folds,
                       const McmcConfig& mcmc, const GroupSearchConfig& search,
                       std::uint64_t seed);

/// Seeds of one benchmark cell. Data and folds depend on (dataset, replication)
/// only, so both methods see the same draws; fits also depend on the method.
struct CellSeeds {
  std::uint64_t data;
  std::uint64_t folds;
  std::uint64_t fit;
};
CellSeeds cell_seeds(std::uint64_t master_seed, const std::string& dataset_id, Method method,
                     std::size_t replication);

/// Runs every (dataset, method, replication) cell, up to plan.workers at a time.
ResultTable run_benchmark(const BenchmarkPlan& plan);

}  // namespace gbart
