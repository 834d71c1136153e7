#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "gbart/data.hpp"
#include "gbart/partition.hpp"
#include "gbart/sampler.hpp"

namespace gbart {

struct GroupSearchConfig {
  std::size_t stage1_trees = 100;
  std::size_t stage2_trees = 200;
  double val_fraction = 0.2;
  /// Chain settings for the search fits. When unset, gbart_fit reuses the
  /// stage-2 settings and isg_search uses McmcConfig defaults. num_trees is
  /// always replaced by stage1_trees.
  std::optional<McmcConfig> stage1_mcmc;
  std::size_t max_rounds = 1000;
  /// When false, gbart_fit skips the search and uses the trivial partition.
  bool enabled = true;
  /// Threads for candidate fits; 0 uses the OpenMP default.
  int workers = 0;

  void validate() const;
};

/// One round of the interaction search.
struct SearchRound {
  std::size_t round = 0;
  double e0 = 0.0;
  std::map<int, double> ei;  // isolate variable i
  int i_star = -1;
  std::map<int, double> ek;  // pair k with i_star
  int k_star = -1;
  bool accepted = false;

  bool operator==(const SearchRound&) const = default;
};

struct SearchTrace {
  std::vector<SearchRound> rounds;

  bool operator==(const SearchTrace&) const = default;
};

/// Assigns each tree a uniformly drawn group of the partition, then runs the
/// chain with those assignments fixed. A constant response short-circuits to
/// a model that predicts the constant.
FitResult fit_grouped(const Dataset& train, const Partition& partition, std::size_t num_trees,
                      const McmcConfig& mcmc, std::uint64_t seed);

/// Plain BART: every tree may split on every predictor. Consumes the same
/// random stream as fit_grouped, so the two agree bit for bit on the trivial
/// partition.
FitResult fit_ungrouped(const Dataset& train, std::size_t num_trees, const McmcConfig& mcmc,
                        std::uint64_t seed);

/// Mean squared error of posterior-mean predictions.
double validation_mse(const FitResult& fit, const Dataset& data);

/// Greedy second-order interaction search on a seeded train/validation split.
std::pair<Partition, SearchTrace> isg_search(const Dataset& data, const GroupSearchConfig& cfg,
                                             std::uint64_t seed);

struct GbartResult {
  FitResult fit;
  Partition partition;
  SearchTrace trace;
};

/// Search on the data, then fit stage2_trees trees on all of it with the
/// discovered partition. The stage-2 fit uses `seed` itself.
GbartResult gbart_fit(const Dataset& data, const GroupSearchConfig& cfg, const McmcConfig& mcmc,
                      std::uint64_t seed);

/// Seed used for the search stage of gbart_fit.
std::uint64_t search_seed(std::uint64_t seed);

}  // namespace gbart
