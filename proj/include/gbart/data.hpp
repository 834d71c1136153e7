#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gbart/matrix.hpp"

namespace gbart {

/// Predictor matrix with its response vector.
struct Dataset {
  Matrix X;
  std::vector<double> y;
  std::vector<std::string> names;  // predictor labels, may be empty
  std::string target_name = "y";

  std::size_t n() const { return X.rows(); }
  std::size_t p() const { return X.cols(); }

  /// Throws InvalidInput when shapes disagree or any value is non-finite.
  void validate() const;

  /// Rows in the given order.
  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Assignment of observations to cross-validation folds.
struct FoldSpec {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;

  std::vector<std::size_t> fold_rows(std::size_t fold) const;
  std::vector<std::size_t> other_rows(std::size_t fold) const;
};

/// Number of predictors generated for a synthetic case (1..12).
std::size_t synthetic_num_predictors(int case_id);

/// Noise standard deviation for a synthetic case.
double synthetic_noise_sd(int case_id);

/// Noise-free regression function of a synthetic case evaluated at x.
double synthetic_signal(int case_id, std::span<const double> x);

/// Draws n observations from one of the twelve benchmark generators.
/// Cases 1-11 draw x1..x6 from Normal(1, 1) and x7..x20 from Uniform[0, 1]
/// with Normal(0, 0.5^2) noise. Case 12 is the Friedman function with seven
/// Uniform[0, 1] predictors and unit noise.
Dataset generate_synthetic(int case_id, std::size_t n, std::uint64_t seed);

/// Reads a comma-separated file with a header row. The target is matched by
/// column name first, then as a zero-based column index. Columns listed in
/// drop are resolved the same way and discarded.
Dataset load_csv(const std::string& path, const std::string& target,
                 const std::vector<std::string>& drop = {});

/// Reads every column except those in drop as predictors; y is left empty.
Matrix load_csv_predictors(const std::string& path, const std::vector<std::string>& drop = {});

/// Writes predictors followed by the response column.
void write_csv(const Dataset& data, const std::string& path);

/// Seeded permutation of 0..n-1 dealt round-robin into k folds.
FoldSpec kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

/// Seeded permutation; the last ceil(n * val_fraction) rows form the second part.
std::pair<Dataset, Dataset> train_val_split(const Dataset& data, double val_fraction,
                                            std::uint64_t seed);

}  // namespace gbart
