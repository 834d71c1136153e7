#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gbart {

/// Disjoint, nonempty groups of predictor indices covering 0..p-1.
class Partition {
 public:
  Partition() = default;
  /// Throws InvalidPartition unless the groups partition {0, ..., p-1}.
  Partition(std::vector<std::vector<int>> groups, std::size_t p);

  /// The single group holding every predictor.
  static Partition trivial(std::size_t p);

  const std::vector<std::vector<int>>& groups() const { return groups_; }
  std::size_t num_groups() const { return groups_.size(); }
  std::size_t num_predictors() const { return p_; }

  /// True when some group equals the given set (order ignored).
  bool contains_group(std::vector<int> group) const;

  std::string to_string() const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<std::vector<int>> groups_;
  std::size_t p_ = 0;
};

}  // namespace gbart
