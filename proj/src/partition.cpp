#include "gbart/partition.hpp"

#include <algorithm>
#include <numeric>

#include "gbart/errors.hpp"

namespace gbart {

Partition::Partition(std::vector<std::vector<int>> groups, std::size_t p) : p_(p) {
  if (p == 0) throw InvalidPartition("partition must cover at least one predictor");
  std::vector<int> seen(p, 0);
  for (auto& g : groups) {
    if (g.empty()) throw InvalidPartition("partition contains an empty group");
    std::sort(g.begin(), g.end());
    for (int v : g) {
      if (v < 0 || static_cast<std::size_t>(v) >= p) {
        throw InvalidPartition("predictor index " + std::to_string(v) + " outside 0.." +
                               std::to_string(p - 1));
      }
      if (seen[v]++) throw InvalidPartition("predictor " + std::to_string(v) + " appears twice");
    }
  }
  for (std::size_t v = 0; v < p; ++v) {
    if (!seen[v]) throw InvalidPartition("predictor " + std::to_string(v) + " is not covered");
  }
  groups_ = std::move(groups);
}

Partition Partition::trivial(std::size_t p) {
  std::vector<int> all(p);
  std::iota(all.begin(), all.end(), 0);
  return Partition({all}, p);
}

bool Partition::contains_group(std::vector<int> group) const {
  std::sort(group.begin(), group.end());
  return std::find(groups_.begin(), groups_.end(), group) != groups_.end();
}

std::string Partition::to_string() const {
  std::string out = "[";
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (g) out += ",";
    out += "[";
    for (std::size_t i = 0; i < groups_[g].size(); ++i) {
      if (i) out += ",";
      out += std::to_string(groups_[g][i]);
    }
    out += "]";
  }
  return out + "]";
}

}  // namespace gbart
