#pragma once

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gbart/matrix.hpp"

namespace gbart {

/// Observations with x[variable] <= threshold go left.
struct SplitRule {
  int variable = 0;
  double threshold = 0.0;

  bool operator==(const SplitRule&) const = default;
};

/// Binary regression tree restricted to a group of predictors.
///
/// Nodes live in a flat vector indexed by creation order; the root is node 0.
/// Internal nodes keep the value they held as a leaf so that pruning a freshly
/// grown split restores the tree exactly. Trees are values: structural edits go
/// through apply_move and never touch the original.
class RegressionTree {
 public:
  struct Node {
    int variable = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int parent = -1;
    int depth = 0;
    double value = 0.0;

    bool is_leaf() const { return left < 0; }
  };

  RegressionTree() : RegressionTree(std::vector<int>{}) {}
  explicit RegressionTree(std::vector<int> group, double leaf_value = 0.0);

  const std::vector<int>& group() const { return *group_; }
  bool in_group(int variable) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return nodes_.size(); }

  std::size_t num_leaves() const { return (nodes_.size() + 1) / 2; }
  std::size_t num_internal() const { return nodes_.size() / 2; }
  bool is_stump() const { return nodes_.size() == 1; }
  int depth() const;

  std::vector<int> leaves() const;
  std::vector<int> internal_nodes() const;
  /// Internal nodes whose two children are both leaves.
  std::vector<int> prunable_nodes() const;

  /// Routes x from the root without validation; x must cover every split variable.
  int find_leaf(std::span<const double> x) const { return find_leaf_from(0, x); }
  int find_leaf_from(int start, std::span<const double> x) const {
    int id = start;
    while (nodes_[id].left >= 0) {
      const Node& n = nodes_[id];
      id = x[n.variable] <= n.threshold ? n.left : n.right;
    }
    return id;
  }

  void set_value(int id, double value) { nodes_.at(static_cast<std::size_t>(id)).value = value; }

  /// Largest split variable index used, or -1 for a stump.
  int max_variable() const;

  /// Every split variable is a member of the group.
  bool respects_group() const;

  /// Structural equality: same shape, rules, leaf values and group, walked from
  /// the root. Node numbering is ignored.
  bool operator==(const RegressionTree& other) const;

 private:
  friend RegressionTree grow(const RegressionTree&, int, SplitRule, double, double);
  friend RegressionTree prune(const RegressionTree&, int, const double*);
  friend RegressionTree change(const RegressionTree&, int, SplitRule);

  bool subtree_equal(int a, const RegressionTree& other, int b) const;

  std::shared_ptr<const std::vector<int>> group_;
  std::vector<Node> nodes_;
};

/// Split a leaf into two leaves.
struct GrowMove {
  int leaf = 0;
  SplitRule rule;
  double left_value = 0.0;
  double right_value = 0.0;
};

/// Collapse an internal node whose children are both leaves. The node keeps
/// its stored value unless one is supplied.
struct PruneMove {
  int node = 0;
  std::optional<double> value;
};

/// Replace the split rule of an internal node.
struct ChangeMove {
  int node = 0;
  SplitRule rule;
};

using Move = std::variant<GrowMove, PruneMove, ChangeMove>;

/// Returns the edited tree. Throws InvalidMove when the target node does not
/// have the required shape and GroupViolation when a rule leaves the group.
RegressionTree apply_move(const RegressionTree& tree, const Move& move);

/// Leaf value reached by x. Throws InvalidInput on non-finite or short x.
double evaluate(const RegressionTree& tree, std::span<const double> x);

/// Leaf node id reached by every row of X.
std::vector<int> leaf_assignments(const RegressionTree& tree, const Matrix& X);

}  // namespace gbart
