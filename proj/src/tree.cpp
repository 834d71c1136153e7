#include "gbart/tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gbart/errors.hpp"

namespace gbart {

RegressionTree::RegressionTree(std::vector<int> group, double leaf_value) {
  std::sort(group.begin(), group.end());
  group.erase(std::unique(group.begin(), group.end()), group.end());
  group_ = std::make_shared<const std::vector<int>>(std::move(group));
  Node root;
  root.value = leaf_value;
  nodes_.push_back(root);
}

bool RegressionTree::in_group(int variable) const {
  return std::binary_search(group_->begin(), group_->end(), variable);
}

int RegressionTree::depth() const {
  int d = 0;
  for (const Node& n : nodes_) {
    if (n.is_leaf()) d = std::max(d, n.depth);
  }
  return d;
}

std::vector<int> RegressionTree::leaves() const {
  std::vector<int> out;
  out.reserve(num_leaves());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_leaf()) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> RegressionTree::internal_nodes() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].is_leaf()) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> RegressionTree::prunable_nodes() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (!n.is_leaf() && nodes_[n.left].is_leaf() && nodes_[n.right].is_leaf()) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

int RegressionTree::max_variable() const {
  int m = -1;
  for (const Node& n : nodes_) {
    if (!n.is_leaf()) m = std::max(m, n.variable);
  }
  return m;
}

bool RegressionTree::respects_group() const {
  return std::all_of(nodes_.begin(), nodes_.end(),
                     [this](const Node& n) { return n.is_leaf() || in_group(n.variable); });
}

bool RegressionTree::subtree_equal(int a, const RegressionTree& other, int b) const {
  const Node& x = nodes_[a];
  const Node& y = other.nodes_[b];
  if (x.is_leaf() != y.is_leaf()) return false;
  if (x.is_leaf()) return x.value == y.value;
  return x.variable == y.variable && x.threshold == y.threshold &&
         subtree_equal(x.left, other, y.left) && subtree_equal(x.right, other, y.right);
}

bool RegressionTree::operator==(const RegressionTree& other) const {
  return group() == other.group() && nodes_.size() == other.nodes_.size() &&
         subtree_equal(0, other, 0);
}

namespace {

void check_rule(const RegressionTree& tree, const SplitRule& rule) {
  if (!tree.in_group(rule.variable)) {
    throw GroupViolation("split variable " + std::to_string(rule.variable) +
                         " is not in the tree's group");
  }
  if (!std::isfinite(rule.threshold)) throw InvalidMove("split threshold must be finite");
}

void check_node(const RegressionTree& tree, int id) {
  if (id < 0 || static_cast<std::size_t>(id) >= tree.size()) {
    throw InvalidMove("node " + std::to_string(id) + " does not exist");
  }
}

}  // namespace

RegressionTree grow(const RegressionTree& tree, int leaf, SplitRule rule, double left_value,
                    double right_value) {
  check_node(tree, leaf);
  if (!tree.node(leaf).is_leaf()) {
    throw InvalidMove("GROW target " + std::to_string(leaf) + " is not a leaf");
  }
  check_rule(tree, rule);
  if (!std::isfinite(left_value) || !std::isfinite(right_value)) {
    throw InvalidMove("leaf values must be finite");
  }
  RegressionTree out = tree;
  const int left = static_cast<int>(out.nodes_.size());
  const int depth = out.nodes_[leaf].depth + 1;
  RegressionTree::Node child;
  child.parent = leaf;
  child.depth = depth;
  child.value = left_value;
  out.nodes_.push_back(child);
  child.value = right_value;
  out.nodes_.push_back(child);
  RegressionTree::Node& n = out.nodes_[leaf];
  n.variable = rule.variable;
  n.threshold = rule.threshold;
  n.left = left;
  n.right = left + 1;
  return out;
}

RegressionTree prune(const RegressionTree& tree, int id, const double* value) {
  check_node(tree, id);
  const RegressionTree::Node& target = tree.node(id);
  if (target.is_leaf() || !tree.node(target.left).is_leaf() || !tree.node(target.right).is_leaf()) {
    throw InvalidMove("PRUNE target " + std::to_string(id) + " must have two leaf children");
  }
  const int a = target.left;
  const int b = target.right;
  // Drop both children and renumber the survivors in their original order.
  std::vector<int> remap(tree.size(), -1);
  int next = 0;
  for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
    if (i != a && i != b) remap[i] = next++;
  }
  RegressionTree out = tree;
  out.nodes_.clear();
  out.nodes_.reserve(tree.size() - 2);
  for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
    if (remap[i] < 0) continue;
    RegressionTree::Node n = tree.nodes_[i];
    if (i == id) {
      n.left = n.right = -1;
      n.variable = -1;
      n.threshold = 0.0;
      if (value) n.value = *value;
    } else if (!n.is_leaf()) {
      n.left = remap[n.left];
      n.right = remap[n.right];
    }
    if (n.parent >= 0) n.parent = remap[n.parent];
    out.nodes_.push_back(n);
  }
  return out;
}

RegressionTree change(const RegressionTree& tree, int id, SplitRule rule) {
  check_node(tree, id);
  if (tree.node(id).is_leaf()) {
    throw InvalidMove("CHANGE target " + std::to_string(id) + " is a leaf");
  }
  check_rule(tree, rule);
  RegressionTree out = tree;
  out.nodes_[id].variable = rule.variable;
  out.nodes_[id].threshold = rule.threshold;
  return out;
}

RegressionTree apply_move(const RegressionTree& tree, const Move& move) {
  struct Visitor {
    const RegressionTree& tree;
    RegressionTree operator()(const GrowMove& m) const {
      return grow(tree, m.leaf, m.rule, m.left_value, m.right_value);
    }
    RegressionTree operator()(const PruneMove& m) const {
      return prune(tree, m.node, m.value ? &*m.value : nullptr);
    }
    RegressionTree operator()(const ChangeMove& m) const { return change(tree, m.node, m.rule); }
  };
  return std::visit(Visitor{tree}, move);
}

double evaluate(const RegressionTree& tree, std::span<const double> x) {
  if (static_cast<long>(x.size()) <= tree.max_variable()) {
    throw InvalidInput("predictor vector has " + std::to_string(x.size()) +
                       " entries but the tree splits on variable " +
                       std::to_string(tree.max_variable()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidInput("non-finite predictor value");
  }
  return tree.node(tree.find_leaf(x)).value;
}

std::vector<int> leaf_assignments(const RegressionTree& tree, const Matrix& X) {
  if (static_cast<long>(X.cols()) <= tree.max_variable()) {
    throw InvalidInput("predictor matrix has too few columns for this tree");
  }
  for (double v : X.values()) {
    if (!std::isfinite(v)) throw InvalidInput("non-finite predictor value");
  }
  std::vector<int> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out[i] = tree.find_leaf(X.row(i));
  return out;
}

}  // namespace gbart
