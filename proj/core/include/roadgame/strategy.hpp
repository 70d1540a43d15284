#pragma once

#include <string>
#include <vector>

#include "roadgame/errors.hpp"

namespace roadgame {

/// Arena-allocated binary tree over a named state space. A node is either a
/// branch (dim, threshold, low, high) or a leaf carrying `value`. Evaluation
/// goes low iff s[dim] < threshold.
struct StrategyTree {
  struct Node {
    int dim = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int low = -1;
    int high = -1;
    double value = 0.0;
    friend bool operator==(const Node&, const Node&) = default;
  };
  std::vector<Node> nodes;
  int root = -1;

  int add_leaf(double value);
  int add_branch(int dim, double threshold, int low, int high);
  bool is_leaf(int id) const { return nodes[static_cast<size_t>(id)].dim < 0; }
  double evaluate(const std::vector<double>& s) const;
  int leaf_count() const;
  int branch_count() const;
  friend bool operator==(const StrategyTree&, const StrategyTree&) = default;
};

/// Per-action Q-value trees; the policy is the argmax over tree outputs.
/// Leaves valued -infinity mark never-visited regions.
struct QTreeStrategy {
  std::vector<std::string> state_dims;
  std::vector<std::string> actions;
  std::vector<StrategyTree> trees;  // one per action
  friend bool operator==(const QTreeStrategy&, const QTreeStrategy&) = default;
};

/// Single tree with action indices in its leaves; -1 marks a region never
/// covered by any finite Q-value.
struct DecisionTree {
  static constexpr double kUnassigned = -1.0;
  std::vector<std::string> state_dims;
  std::vector<std::string> actions;
  StrategyTree tree;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

/// Axis-aligned region [lo, hi) owned by one action-tree leaf.
struct LeafBox {
  std::vector<double> lo;
  std::vector<double> hi;
  double q = 0.0;
  int action = 0;
  int rank = 0;
};

/// Best action at s: largest Q over the action trees, ties broken by the
/// lowest action index. Throws Error(arity_mismatch) on wrong arity.
int predict(const QTreeStrategy& qs, const std::vector<double>& s);

/// Action stored at s in a converted tree. Throws Error(controller_undefined)
/// for unassigned regions.
int predict(const DecisionTree& dt, const std::vector<double>& s);

/// All finite-valued leaves as boxes, sorted by descending Q (ties: lower
/// action index, then lexicographic bounds); rank is the sort position.
/// Empty regions and -infinity leaves are dropped.
std::vector<LeafBox> enumerate_leaf_boxes(const QTreeStrategy& qs);

/// Leaf-sorting conversion: insert boxes best-Q first, carving at most two
/// branch nodes per bounded dimension and skipping regions already covered
/// by a better Q-value.
DecisionTree qtrees_to_decision_tree(const QTreeStrategy& qs);

std::string save_strategy(const QTreeStrategy& qs);
QTreeStrategy load_strategy(const std::string& json_text);

std::string save_decision_tree(const DecisionTree& dt);
DecisionTree load_decision_tree(const std::string& json_text);

/// Graphviz text with deterministic preorder node numbering.
std::string export_dot(const DecisionTree& dt);

}  // namespace roadgame
