#include "roadgame/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>

#include "roadgame/scenario.hpp"  // format_double

namespace roadgame {

using json = nlohmann::json;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int StrategyTree::add_leaf(double value) {
  nodes.push_back({-1, 0.0, -1, -1, value});
  return static_cast<int>(nodes.size()) - 1;
}

int StrategyTree::add_branch(int dim, double threshold, int low, int high) {
  nodes.push_back({dim, threshold, low, high, 0.0});
  return static_cast<int>(nodes.size()) - 1;
}

double StrategyTree::evaluate(const std::vector<double>& s) const {
  int id = root;
  while (!is_leaf(id)) {
    const Node& n = nodes[static_cast<size_t>(id)];
    id = s[static_cast<size_t>(n.dim)] < n.threshold ? n.low : n.high;
  }
  return nodes[static_cast<size_t>(id)].value;
}

int StrategyTree::leaf_count() const {
  int c = 0;
  for (const Node& n : nodes) c += n.dim < 0 ? 1 : 0;
  return c;
}

int StrategyTree::branch_count() const {
  return static_cast<int>(nodes.size()) - leaf_count();
}

int predict(const QTreeStrategy& qs, const std::vector<double>& s) {
  if (s.size() != qs.state_dims.size()) {
    fail(ErrorCode::arity_mismatch,
         "state has " + std::to_string(s.size()) + " dimensions, strategy expects " +
             std::to_string(qs.state_dims.size()));
  }
  int best = 0;
  double best_q = -kInf;
  for (size_t a = 0; a < qs.trees.size(); ++a) {
    const double q = qs.trees[a].evaluate(s);
    if (q > best_q) {
      best_q = q;
      best = static_cast<int>(a);
    }
  }
  return best;
}

int predict(const DecisionTree& dt, const std::vector<double>& s) {
  if (s.size() != dt.state_dims.size()) {
    fail(ErrorCode::arity_mismatch,
         "state has " + std::to_string(s.size()) + " dimensions, tree expects " +
             std::to_string(dt.state_dims.size()));
  }
  const double v = dt.tree.evaluate(s);
  if (v < 0.0) {
    fail(ErrorCode::controller_undefined, "state falls in a region no finite Q-value covers");
  }
  return static_cast<int>(v);
}

namespace {

void collect_boxes(const StrategyTree& tree, int id, int action, std::vector<double>& lo,
                   std::vector<double>& hi, std::vector<LeafBox>& out) {
  const StrategyTree::Node& n = tree.nodes[static_cast<size_t>(id)];
  if (n.dim < 0) {
    if (n.value == -kInf) return;  // unvisited sentinel
    for (size_t d = 0; d < lo.size(); ++d) {
      if (!(lo[d] < hi[d])) return;  // contradictory path, empty region
    }
    out.push_back({lo, hi, n.value, action, 0});
    return;
  }
  const size_t d = static_cast<size_t>(n.dim);
  const double saved_hi = hi[d];
  hi[d] = std::min(hi[d], n.threshold);
  collect_boxes(tree, n.low, action, lo, hi, out);
  hi[d] = saved_hi;
  const double saved_lo = lo[d];
  lo[d] = std::max(lo[d], n.threshold);
  collect_boxes(tree, n.high, action, lo, hi, out);
  lo[d] = saved_lo;
}

}  // namespace

std::vector<LeafBox> enumerate_leaf_boxes(const QTreeStrategy& qs) {
  std::vector<LeafBox> boxes;
  const size_t dims = qs.state_dims.size();
  for (size_t a = 0; a < qs.trees.size(); ++a) {
    std::vector<double> lo(dims, -kInf), hi(dims, kInf);
    collect_boxes(qs.trees[a], qs.trees[a].root, static_cast<int>(a), lo, hi, boxes);
  }
  std::sort(boxes.begin(), boxes.end(), [](const LeafBox& a, const LeafBox& b) {
    if (a.q != b.q) return a.q > b.q;
    if (a.action != b.action) return a.action < b.action;
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.hi < b.hi;
  });
  for (size_t i = 0; i < boxes.size(); ++i) boxes[i].rank = static_cast<int>(i);
  return boxes;
}

namespace {

struct TreeBuilder {
  StrategyTree tree;

  /// Splits the unassigned leaf at `id` until exactly box (clipped to
  /// `region`) remains, then assigns the action. Adds a lower and an upper
  /// branch per dimension where the box bound lies strictly inside the region.
  void carve(int id, std::vector<double> region_lo, std::vector<double> region_hi,
             const LeafBox& box) {
    for (size_t d = 0; d < region_lo.size(); ++d) {
      if (box.lo[d] > region_lo[d]) {
        const int low = tree.add_leaf(DecisionTree::kUnassigned);
        const int high = tree.add_leaf(DecisionTree::kUnassigned);
        StrategyTree::Node& n = tree.nodes[static_cast<size_t>(id)];
        n.dim = static_cast<int>(d);
        n.threshold = box.lo[d];
        n.low = low;
        n.high = high;
        id = high;
        region_lo[d] = box.lo[d];
      }
      if (box.hi[d] < region_hi[d]) {
        const int low = tree.add_leaf(DecisionTree::kUnassigned);
        const int high = tree.add_leaf(DecisionTree::kUnassigned);
        StrategyTree::Node& n = tree.nodes[static_cast<size_t>(id)];
        n.dim = static_cast<int>(d);
        n.threshold = box.hi[d];
        n.low = low;
        n.high = high;
        id = low;
        region_hi[d] = box.hi[d];
      }
    }
    tree.nodes[static_cast<size_t>(id)].value = static_cast<double>(box.action);
  }

  void insert(int id, std::vector<double>& region_lo, std::vector<double>& region_hi,
              const LeafBox& box) {
    const StrategyTree::Node n = tree.nodes[static_cast<size_t>(id)];
    if (n.dim < 0) {
      if (n.value != DecisionTree::kUnassigned) return;  // covered by a better Q
      carve(id, region_lo, region_hi, box);
      return;
    }
    const size_t d = static_cast<size_t>(n.dim);
    if (box.lo[d] < n.threshold) {
      const double saved = region_hi[d];
      region_hi[d] = n.threshold;
      insert(n.low, region_lo, region_hi, box);
      region_hi[d] = saved;
    }
    if (box.hi[d] > n.threshold) {
      const double saved = region_lo[d];
      region_lo[d] = n.threshold;
      insert(n.high, region_lo, region_hi, box);
      region_lo[d] = saved;
    }
  }
};

}  // namespace

DecisionTree qtrees_to_decision_tree(const QTreeStrategy& qs) {
  if (qs.trees.empty()) {
    fail(ErrorCode::invariant_violation, "strategy has no action trees");
  }
  DecisionTree dt;
  dt.state_dims = qs.state_dims;
  dt.actions = qs.actions;

  TreeBuilder builder;
  builder.tree.root = builder.tree.add_leaf(DecisionTree::kUnassigned);
  const size_t dims = qs.state_dims.size();
  std::vector<double> lo(dims, -kInf), hi(dims, kInf);
  for (const LeafBox& box : enumerate_leaf_boxes(qs)) {
    builder.insert(builder.tree.root, lo, hi, box);
  }
  dt.tree = std::move(builder.tree);
  return dt;
}

namespace {

json tree_to_json(const StrategyTree& tree, int id, bool action_leaves) {
  const StrategyTree::Node& n = tree.nodes[static_cast<size_t>(id)];
  if (n.dim < 0) {
    if (action_leaves) {
      if (n.value == DecisionTree::kUnassigned) return json{{"action", nullptr}};
      return json{{"action", static_cast<int>(n.value)}};
    }
    if (std::isinf(n.value)) return json{{"q", nullptr}};
    return json{{"q", n.value}};
  }
  json j;
  j["dim"] = n.dim;
  j["threshold"] = n.threshold;
  j["low"] = tree_to_json(tree, n.low, action_leaves);
  j["high"] = tree_to_json(tree, n.high, action_leaves);
  return j;
}

int tree_from_json(const json& j, StrategyTree& tree, bool action_leaves, size_t n_dims,
                   size_t n_actions, const std::string& path) {
  if (!j.is_object()) fail(ErrorCode::schema_error, "expected object at " + path);
  if (j.contains("dim")) {
    for (const char* field : {"threshold", "low", "high"}) {
      if (!j.contains(field)) {
        fail(ErrorCode::schema_error, "missing field at " + path + "/" + field);
      }
    }
    const int dim = j.at("dim").get<int>();
    if (dim < 0 || static_cast<size_t>(dim) >= n_dims) {
      fail(ErrorCode::schema_error, "dimension out of range at " + path + "/dim");
    }
    const double threshold = j.at("threshold").get<double>();
    if (!std::isfinite(threshold)) {
      fail(ErrorCode::schema_error, "non-finite threshold at " + path + "/threshold");
    }
    const int low = tree_from_json(j.at("low"), tree, action_leaves, n_dims, n_actions,
                                   path + "/low");
    const int high = tree_from_json(j.at("high"), tree, action_leaves, n_dims, n_actions,
                                    path + "/high");
    return tree.add_branch(dim, threshold, low, high);
  }
  const char* leaf_field = action_leaves ? "action" : "q";
  if (!j.contains(leaf_field)) {
    fail(ErrorCode::schema_error, std::string("missing field at ") + path + "/" + leaf_field);
  }
  const json& v = j.at(leaf_field);
  if (v.is_null()) {
    return tree.add_leaf(action_leaves ? DecisionTree::kUnassigned : -kInf);
  }
  if (action_leaves) {
    const int a = v.get<int>();
    if (a < 0 || static_cast<size_t>(a) >= n_actions) {
      fail(ErrorCode::schema_error, "action index out of range at " + path + "/action");
    }
    return tree.add_leaf(static_cast<double>(a));
  }
  if (!v.is_number()) fail(ErrorCode::schema_error, "expected number at " + path + "/q");
  return tree.add_leaf(v.get<double>());
}

json header_json(const char* format, const std::vector<std::string>& dims,
                 const std::vector<std::string>& actions) {
  json j;
  j["format"] = format;
  j["version"] = 1;
  j["state_dims"] = dims;
  j["actions"] = actions;
  return j;
}

void load_header(const json& j, const char* format, std::vector<std::string>& dims,
                 std::vector<std::string>& actions) {
  if (!j.is_object()) fail(ErrorCode::schema_error, "expected object at /");
  if (!j.contains("format") || j.at("format") != format) {
    fail(ErrorCode::schema_error, std::string("expected format '") + format + "' at /format");
  }
  if (!j.contains("state_dims") || !j.at("state_dims").is_array() ||
      j.at("state_dims").empty()) {
    fail(ErrorCode::schema_error, "missing array at /state_dims");
  }
  if (!j.contains("actions") || !j.at("actions").is_array() || j.at("actions").empty()) {
    fail(ErrorCode::schema_error, "missing array at /actions");
  }
  dims = j.at("state_dims").get<std::vector<std::string>>();
  actions = j.at("actions").get<std::vector<std::string>>();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::schema_error, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string save_strategy(const QTreeStrategy& qs) {
  json j = header_json("qtree-strategy", qs.state_dims, qs.actions);
  json trees = json::array();
  for (const StrategyTree& t : qs.trees) {
    trees.push_back(tree_to_json(t, t.root, false));
  }
  j["trees"] = std::move(trees);
  return j.dump(2) + "\n";
}

QTreeStrategy load_strategy(const std::string& json_text) {
  const json j = parse_json(json_text);
  QTreeStrategy qs;
  load_header(j, "qtree-strategy", qs.state_dims, qs.actions);
  if (!j.contains("trees") || !j.at("trees").is_array()) {
    fail(ErrorCode::schema_error, "missing array at /trees");
  }
  if (j.at("trees").size() != qs.actions.size()) {
    fail(ErrorCode::schema_error, "/trees size differs from /actions size");
  }
  size_t i = 0;
  for (const auto& tj : j.at("trees")) {
    StrategyTree t;
    t.root = tree_from_json(tj, t, false, qs.state_dims.size(), qs.actions.size(),
                            "/trees/" + std::to_string(i++));
    qs.trees.push_back(std::move(t));
  }
  return qs;
}

std::string save_decision_tree(const DecisionTree& dt) {
  json j = header_json("decision-tree", dt.state_dims, dt.actions);
  j["tree"] = tree_to_json(dt.tree, dt.tree.root, true);
  return j.dump(2) + "\n";
}

DecisionTree load_decision_tree(const std::string& json_text) {
  const json j = parse_json(json_text);
  DecisionTree dt;
  load_header(j, "decision-tree", dt.state_dims, dt.actions);
  if (!j.contains("tree")) fail(ErrorCode::schema_error, "missing field at /tree");
  dt.tree.root = tree_from_json(j.at("tree"), dt.tree, true, dt.state_dims.size(),
                                dt.actions.size(), "/tree");
  return dt;
}

namespace {

void dot_node(const DecisionTree& dt, int id, int& counter, std::string& out) {
  const int my = counter++;
  const StrategyTree::Node& n = dt.tree.nodes[static_cast<size_t>(id)];
  if (n.dim < 0) {
    const std::string label =
        n.value == DecisionTree::kUnassigned
            ? "unassigned"
            : dt.actions[static_cast<size_t>(n.value)];
    out += "  n" + std::to_string(my) + " [shape=box, label=\"" + label + "\"];\n";
    return;
  }
  out += "  n" + std::to_string(my) + " [label=\"" + dt.state_dims[static_cast<size_t>(n.dim)] +
         " < " + format_double(n.threshold) + "\"];\n";
  const int low_id = counter;
  dot_node(dt, n.low, counter, out);
  const int high_id = counter;
  dot_node(dt, n.high, counter, out);
  out += "  n" + std::to_string(my) + " -> n" + std::to_string(low_id) + " [label=\"yes\"];\n";
  out += "  n" + std::to_string(my) + " -> n" + std::to_string(high_id) + " [label=\"no\"];\n";
}

}  // namespace

std::string export_dot(const DecisionTree& dt) {
  std::string out = "digraph decision_tree {\n";
  int counter = 0;
  dot_node(dt, dt.tree.root, counter, out);
  out += "}\n";
  return out;
}

}  // namespace roadgame
