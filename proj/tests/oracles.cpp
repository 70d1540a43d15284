#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracles {

using namespace roadgame;

namespace {

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double abx = b.x - a.x, aby = b.y - a.y;
  const double len2 = abx * abx + aby * aby;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double cx = a.x + t * abx, cy = a.y + t * aby;
  return std::hypot(p.x - cx, p.y - cy);
}

bool overlap_by_separating_axes(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  auto has_separating_axis = [](const std::vector<Point2>& poly, const std::vector<Point2>& p,
                                const std::vector<Point2>& q) {
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
      const Point2& u = poly[i];
      const Point2& v = poly[(i + 1) % n];
      const double nx = -(v.y - u.y), ny = v.x - u.x;
      double p_lo = std::numeric_limits<double>::infinity(), p_hi = -p_lo;
      for (const auto& pt : p) {
        const double proj = pt.x * nx + pt.y * ny;
        p_lo = std::min(p_lo, proj);
        p_hi = std::max(p_hi, proj);
      }
      double q_lo = std::numeric_limits<double>::infinity(), q_hi = -q_lo;
      for (const auto& pt : q) {
        const double proj = pt.x * nx + pt.y * ny;
        q_lo = std::min(q_lo, proj);
        q_hi = std::max(q_hi, proj);
      }
      if (p_hi < q_lo || q_hi < p_lo) return true;
    }
    return false;
  };
  return !has_separating_axis(a, a, b) && !has_separating_axis(b, a, b);
}

}  // namespace

double convex_polygon_distance(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  if (overlap_by_separating_axes(a, b)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) {
      best = std::min(best, point_segment_distance(a[i], b[j], b[(j + 1) % b.size()]));
      best = std::min(best, point_segment_distance(b[j], a[i], a[(i + 1) % a.size()]));
    }
  }
  return best;
}

std::vector<Point2> box_polygon(const OrientedBox& b) {
  const double c = std::cos(b.orientation), s = std::sin(b.orientation);
  const double hl = 0.5 * b.length, hw = 0.5 * b.width;
  std::vector<Point2> out;
  for (const auto& [lx, ly] : std::vector<std::pair<double, double>>{
           {hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}}) {
    out.push_back({b.center.x + lx * c - ly * s, b.center.y + lx * s + ly * c});
  }
  return out;
}

SimplePose integrate_reference(SimplePose s, double accel, double yaw, double period,
                               int substeps, double v_max) {
  const double dt = period / substeps;
  for (int i = 0; i < substeps; ++i) {
    const SimplePose prev = s;
    s.x = prev.x + dt * prev.v * std::cos(prev.theta);
    s.y = prev.y + dt * prev.v * std::sin(prev.theta);
    s.theta = prev.theta + dt * yaw;
    s.v = std::min(std::max(prev.v + dt * accel, 0.0), v_max);
  }
  return s;
}

FixpointResult brute_force_fixpoint(int n_states, int n_actions,
                                    const std::vector<std::vector<std::vector<int>>>& succ,
                                    const std::set<int>& bad) {
  std::set<int> winning;
  for (int s = 0; s < n_states; ++s) {
    if (!bad.count(s)) winning.insert(s);
  }
  while (true) {
    std::set<int> keep;
    for (int s : winning) {
      bool terminal = true;
      for (int a = 0; a < n_actions; ++a) terminal = terminal && succ[s][a].empty();
      if (terminal) {
        keep.insert(s);
        continue;
      }
      for (int a = 0; a < n_actions; ++a) {
        if (succ[s][a].empty()) continue;
        bool ok = true;
        for (int q : succ[s][a]) ok = ok && winning.count(q) > 0;
        if (ok) {
          keep.insert(s);
          break;
        }
      }
    }
    if (keep == winning) break;
    winning = keep;
  }
  FixpointResult out;
  out.winning = winning;
  for (int s : winning) {
    bool terminal = true;
    for (int a = 0; a < n_actions; ++a) terminal = terminal && succ[s][a].empty();
    std::set<int> acts;
    for (int a = 0; a < n_actions; ++a) {
      if (succ[s][a].empty()) {
        if (terminal) acts.insert(a);
        continue;
      }
      bool ok = true;
      for (int q : succ[s][a]) ok = ok && winning.count(q) > 0;
      if (ok) acts.insert(a);
    }
    out.allowed[s] = acts;
  }
  return out;
}

std::vector<std::vector<double>> value_iteration(const ChainMdp& mdp) {
  // q[t][s*A + a] for t in 0..horizon-1, terminal value 0 beyond the horizon
  std::vector<std::vector<double>> q(
      static_cast<size_t>(mdp.horizon),
      std::vector<double>(static_cast<size_t>(mdp.n_states * mdp.n_actions), 0.0));
  for (int t = mdp.horizon - 1; t >= 0; --t) {
    for (int s = 0; s < mdp.n_states; ++s) {
      for (int a = 0; a < mdp.n_actions; ++a) {
        const int ns = mdp.next[static_cast<size_t>(s)][static_cast<size_t>(a)];
        const bool reaches_goal = ns == mdp.goal_state;
        double value = reaches_goal ? mdp.goal_reward : mdp.step_reward;
        if (!reaches_goal && t + 1 < mdp.horizon) {
          double best = -std::numeric_limits<double>::infinity();
          for (int na = 0; na < mdp.n_actions; ++na) {
            best = std::max(best, q[static_cast<size_t>(t + 1)]
                                   [static_cast<size_t>(ns * mdp.n_actions + na)]);
          }
          value += best;
        }
        q[static_cast<size_t>(t)][static_cast<size_t>(s * mdp.n_actions + a)] = value;
      }
    }
  }
  return q;
}

double evaluate_tree_recursive(const StrategyTree& tree, int node, const std::vector<double>& s) {
  const StrategyTree::Node& n = tree.nodes[static_cast<size_t>(node)];
  if (n.dim < 0) return n.value;
  if (s[static_cast<size_t>(n.dim)] < n.threshold) {
    return evaluate_tree_recursive(tree, n.low, s);
  }
  return evaluate_tree_recursive(tree, n.high, s);
}

int axis_index_scan(const GridAxis& axis, double value) {
  if (value < axis.lo || value > axis.hi) return -1;
  int idx = 0;
  for (int i = 1; i < axis.cells; ++i) {
    if (value >= axis.lo + i * (axis.hi - axis.lo) / axis.cells) idx = i;
  }
  return idx;
}

bool world_bad(const Scenario& sc, const EgoState& ego,
               const std::vector<StateRecord>& reactive, const DynamicsParams& p,
               const VehicleProfile& profile) {
  (void)p;
  const auto polys = lanelet_polygons(sc);
  const OrientedBox ego_box{{ego.x, ego.y}, profile.length, profile.width, ego.theta};
  if (offroad(ego_box, polys)) return true;
  std::vector<OrientedBox> boxes;
  size_t r = 0;
  for (const auto& o : sc.obstacles) {
    if (std::holds_alternative<ReactiveBehaviour>(o.behaviour)) {
      boxes.push_back(occupancy_box(o.shape, reactive[r++]));
    } else {
      boxes.push_back(occupancy_box(o.shape, obstacle_state_at(o, ego.t)));
    }
  }
  return collide(ego_box, boxes, profile.margin, profile.circles);
}

namespace {

std::vector<const Obstacle*> reactive_obstacles(const Scenario& sc) {
  std::vector<const Obstacle*> out;
  for (const auto& o : sc.obstacles) {
    if (std::holds_alternative<ReactiveBehaviour>(o.behaviour)) out.push_back(&o);
  }
  return out;
}

LayeredWorld initial_world(const Scenario& sc) {
  LayeredWorld w;
  w.ego = EgoState::from_record(sc.planning_problems.front().initial_state);
  for (const Obstacle* o : reactive_obstacles(sc)) {
    w.reactive.push_back(std::get<ReactiveBehaviour>(o->behaviour).initial_state);
  }
  return w;
}

std::vector<int64_t> world_key(const LayeredWorld& w) {
  auto quantize = [](double v) { return std::llround(v * 1e6); };
  std::vector<int64_t> key{w.ego.t, quantize(w.ego.x), quantize(w.ego.y), quantize(w.ego.theta),
                           quantize(w.ego.v)};
  for (const auto& r : w.reactive) {
    key.push_back(quantize(r.position.x));
    key.push_back(quantize(r.position.y));
    key.push_back(quantize(r.orientation));
    key.push_back(quantize(r.velocity));
  }
  return key;
}

std::vector<LayeredWorld> successors(const Scenario& sc, const LayeredWorld& w, int action,
                                     const DynamicsParams& p) {
  const auto actions = ego_actions(p);
  const auto reactive = reactive_obstacles(sc);
  std::vector<LayeredWorld> out;
  std::vector<std::vector<StateRecord>> choices;
  for (size_t i = 0; i < reactive.size(); ++i) {
    choices.push_back(obstacle_moves(*reactive[i], w.reactive[i], p));
  }
  std::vector<size_t> digits(reactive.size(), 0);
  while (true) {
    LayeredWorld next;
    next.ego = step(w.ego, actions[static_cast<size_t>(action)], p);
    for (size_t i = 0; i < reactive.size(); ++i) next.reactive.push_back(choices[i][digits[i]]);
    out.push_back(std::move(next));
    size_t i = 0;
    while (i < digits.size() && ++digits[i] == choices[i].size()) {
      digits[i] = 0;
      ++i;
    }
    if (digits.empty() || i == digits.size()) break;
  }
  return out;
}

}  // namespace

bool enum_safety_under(const Scenario& sc, const Controller& c, const DynamicsParams& p,
                       const VehicleProfile& profile, int horizon) {
  std::vector<LayeredWorld> layer{initial_world(sc)};
  for (int t = 0; t <= horizon; ++t) {
    std::map<std::vector<int64_t>, LayeredWorld> next;
    for (const auto& w : layer) {
      if (world_bad(sc, w.ego, w.reactive, p, profile)) return false;
      if (t == horizon) continue;
      for (auto& n : successors(sc, w, c.action(w.ego), p)) {
        next.emplace(world_key(n), std::move(n));
      }
    }
    layer.clear();
    for (auto& [key, w] : next) layer.push_back(std::move(w));
  }
  return true;
}

bool enum_goal_under(const Scenario& sc, const Controller& c, const DynamicsParams& p,
                     const VehicleProfile& profile, int horizon) {
  (void)profile;
  const GoalRegion& g = sc.planning_problems.front().goal;
  std::vector<LayeredWorld> layer{initial_world(sc)};
  for (int t = 0; t <= horizon; ++t) {
    std::vector<LayeredWorld> continuing;
    for (const auto& w : layer) {
      if (goal(w.ego, g)) continue;  // this path succeeded
      if (t == horizon) return false;
      continuing.push_back(w);
    }
    if (t == horizon) return true;
    std::map<std::vector<int64_t>, LayeredWorld> next;
    for (const auto& w : continuing) {
      for (auto& n : successors(sc, w, c.action(w.ego), p)) {
        next.emplace(world_key(n), std::move(n));
      }
    }
    layer.clear();
    for (auto& [key, w] : next) layer.push_back(std::move(w));
  }
  return true;
}

bool enum_exists_safe(const Scenario& sc, const DynamicsParams& p,
                      const VehicleProfile& profile, int horizon) {
  std::map<std::vector<int64_t>, LayeredWorld> layer;
  {
    LayeredWorld w0 = initial_world(sc);
    if (world_bad(sc, w0.ego, w0.reactive, p, profile)) return false;
    layer.emplace(world_key(w0), std::move(w0));
  }
  for (int t = 0; t < horizon; ++t) {
    std::map<std::vector<int64_t>, LayeredWorld> next;
    for (const auto& [key, w] : layer) {
      for (int a = 0; a < 9; ++a) {
        for (auto& n : successors(sc, w, a, p)) {
          if (!world_bad(sc, n.ego, n.reactive, p, profile)) {
            next.emplace(world_key(n), std::move(n));
          }
        }
      }
    }
    if (next.empty()) return false;
    layer = std::move(next);
  }
  return true;
}

}  // namespace oracles
