#include "roadgame/learning.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <random>

#include "roadgame/geometry.hpp"

namespace roadgame {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool wraps_into(const Interval& iv, double angle) {
  for (double cand : {angle, angle + 2.0 * M_PI, angle - 2.0 * M_PI}) {
    if (cand >= iv.lo && cand <= iv.hi) return true;
  }
  return false;
}

}  // namespace

double QTable::value(uint64_t state, int action) const {
  auto it = entries.find({state, action});
  return it == entries.end() ? 0.0 : it->second.q;
}

bool goal(const EgoState& s, const GoalRegion& g) {
  if (!point_in_shape({s.x, s.y}, g.position_shape, g.center, g.orientation)) return false;
  if (s.t < g.time.lo || s.t > g.time.hi) return false;
  if (g.orientation_interval && !wraps_into(*g.orientation_interval, s.theta)) return false;
  if (g.velocity_interval && (s.v < g.velocity_interval->lo || s.v > g.velocity_interval->hi)) {
    return false;
  }
  return true;
}

double reward_value(const RewardWeights& w, const EgoAction& act, bool is_goal,
                    bool is_violation) {
  if (is_goal) return w.goal;
  if (is_violation) return w.violation;
  return w.step + w.accel_cost * std::fabs(act.accel_cmd);
}

double reward(const EgoState& s, const EgoAction& act, const EgoState& s_next,
              const Scenario& sc, const VehicleProfile& profile, const RewardWeights& w) {
  (void)s;
  if (sc.planning_problems.empty()) {
    fail(ErrorCode::invariant_violation, "scenario has no planning problem");
  }
  const auto polys = lanelet_polygons(sc);
  std::vector<OrientedBox> boxes;
  for (const auto& o : sc.obstacles) {
    boxes.push_back(occupancy_box(o.shape, obstacle_state_at(o, s_next.t)));
  }
  const OrientedBox ego{{s_next.x, s_next.y}, profile.length, profile.width, s_next.theta};
  const bool violation =
      offroad(ego, polys) || collide(ego, boxes, profile.margin, profile.circles);
  return reward_value(w, act, goal(s_next, sc.planning_problems.front().goal), violation);
}

namespace {

struct Rollout {
  EgoState ego;
  std::vector<StateRecord> reactive;  // tracked state per reactive obstacle
};

}  // namespace

LearnResult learn(const Scenario& sc, const LearnConfig& cfg, const GridSpec& grid,
                  const DynamicsParams& p, const VehicleProfile& profile,
                  const PermissiveStrategy* shield_strategy, std::ostream* log) {
  if (sc.planning_problems.empty()) {
    fail(ErrorCode::invariant_violation, "scenario has no planning problem");
  }
  const PlanningProblem& pp = sc.planning_problems.front();
  const auto polys = lanelet_polygons(sc);
  const auto actions = ego_actions(p);

  std::vector<const Obstacle*> reactive_obstacles;
  std::vector<const Obstacle*> fixed_obstacles;
  for (const auto& o : sc.obstacles) {
    if (std::holds_alternative<ReactiveBehaviour>(o.behaviour)) {
      reactive_obstacles.push_back(&o);
    } else {
      fixed_obstacles.push_back(&o);
    }
  }

  const EgoState start = EgoState::from_record(pp.initial_state);
  if (shield_strategy) {
    const AbstractState a0 = abstract_of(grid, start);
    if (!shield_strategy->winning(a0)) {
      fail(ErrorCode::not_winning, "initial state is outside the shield's winning region");
    }
  }

  auto allowed_at = [&](const EgoState& s) {
    if (!shield_strategy) {
      std::vector<int> all(9);
      for (int i = 0; i < 9; ++i) all[i] = i;
      return all;
    }
    try {
      return shield(*shield_strategy, s);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::outside_winning_region) {
        fail(ErrorCode::shield_empty,
             std::string("shield closure breach during rollout: ") + e.what());
      }
      throw;
    }
  };

  auto occupied_boxes = [&](const Rollout& r, int t) {
    std::vector<OrientedBox> boxes;
    boxes.reserve(sc.obstacles.size());
    for (const Obstacle* o : fixed_obstacles) {
      boxes.push_back(occupancy_box(o->shape, obstacle_state_at(*o, t)));
    }
    for (size_t i = 0; i < reactive_obstacles.size(); ++i) {
      boxes.push_back(occupancy_box(reactive_obstacles[i]->shape, r.reactive[i]));
    }
    return boxes;
  };

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  LearnResult result;
  for (int episode = 0; episode < cfg.episodes; ++episode) {
    const double frac =
        cfg.episodes > 1 ? static_cast<double>(episode) / (cfg.episodes - 1) : 0.0;
    const double epsilon = cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;

    Rollout r;
    r.ego = start;
    for (const Obstacle* o : reactive_obstacles) {
      r.reactive.push_back(std::get<ReactiveBehaviour>(o->behaviour).initial_state);
    }

    bool reached_goal = false;
    for (int step_i = 0; step_i < cfg.max_steps; ++step_i) {
      const uint64_t key = state_key(grid, abstract_of(grid, r.ego));
      const std::vector<int> allowed = allowed_at(r.ego);

      int action;
      if (unit(rng) < epsilon) {
        std::uniform_int_distribution<size_t> pick(0, allowed.size() - 1);
        action = allowed[pick(rng)];
      } else {
        action = allowed.front();
        double best = -kInf;
        for (int a : allowed) {
          const double q = result.table.value(key, a);
          if (q > best) {
            best = q;
            action = a;
          }
        }
      }

      const EgoState next = step(r.ego, actions[static_cast<size_t>(action)], p);
      for (size_t i = 0; i < reactive_obstacles.size(); ++i) {
        std::uniform_int_distribution<int> pick(0, kReactiveChoices - 1);
        r.reactive[i] = obstacle_moves(*reactive_obstacles[i], r.reactive[i], p)[
            static_cast<size_t>(pick(rng))];
      }

      const OrientedBox ego_box{{next.x, next.y}, profile.length, profile.width, next.theta};
      const bool is_violation = offroad(ego_box, polys) ||
                                collide(ego_box, occupied_boxes(r, next.t), profile.margin,
                                        profile.circles);
      const bool is_goal = goal(next, pp.goal);
      const double rwd =
          reward_value(cfg.rewards, actions[static_cast<size_t>(action)], is_goal, is_violation);

      const bool terminal = is_goal || is_violation;
      double bootstrap = 0.0;
      if (!terminal) {
        const uint64_t next_key = state_key(grid, abstract_of(grid, next));
        const std::vector<int> next_allowed = allowed_at(next);
        bootstrap = -kInf;
        for (int a : next_allowed) {
          bootstrap = std::max(bootstrap, result.table.value(next_key, a));
        }
      }

      QTable::Entry& entry = result.table.entries[{key, action}];
      entry.q += cfg.alpha * (rwd + cfg.gamma * bootstrap - entry.q);
      entry.visits += 1;

      result.transitions += 1;
      if (is_violation) result.violations += 1;

      if (log) {
        nlohmann::json line;
        line["episode"] = episode;
        line["t"] = r.ego.t;
        line["state"] = {r.ego.x, r.ego.y, r.ego.theta, r.ego.v};
        line["action"] = action;
        line["reward"] = rwd;
        line["shield"] = allowed.size();
        line["violation"] = is_violation;
        line["goal"] = is_goal;
        *log << line.dump() << "\n";
      }

      if (terminal) {
        reached_goal = is_goal;
        break;
      }
      r.ego = next;
    }
    if (reached_goal) result.goal_episodes += 1;
  }
  return result;
}

namespace {

struct CellEntry {
  std::array<int, 5> idx;  // x, y, theta, v, t
  double q;
};

double dim_boundary(const GridSpec& g, int dim, int i) {
  switch (dim) {
    case 0: return axis_boundary(g.x, i);
    case 1: return axis_boundary(g.y, i);
    case 2: return axis_boundary(g.theta, i);
    case 3: return axis_boundary(g.v, i);
    default: return static_cast<double>(i);  // time cells are unit-width
  }
}

int build_qtree(StrategyTree& tree, const GridSpec& g, std::vector<CellEntry>& items,
                std::array<int, 5> lo, std::array<int, 5> hi) {
  if (items.empty()) return tree.add_leaf(-kInf);
  bool single_cell = true;
  for (int d = 0; d < 5; ++d) single_cell = single_cell && (hi[d] - lo[d] == 1);
  if (single_cell) return tree.add_leaf(items.front().q);

  int dim = 0, span = 0;
  for (int d = 0; d < 5; ++d) {
    if (hi[d] - lo[d] > span) {
      span = hi[d] - lo[d];
      dim = d;
    }
  }
  const int mid = (lo[static_cast<size_t>(dim)] + hi[static_cast<size_t>(dim)]) / 2;
  std::vector<CellEntry> low_items, high_items;
  for (const CellEntry& e : items) {
    (e.idx[static_cast<size_t>(dim)] < mid ? low_items : high_items).push_back(e);
  }
  auto lo_hi = hi;
  lo_hi[static_cast<size_t>(dim)] = mid;
  auto hi_lo = lo;
  hi_lo[static_cast<size_t>(dim)] = mid;
  const int low = build_qtree(tree, g, low_items, lo, lo_hi);
  const int high = build_qtree(tree, g, high_items, hi_lo, hi);

  // merge equal-valued sibling leaves (covers the all-unvisited case)
  if (tree.is_leaf(low) && tree.is_leaf(high)) {
    const double lv = tree.nodes[static_cast<size_t>(low)].value;
    const double hv = tree.nodes[static_cast<size_t>(high)].value;
    if (lv == hv || (std::isinf(lv) && std::isinf(hv) && lv < 0 && hv < 0)) {
      tree.nodes.pop_back();
      tree.nodes.pop_back();
      return tree.add_leaf(lv);
    }
  }
  return tree.add_branch(dim, dim_boundary(g, dim, mid), low, high);
}

}  // namespace

QTreeStrategy qtable_to_qtrees(const QTable& qt, const GridSpec& g) {
  if (qt.empty()) {
    fail(ErrorCode::invariant_violation, "cannot build trees from an empty Q-table");
  }
  QTreeStrategy qs;
  qs.state_dims = {"x", "y", "theta", "v", "t"};
  for (int a = 0; a < 9; ++a) qs.actions.emplace_back(ego_action_name(a));

  std::array<std::vector<CellEntry>, 9> per_action;
  for (const auto& [key, entry] : qt.entries) {
    uint64_t k = key.first;
    std::array<int, 5> idx{};
    idx[4] = static_cast<int>(k % static_cast<uint64_t>(g.horizon + 1));
    k /= static_cast<uint64_t>(g.horizon + 1);
    idx[3] = static_cast<int>(k % static_cast<uint64_t>(g.v.cells));
    k /= static_cast<uint64_t>(g.v.cells);
    idx[2] = static_cast<int>(k % static_cast<uint64_t>(g.theta.cells));
    k /= static_cast<uint64_t>(g.theta.cells);
    idx[1] = static_cast<int>(k % static_cast<uint64_t>(g.y.cells));
    k /= static_cast<uint64_t>(g.y.cells);
    idx[0] = static_cast<int>(k);
    per_action[static_cast<size_t>(key.second)].push_back({idx, entry.q});
  }

  const std::array<int, 5> lo{0, 0, 0, 0, 0};
  const std::array<int, 5> hi{g.x.cells, g.y.cells, g.theta.cells, g.v.cells, g.horizon + 1};
  for (int a = 0; a < 9; ++a) {
    StrategyTree tree;
    tree.root = build_qtree(tree, g, per_action[static_cast<size_t>(a)], lo, hi);
    qs.trees.push_back(std::move(tree));
  }
  return qs;
}

}  // namespace roadgame
