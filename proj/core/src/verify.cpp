#include "roadgame/verify.hpp"

#include <cmath>
#include <deque>
#include <json.hpp>
#include <map>
#include <random>

#include "roadgame/geometry.hpp"
#include "roadgame/learning.hpp"

namespace roadgame {

int PermissiveController::action(const EgoState& s) const {
  return shield(*ps_, s).front();
}

int GreedyController::action(const EgoState& s) const {
  return predict(*qs_, {s.x, s.y, s.theta, s.v, static_cast<double>(s.t)});
}

int TreeController::action(const EgoState& s) const {
  return predict(*dt_, {s.x, s.y, s.theta, s.v, static_cast<double>(s.t)});
}

namespace {

constexpr double kQuantum = 1e-6;

struct WorldState {
  EgoState ego;
  std::vector<StateRecord> reactive;
};

int64_t quantized(double v) { return std::llround(v / kQuantum); }

std::vector<int64_t> world_key(const WorldState& w) {
  std::vector<int64_t> key;
  key.reserve(5 + 4 * w.reactive.size());
  key.push_back(w.ego.t);
  key.push_back(quantized(w.ego.x));
  key.push_back(quantized(w.ego.y));
  key.push_back(quantized(w.ego.theta));
  key.push_back(quantized(w.ego.v));
  for (const auto& r : w.reactive) {
    key.push_back(quantized(r.position.x));
    key.push_back(quantized(r.position.y));
    key.push_back(quantized(r.orientation));
    key.push_back(quantized(r.velocity));
  }
  return key;
}

/// Shared closed-loop machinery: obstacle partitioning, drivability test and
/// successor generation.
struct ClosedLoop {
  const Scenario& sc;
  const DynamicsParams& p;
  const VehicleProfile& profile;
  std::vector<LaneletPolygon> polys;
  std::vector<const Obstacle*> fixed;
  std::vector<const Obstacle*> reactive;
  std::array<EgoAction, 9> actions;

  ClosedLoop(const Scenario& scenario, const DynamicsParams& params,
             const VehicleProfile& prof)
      : sc(scenario), p(params), profile(prof), polys(lanelet_polygons(scenario)),
        actions(ego_actions(params)) {
    if (sc.planning_problems.empty()) {
      fail(ErrorCode::invariant_violation, "scenario has no planning problem");
    }
    for (const auto& o : sc.obstacles) {
      if (std::holds_alternative<ReactiveBehaviour>(o.behaviour)) {
        reactive.push_back(&o);
      } else {
        fixed.push_back(&o);
      }
    }
  }

  WorldState initial() const {
    WorldState w;
    w.ego = EgoState::from_record(sc.planning_problems.front().initial_state);
    for (const Obstacle* o : reactive) {
      w.reactive.push_back(std::get<ReactiveBehaviour>(o->behaviour).initial_state);
    }
    return w;
  }

  bool bad(const WorldState& w) const {
    const OrientedBox ego{{w.ego.x, w.ego.y}, profile.length, profile.width, w.ego.theta};
    if (offroad(ego, polys)) return true;
    std::vector<OrientedBox> boxes;
    boxes.reserve(sc.obstacles.size());
    for (const Obstacle* o : fixed) {
      boxes.push_back(occupancy_box(o->shape, obstacle_state_at(*o, w.ego.t)));
    }
    for (size_t i = 0; i < reactive.size(); ++i) {
      boxes.push_back(occupancy_box(reactive[i]->shape, w.reactive[i]));
    }
    return collide(ego, boxes, profile.margin, profile.circles);
  }

  /// All reactive choice vectors in lexicographic order.
  std::vector<std::vector<int>> choice_vectors() const {
    std::vector<std::vector<int>> out;
    std::vector<int> digits(reactive.size(), 0);
    while (true) {
      out.push_back(digits);
      size_t i = 0;
      while (i < digits.size() && ++digits[i] == kReactiveChoices) {
        digits[i] = 0;
        ++i;
      }
      if (i == digits.size() && !digits.empty()) break;
      if (digits.empty()) break;
    }
    return out;
  }

  WorldState advance(const WorldState& w, int action, const std::vector<int>& choices) const {
    WorldState next;
    next.ego = step(w.ego, actions[static_cast<size_t>(action)], p);
    next.reactive.reserve(w.reactive.size());
    for (size_t i = 0; i < w.reactive.size(); ++i) {
      next.reactive.push_back(
          obstacle_moves(*reactive[i], w.reactive[i], p)[static_cast<size_t>(choices[i])]);
    }
    return next;
  }

  int controller_action(const Controller& c, const EgoState& s) const {
    try {
      return c.action(s);
    } catch (const Error& e) {
      fail(ErrorCode::controller_undefined,
           std::string("controller undefined at state (") + format_double(s.x) + ", " +
               format_double(s.y) + ", " + format_double(s.theta) + ", " + format_double(s.v) +
               ", t=" + std::to_string(s.t) + "): " + e.what());
    }
  }
};

}  // namespace

Verdict check_safety_under(const Scenario& sc, const Controller& c, const DynamicsParams& p,
                           const VehicleProfile& profile, int horizon) {
  ClosedLoop loop(sc, p, profile);
  const auto choices = loop.choice_vectors();

  struct NodeMeta {
    int parent = -1;
    int action = -1;
    std::vector<int> choice;
  };
  std::vector<WorldState> nodes{loop.initial()};
  std::vector<NodeMeta> meta{NodeMeta{}};
  std::map<std::vector<int64_t>, int> seen;
  seen.emplace(world_key(nodes[0]), 0);

  Verdict verdict;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    const WorldState w = nodes[static_cast<size_t>(id)];
    verdict.states_explored += 1;

    if (loop.bad(w)) {
      std::vector<int> chain;
      for (int cur = id; cur >= 0; cur = meta[static_cast<size_t>(cur)].parent) {
        chain.push_back(cur);
      }
      std::reverse(chain.begin(), chain.end());
      std::vector<TraceStep> trace(chain.size());
      for (size_t i = 0; i < chain.size(); ++i) {
        trace[i].state = nodes[static_cast<size_t>(chain[i])].ego;
        if (i + 1 < chain.size()) {
          // the edge into chain[i+1] carries the action and choices taken at i
          trace[i].action = meta[static_cast<size_t>(chain[i + 1])].action;
          trace[i].obstacle_choices = meta[static_cast<size_t>(chain[i + 1])].choice;
        }
      }
      verdict.holds = false;
      verdict.counterexample = std::move(trace);
      return verdict;
    }

    if (w.ego.t >= horizon) continue;
    const int action = loop.controller_action(c, w.ego);
    for (const auto& choice : choices) {
      WorldState next = loop.advance(w, action, choice);
      auto key = world_key(next);
      if (seen.count(key)) continue;
      const int nid = static_cast<int>(nodes.size());
      nodes.push_back(std::move(next));
      meta.push_back({id, action, choice});
      seen.emplace(std::move(key), nid);
      queue.push_back(nid);
    }
  }
  verdict.holds = true;
  return verdict;
}

namespace {

struct GoalSearch {
  const ClosedLoop& loop;
  const Controller& c;
  const GoalRegion& goal_region;
  int horizon;
  std::map<std::vector<int64_t>, bool> memo;

  struct FailEdge {
    bool terminal = false;
    int action = -1;
    std::vector<int> choice;
  };
  std::map<std::vector<int64_t>, FailEdge> fail_edges;
  long explored = 0;

  bool all_paths_reach(const WorldState& w) {
    const auto key = world_key(w);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    explored += 1;

    bool result;
    if (goal(w.ego, goal_region)) {
      result = true;
    } else if (w.ego.t >= horizon) {
      result = false;
      fail_edges[key] = {true, -1, {}};
    } else {
      const int action = loop.controller_action(c, w.ego);
      result = true;
      for (const auto& choice : loop.choice_vectors()) {
        const WorldState next = loop.advance(w, action, choice);
        if (!all_paths_reach(next)) {
          result = false;
          fail_edges[key] = {false, action, choice};
          break;
        }
      }
    }
    memo.emplace(key, result);
    return result;
  }

  std::vector<TraceStep> failing_trace(const WorldState& start) {
    std::vector<TraceStep> trace;
    WorldState w = start;
    while (true) {
      const auto it = fail_edges.find(world_key(w));
      TraceStep step;
      step.state = w.ego;
      if (it == fail_edges.end() || it->second.terminal) {
        trace.push_back(step);
        return trace;
      }
      step.action = it->second.action;
      step.obstacle_choices = it->second.choice;
      trace.push_back(step);
      w = loop.advance(w, it->second.action, it->second.choice);
    }
  }
};

}  // namespace

Verdict check_goal_under(const Scenario& sc, const Controller& c, const DynamicsParams& p,
                         const VehicleProfile& profile, int horizon) {
  ClosedLoop loop(sc, p, profile);
  GoalSearch search{loop, c, sc.planning_problems.front().goal, horizon, {}, {}, 0};
  const WorldState start = loop.initial();
  Verdict verdict;
  verdict.holds = search.all_paths_reach(start);
  verdict.states_explored = search.explored;
  if (!verdict.holds) verdict.counterexample = search.failing_trace(start);
  return verdict;
}

namespace {

struct ExistsSearch {
  const ClosedLoop& loop;
  int horizon;
  std::map<std::vector<int64_t>, bool> memo;
  long explored = 0;

  bool exists_safe(const WorldState& w) {
    const auto key = world_key(w);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    explored += 1;

    bool result = false;
    if (loop.bad(w)) {
      result = false;
    } else if (w.ego.t >= horizon) {
      result = true;
    } else {
      for (int a = 0; a < 9 && !result; ++a) {
        for (const auto& choice : loop.choice_vectors()) {
          if (exists_safe(loop.advance(w, a, choice))) {
            result = true;
            break;
          }
        }
      }
    }
    memo.emplace(key, result);
    return result;
  }
};

}  // namespace

Verdict check_exists_safe(const Scenario& sc, const DynamicsParams& p,
                          const VehicleProfile& profile, const GridSpec& g) {
  ClosedLoop loop(sc, p, profile);
  ExistsSearch search{loop, g.horizon, {}, 0};
  const WorldState start = loop.initial();
  Verdict verdict;
  verdict.holds = search.exists_safe(start);
  verdict.states_explored = search.explored;
  if (!verdict.holds) {
    // every path runs into a bad state; exhibit the all-first-choices one
    std::vector<TraceStep> trace;
    WorldState w = start;
    const std::vector<int> choice(loop.reactive.size(), 0);
    while (!loop.bad(w) && w.ego.t < g.horizon) {
      trace.push_back({w.ego, 0, choice});
      w = loop.advance(w, 0, choice);
    }
    trace.push_back({w.ego, -1, {}});
    verdict.counterexample = std::move(trace);
  }
  return verdict;
}

Trajectory simulate(const Scenario& sc, const Controller& c, const DynamicsParams& p,
                    uint64_t seed, int horizon) {
  VehicleProfile unused_profile;
  ClosedLoop loop(sc, p, unused_profile);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, kReactiveChoices - 1);

  WorldState w = loop.initial();
  Trajectory out;
  out.reserve(static_cast<size_t>(horizon) + 1);
  for (int t = 0; t < horizon; ++t) {
    out.push_back(w.ego.to_record());
    const int action = loop.controller_action(c, w.ego);
    std::vector<int> choice(loop.reactive.size());
    for (auto& digit : choice) digit = pick(rng);
    w = loop.advance(w, action, choice);
  }
  out.push_back(w.ego.to_record());
  return out;
}

Scenario inject_trajectory(const Scenario& sc, const Trajectory& tr, const Shape& shape) {
  if (tr.empty()) {
    fail(ErrorCode::invariant_violation, "cannot inject an empty trajectory");
  }
  for (size_t i = 0; i < tr.size(); ++i) {
    if (tr[i].time_step != static_cast<int>(i)) {
      fail(ErrorCode::invariant_violation,
           "trajectory time steps must be consecutive from 0");
    }
  }
  int max_id = 0;
  for (const auto& l : sc.lanelets) max_id = std::max(max_id, l.id);
  for (const auto& o : sc.obstacles) max_id = std::max(max_id, o.id);
  for (const auto& pp : sc.planning_problems) max_id = std::max(max_id, pp.id);

  Scenario out = sc;
  Obstacle ego;
  ego.id = max_id + 1;
  ego.type = ObstacleType::car;
  ego.shape = shape;
  ego.role = ObstacleRole::dynamic_obstacle;
  ego.behaviour = TrajectoryBehaviour{tr};
  out.obstacles.push_back(std::move(ego));
  return out;
}

std::string trace_to_json_lines(const std::vector<TraceStep>& trace) {
  std::string out;
  for (const auto& step : trace) {
    nlohmann::json j;
    j["t"] = step.state.t;
    j["state"] = {step.state.x, step.state.y, step.state.theta, step.state.v, step.state.a};
    if (step.action >= 0) {
      j["action"] = step.action;
      j["obstacle_choices"] = step.obstacle_choices;
    }
    out += j.dump();
    out += "\n";
  }
  return out;
}

}  // namespace roadgame
