#include "roadgame/safety_game.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <json.hpp>
#include <string>

#include "roadgame/learning.hpp"

namespace roadgame {

using json = nlohmann::json;

double axis_boundary(const GridAxis& axis, int i) {
  if (i <= 0) return axis.lo;
  if (i >= axis.cells) return axis.hi;
  return axis.lo + i * (axis.hi - axis.lo) / axis.cells;
}

int axis_index(const GridAxis& axis, double value) {
  if (!(value >= axis.lo) || !(value <= axis.hi)) return -1;
  // count inner boundaries <= value; a value on a boundary goes to the higher cell
  int lo = 0, hi = axis.cells - 1;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (value >= axis_boundary(axis, mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

double axis_center(const GridAxis& axis, int i) {
  return 0.5 * (axis_boundary(axis, i) + axis_boundary(axis, i + 1));
}

GridSpec default_grid(const Scenario& sc, const DynamicsParams& p, const VehicleProfile& profile,
                      int xy_cells, int theta_cells, int v_cells, int horizon) {
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x;
  for (const auto& l : sc.lanelets) {
    for (const auto* bound : {&l.left_bound, &l.right_bound}) {
      for (const auto& pt : *bound) {
        lo_x = std::min(lo_x, pt.x);
        hi_x = std::max(hi_x, pt.x);
        lo_y = std::min(lo_y, pt.y);
        hi_y = std::max(hi_y, pt.y);
      }
    }
  }
  const double reach = p.v_max * p.period;
  const double pad = reach + 0.5 * std::hypot(profile.length, profile.width) + 1.0;
  GridSpec g;
  g.x = {lo_x - pad, hi_x + pad, xy_cells};
  g.y = {lo_y - pad, hi_y + pad, xy_cells};
  g.theta = {-M_PI, M_PI, theta_cells};
  g.v = {0.0, p.v_max, v_cells};
  g.horizon = horizon;
  return g;
}

uint64_t state_key(const GridSpec& g, const AbstractState& s) {
  uint64_t key = static_cast<uint64_t>(s.ix);
  key = key * static_cast<uint64_t>(g.y.cells) + static_cast<uint64_t>(s.iy);
  key = key * static_cast<uint64_t>(g.theta.cells) + static_cast<uint64_t>(s.itheta);
  key = key * static_cast<uint64_t>(g.v.cells) + static_cast<uint64_t>(s.iv);
  key = key * static_cast<uint64_t>(g.horizon + 1) + static_cast<uint64_t>(s.t);
  return key;
}

AbstractState abstract_of(const GridSpec& g, const EgoState& s) {
  AbstractState a;
  a.ix = axis_index(g.x, s.x);
  a.iy = axis_index(g.y, s.y);
  a.itheta = axis_index(g.theta, s.theta);
  a.iv = axis_index(g.v, s.v);
  a.t = s.t;
  if (a.ix < 0 || a.iy < 0 || a.itheta < 0 || a.iv < 0) {
    fail(ErrorCode::grid_too_coarse,
         "state (" + format_double(s.x) + ", " + format_double(s.y) + ", " +
             format_double(s.theta) + ", " + format_double(s.v) +
             ") leaves the gridded region at step " + std::to_string(s.t));
  }
  return a;
}

EgoState cell_center_state(const GridSpec& g, const AbstractState& s) {
  EgoState e;
  e.x = axis_center(g.x, s.ix);
  e.y = axis_center(g.y, s.iy);
  e.theta = axis_center(g.theta, s.itheta);
  e.v = axis_center(g.v, s.iv);
  e.a = 0.0;
  e.t = s.t;
  return e;
}

int GameGraph::add_state(const AbstractState& s, bool is_bad, bool is_goal) {
  const int id = static_cast<int>(states.size());
  states.push_back(s);
  bad.push_back(is_bad ? 1 : 0);
  goal.push_back(is_goal ? 1 : 0);
  successors.emplace_back(n_actions);
  index.emplace(state_key(grid, s), id);
  return id;
}

void GameGraph::add_edge(int state, int action, int succ) {
  successors[static_cast<size_t>(state)][static_cast<size_t>(action)].push_back(succ);
}

bool GameGraph::terminal(int state) const {
  for (const auto& list : successors[static_cast<size_t>(state)]) {
    if (!list.empty()) return false;
  }
  return true;
}

namespace {

/// Per-step occupancy of every obstacle. Reactive obstacles are covered by
/// the hull of their reachable straight-line positions (all choice
/// sequences lie between the always-brake and always-accelerate paths).
std::vector<std::vector<OrientedBox>> obstacle_boxes_per_step(const Scenario& sc,
                                                              const DynamicsParams& p,
                                                              int horizon) {
  std::vector<std::vector<OrientedBox>> per_step(static_cast<size_t>(horizon) + 1);
  for (const auto& o : sc.obstacles) {
    if (std::holds_alternative<ReactiveBehaviour>(o.behaviour)) {
      const StateRecord start = std::get<ReactiveBehaviour>(o.behaviour).initial_state;
      const double heading = start.orientation;
      const double cos_h = std::cos(heading);
      const double sin_h = std::sin(heading);
      StateRecord slow = start;
      StateRecord fast = start;
      const OrientedBox base = occupancy_box(o.shape, start);
      for (int t = 0; t <= horizon; ++t) {
        const double d_slow =
            (slow.position.x - start.position.x) * cos_h + (slow.position.y - start.position.y) * sin_h;
        const double d_fast =
            (fast.position.x - start.position.x) * cos_h + (fast.position.y - start.position.y) * sin_h;
        const double mid = 0.5 * (d_slow + d_fast);
        OrientedBox envelope = base;
        envelope.center = {start.position.x + mid * cos_h, start.position.y + mid * sin_h};
        envelope.length = base.length + (d_fast - d_slow);
        per_step[static_cast<size_t>(t)].push_back(envelope);
        if (t < horizon) {
          slow = obstacle_moves(o, slow, p)[1];  // brake
          fast = obstacle_moves(o, fast, p)[2];  // accelerate
        }
      }
    } else {
      for (int t = 0; t <= horizon; ++t) {
        per_step[static_cast<size_t>(t)].push_back(
            occupancy_box(o.shape, obstacle_state_at(o, t)));
      }
    }
  }
  return per_step;
}

// Cells are half-open: the lower boundary is in the cell and is sampled
// exactly (clamped dynamics produce such states), while the upper boundary
// belongs to the next cell and is sampled a hair inside.
constexpr double kCornerInset = 1e-6;

double corner_value(const GridAxis& axis, int cell, int side) {
  if (side == 0) return axis_boundary(axis, cell);
  const double width = (axis.hi - axis.lo) / axis.cells;
  return axis_boundary(axis, cell + 1) - kCornerInset * width;
}

std::vector<EgoState> cell_representatives(const GridSpec& g, const AbstractState& s,
                                           AbstractionMode mode) {
  std::vector<EgoState> reps;
  reps.push_back(cell_center_state(g, s));
  if (mode == AbstractionMode::center) return reps;
  reps.reserve(17);
  for (int cx = 0; cx < 2; ++cx) {
    for (int cy = 0; cy < 2; ++cy) {
      for (int ct = 0; ct < 2; ++ct) {
        for (int cv = 0; cv < 2; ++cv) {
          EgoState e;
          e.x = corner_value(g.x, s.ix, cx);
          e.y = corner_value(g.y, s.iy, cy);
          e.theta = corner_value(g.theta, s.itheta, ct);
          e.v = corner_value(g.v, s.iv, cv);
          e.a = 0.0;
          e.t = s.t;
          reps.push_back(e);
        }
      }
    }
  }
  return reps;
}

}  // namespace

namespace {

struct ImageInterval {
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x;
  double lo_theta = lo_x, hi_theta = -lo_x;
  double lo_v = lo_x, hi_v = -lo_x;

  void absorb(const EgoState& s) {
    lo_x = std::min(lo_x, s.x);
    hi_x = std::max(hi_x, s.x);
    lo_y = std::min(lo_y, s.y);
    hi_y = std::max(hi_y, s.y);
    lo_theta = std::min(lo_theta, s.theta);
    hi_theta = std::max(hi_theta, s.theta);
    lo_v = std::min(lo_v, s.v);
    hi_v = std::max(hi_v, s.v);
  }
};

int axis_index_checked(const GridAxis& axis, double value, const AbstractState& st,
                       const char* name) {
  const int idx = axis_index(axis, value);
  if (idx < 0) {
    fail(ErrorCode::grid_too_coarse,
         std::string("successor leaves the gridded region on axis ") + name + " (value " +
             format_double(value) + ") from cell at step " + std::to_string(st.t));
  }
  return idx;
}

/// Cell index of an image supremum: a value bit-exactly on an inner boundary
/// was never attained (the source upper corner lies in the next cell), so it
/// maps to the cell below. The clamped axis ends stay inclusive.
int sup_index(const GridAxis& axis, double value, int lo_index, const AbstractState& st) {
  int idx = axis_index_checked(axis, value, st, "sup");
  if (idx > 0 && value == axis_boundary(axis, idx)) idx -= 1;
  return std::max(idx, lo_index);
}

}  // namespace

GameGraph build_game(const Scenario& sc, const GridSpec& g, const DynamicsParams& p,
                     AbstractionMode mode, const VehicleProfile& profile) {
  if (sc.planning_problems.empty()) {
    fail(ErrorCode::invariant_violation, "scenario has no planning problem");
  }
  const PlanningProblem& pp = sc.planning_problems.front();
  const auto polys = lanelet_polygons(sc);
  const auto boxes = obstacle_boxes_per_step(sc, p, g.horizon);
  const auto actions = ego_actions(p);

  GameGraph gg;
  gg.grid = g;
  gg.n_actions = 9;

  auto is_bad = [&](const AbstractState& s) {
    for (const EgoState& rep : cell_representatives(g, s, mode)) {
      const OrientedBox ego{{rep.x, rep.y}, profile.length, profile.width, rep.theta};
      if (offroad(ego, polys) ||
          collide(ego, boxes[static_cast<size_t>(s.t)], profile.margin, profile.circles)) {
        return true;
      }
    }
    return false;
  };
  auto is_goal = [&](const AbstractState& s) {
    for (const EgoState& rep : cell_representatives(g, s, mode)) {
      if (goal(rep, pp.goal)) return true;
    }
    return false;
  };

  const EgoState initial = EgoState::from_record(pp.initial_state);
  const AbstractState s0 = abstract_of(g, initial);
  const int id0 = gg.add_state(s0, is_bad(s0), is_goal(s0));
  gg.initial_state = id0;

  std::deque<int> queue{id0};
  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    const AbstractState st = gg.states[static_cast<size_t>(id)];
    if (gg.bad[static_cast<size_t>(id)] || st.t >= g.horizon) continue;

    for (int a = 0; a < gg.n_actions; ++a) {
      std::map<uint64_t, AbstractState> targets;
      if (mode == AbstractionMode::center) {
        const EgoState next =
            step(cell_center_state(g, st), actions[static_cast<size_t>(a)], p);
        const AbstractState ns = abstract_of(g, next);
        targets.emplace(state_key(g, ns), ns);
      } else {
        // Step the closed-hull corners: the dynamics are monotone per
        // coordinate within a cell (theta bins never straddle a sin/cos
        // extremum on power-of-two binnings), so the per-axis image interval
        // of every in-cell state is bounded by the corner images. The upper
        // corner belongs to the next cell, so an image that sits bit-exactly
        // on a boundary is an unattained supremum and stays exclusive.
        ImageInterval img;
        for (int cx = 0; cx < 2; ++cx) {
          for (int cy = 0; cy < 2; ++cy) {
            for (int ct = 0; ct < 2; ++ct) {
              for (int cv = 0; cv < 2; ++cv) {
                EgoState e;
                e.x = axis_boundary(g.x, st.ix + cx);
                e.y = axis_boundary(g.y, st.iy + cy);
                e.theta = axis_boundary(g.theta, st.itheta + ct);
                e.v = axis_boundary(g.v, st.iv + cv);
                e.t = st.t;
                img.absorb(step(e, actions[static_cast<size_t>(a)], p));
              }
            }
          }
        }
        img.absorb(step(cell_center_state(g, st), actions[static_cast<size_t>(a)], p));
        const int x_lo = axis_index_checked(g.x, img.lo_x, st, "x");
        const int x_hi = sup_index(g.x, img.hi_x, x_lo, st);
        const int y_lo = axis_index_checked(g.y, img.lo_y, st, "y");
        const int y_hi = sup_index(g.y, img.hi_y, y_lo, st);
        const int t_lo = axis_index_checked(g.theta, img.lo_theta, st, "theta");
        const int t_hi = sup_index(g.theta, img.hi_theta, t_lo, st);
        const int v_lo = axis_index_checked(g.v, img.lo_v, st, "v");
        const int v_hi = sup_index(g.v, img.hi_v, v_lo, st);
        for (int ix = x_lo; ix <= x_hi; ++ix) {
          for (int iy = y_lo; iy <= y_hi; ++iy) {
            for (int it = t_lo; it <= t_hi; ++it) {
              for (int iv = v_lo; iv <= v_hi; ++iv) {
                const AbstractState ns{ix, iy, it, iv, st.t + 1};
                targets.emplace(state_key(g, ns), ns);
              }
            }
          }
        }
      }
      for (const auto& [key, ns] : targets) {
        auto it = gg.index.find(key);
        int nid;
        if (it == gg.index.end()) {
          nid = gg.add_state(ns, is_bad(ns), is_goal(ns));
          queue.push_back(nid);
        } else {
          nid = it->second;
        }
        gg.add_edge(id, a, nid);
      }
    }
  }
  return gg;
}

SolveResult solve_safety(const GameGraph& gg) {
  const size_t n = gg.states.size();
  std::vector<uint8_t> winning(n);
  for (size_t i = 0; i < n; ++i) winning[i] = gg.bad[i] ? 0 : 1;

  std::vector<uint8_t> next = winning;
  int sweeps = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    ++sweeps;
    for (size_t s = 0; s < n; ++s) {
      if (!winning[s]) {
        next[s] = 0;
        continue;
      }
      if (gg.terminal(static_cast<int>(s))) {
        next[s] = 1;
        continue;
      }
      bool keeps = false;
      for (const auto& succ : gg.successors[s]) {
        if (succ.empty()) continue;  // unavailable action
        bool all_winning = true;
        for (int q : succ) {
          if (!winning[static_cast<size_t>(q)]) {
            all_winning = false;
            break;
          }
        }
        if (all_winning) {
          keeps = true;
          break;
        }
      }
      if (!keeps) {
        next[s] = 0;
        changed = true;
      }
    }
    winning.swap(next);
  }

  SolveResult result;
  result.sweeps = sweeps;
  result.winning = winning;
  result.allowed.assign(n, 0);
  const uint16_t full_mask = static_cast<uint16_t>((1u << gg.n_actions) - 1u);
  for (size_t s = 0; s < n; ++s) {
    if (!winning[s]) continue;
    if (gg.terminal(static_cast<int>(s))) {
      result.allowed[s] = full_mask;
    } else {
      uint16_t mask = 0;
      for (int a = 0; a < gg.n_actions; ++a) {
        const auto& succ = gg.successors[s][static_cast<size_t>(a)];
        if (succ.empty()) continue;
        bool all_winning = true;
        for (int q : succ) {
          if (!winning[static_cast<size_t>(q)]) {
            all_winning = false;
            break;
          }
        }
        if (all_winning) mask |= static_cast<uint16_t>(1u << a);
      }
      result.allowed[s] = mask;
    }
  }

  result.strategy.grid = gg.grid;
  result.strategy.n_actions = gg.n_actions;
  for (size_t s = 0; s < n; ++s) {
    if (winning[s]) {
      result.strategy.allowed[state_key(gg.grid, gg.states[s])] = result.allowed[s];
    }
  }

  if (gg.initial_state >= 0 && !winning[static_cast<size_t>(gg.initial_state)]) {
    fail(ErrorCode::unrealizable, "no safe path: the initial state is not in the winning region");
  }
  return result;
}

bool PermissiveStrategy::winning(const AbstractState& s) const {
  return allowed.count(state_key(grid, s)) > 0;
}

uint16_t PermissiveStrategy::allowed_mask(const AbstractState& s) const {
  auto it = allowed.find(state_key(grid, s));
  return it == allowed.end() ? 0 : it->second;
}

std::vector<int> shield(const PermissiveStrategy& ps, const EgoState& s) {
  if (s.t > ps.grid.horizon) {
    fail(ErrorCode::outside_winning_region,
         "step " + std::to_string(s.t) + " is beyond the strategy horizon");
  }
  const AbstractState a = abstract_of(ps.grid, s);
  auto it = ps.allowed.find(state_key(ps.grid, a));
  if (it == ps.allowed.end()) {
    fail(ErrorCode::outside_winning_region,
         "cell (" + std::to_string(a.ix) + ", " + std::to_string(a.iy) + ", " +
             std::to_string(a.itheta) + ", " + std::to_string(a.iv) + ") at step " +
             std::to_string(a.t) + " is not winning");
  }
  std::vector<int> actions;
  for (int i = 0; i < ps.n_actions; ++i) {
    if (it->second & (1u << i)) actions.push_back(i);
  }
  return actions;
}

std::string save_permissive(const PermissiveStrategy& ps) {
  json j;
  j["format"] = "permissive-strategy";
  j["version"] = 1;
  j["actions"] = ps.n_actions;
  auto axis = [](const GridAxis& a) {
    return json{{"lo", a.lo}, {"hi", a.hi}, {"cells", a.cells}};
  };
  j["grid"] = {{"x", axis(ps.grid.x)},
               {"y", axis(ps.grid.y)},
               {"theta", axis(ps.grid.theta)},
               {"v", axis(ps.grid.v)},
               {"horizon", ps.grid.horizon}};
  json cells = json::array();
  for (const auto& [key, mask] : ps.allowed) {
    uint64_t k = key;
    const int t = static_cast<int>(k % static_cast<uint64_t>(ps.grid.horizon + 1));
    k /= static_cast<uint64_t>(ps.grid.horizon + 1);
    const int iv = static_cast<int>(k % static_cast<uint64_t>(ps.grid.v.cells));
    k /= static_cast<uint64_t>(ps.grid.v.cells);
    const int itheta = static_cast<int>(k % static_cast<uint64_t>(ps.grid.theta.cells));
    k /= static_cast<uint64_t>(ps.grid.theta.cells);
    const int iy = static_cast<int>(k % static_cast<uint64_t>(ps.grid.y.cells));
    k /= static_cast<uint64_t>(ps.grid.y.cells);
    const int ix = static_cast<int>(k);
    cells.push_back(json::array({ix, iy, itheta, iv, t, mask}));
  }
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

PermissiveStrategy load_permissive(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::schema_error, std::string("invalid JSON: ") + e.what());
  }
  auto need = [](const json& obj, const char* field, const std::string& path) -> const json& {
    if (!obj.is_object() || !obj.contains(field)) {
      fail(ErrorCode::schema_error, "missing field at " + path + "/" + field);
    }
    return obj.at(field);
  };
  if (need(j, "format", "") != "permissive-strategy") {
    fail(ErrorCode::schema_error, "unexpected format at /format");
  }
  PermissiveStrategy ps;
  ps.n_actions = need(j, "actions", "").get<int>();
  const json& grid = need(j, "grid", "");
  auto axis = [&](const char* name) {
    const json& a = need(grid, name, "/grid");
    GridAxis out;
    out.lo = need(a, "lo", std::string("/grid/") + name).get<double>();
    out.hi = need(a, "hi", std::string("/grid/") + name).get<double>();
    out.cells = need(a, "cells", std::string("/grid/") + name).get<int>();
    if (out.cells < 1 || !(out.lo < out.hi)) {
      fail(ErrorCode::schema_error, std::string("bad axis at /grid/") + name);
    }
    return out;
  };
  ps.grid.x = axis("x");
  ps.grid.y = axis("y");
  ps.grid.theta = axis("theta");
  ps.grid.v = axis("v");
  ps.grid.horizon = need(grid, "horizon", "/grid").get<int>();
  if (ps.grid.horizon < 1) fail(ErrorCode::schema_error, "bad horizon at /grid/horizon");

  const json& cells = need(j, "cells", "");
  if (!cells.is_array()) fail(ErrorCode::schema_error, "expected array at /cells");
  size_t i = 0;
  for (const auto& entry : cells) {
    const std::string path = "/cells/" + std::to_string(i++);
    if (!entry.is_array() || entry.size() != 6) {
      fail(ErrorCode::schema_error, "expected [ix,iy,itheta,iv,t,mask] at " + path);
    }
    AbstractState s{entry[0].get<int>(), entry[1].get<int>(), entry[2].get<int>(),
                    entry[3].get<int>(), entry[4].get<int>()};
    if (s.ix < 0 || s.ix >= ps.grid.x.cells || s.iy < 0 || s.iy >= ps.grid.y.cells ||
        s.itheta < 0 || s.itheta >= ps.grid.theta.cells || s.iv < 0 || s.iv >= ps.grid.v.cells ||
        s.t < 0 || s.t > ps.grid.horizon) {
      fail(ErrorCode::schema_error, "cell indices out of range at " + path);
    }
    ps.allowed[state_key(ps.grid, s)] = entry[5].get<uint16_t>();
  }
  return ps;
}

}  // namespace roadgame
