#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they check.

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "roadgame/dynamics.hpp"
#include "roadgame/geometry.hpp"
#include "roadgame/learning.hpp"
#include "roadgame/safety_game.hpp"
#include "roadgame/scenario.hpp"
#include "roadgame/strategy.hpp"
#include "roadgame/verify.hpp"

namespace oracles {

/// Exact distance between two convex polygons: minimum over all vertex-edge
/// pairs in both directions, 0 when the polygons overlap (separating axes).
double convex_polygon_distance(const std::vector<roadgame::Point2>& a,
                               const std::vector<roadgame::Point2>& b);

std::vector<roadgame::Point2> box_polygon(const roadgame::OrientedBox& b);

/// Forward-Euler reference rollout at a chosen sub-step count.
struct SimplePose {
  double x, y, theta, v;
};
SimplePose integrate_reference(SimplePose s, double accel, double yaw, double period,
                               int substeps, double v_max);

/// Set-based greatest fixpoint over an explicit game: states 0..n-1, per
/// state/action successor lists, bad set. Returns the winning set and the
/// allowed actions per winning state.
struct FixpointResult {
  std::set<int> winning;
  std::map<int, std::set<int>> allowed;
};
FixpointResult brute_force_fixpoint(int n_states, int n_actions,
                                    const std::vector<std::vector<std::vector<int>>>& succ,
                                    const std::set<int>& bad);

/// Value iteration on an explicit finite-horizon MDP with deterministic
/// transitions; returns optimal Q for (state, action) pairs at step indices.
struct ChainMdp {
  int n_states = 0;
  int n_actions = 0;
  int horizon = 0;
  int goal_state = -1;
  double step_reward = -1.0;
  double goal_reward = 100.0;
  // next[s][a]
  std::vector<std::vector<int>> next;
};
std::vector<std::vector<double>> value_iteration(const ChainMdp& mdp);

/// Independent recursive tree evaluation (the library walks iteratively).
double evaluate_tree_recursive(const roadgame::StrategyTree& tree, int node,
                               const std::vector<double>& s);

/// Linear-scan cell index: walks boundaries with < comparisons.
int axis_index_scan(const roadgame::GridAxis& axis, double value);

/// Forward layered enumeration of the closed loop for the three checkers;
/// independent of the library's memoized search.
struct LayeredWorld {
  roadgame::EgoState ego;
  std::vector<roadgame::StateRecord> reactive;
};

bool enum_safety_under(const roadgame::Scenario& sc, const roadgame::Controller& c,
                       const roadgame::DynamicsParams& p, const roadgame::VehicleProfile& profile,
                       int horizon);
bool enum_goal_under(const roadgame::Scenario& sc, const roadgame::Controller& c,
                     const roadgame::DynamicsParams& p, const roadgame::VehicleProfile& profile,
                     int horizon);
bool enum_exists_safe(const roadgame::Scenario& sc, const roadgame::DynamicsParams& p,
                      const roadgame::VehicleProfile& profile, int horizon);

/// Drivability of a concrete world state, written directly against the
/// geometry predicates.
bool world_bad(const roadgame::Scenario& sc, const roadgame::EgoState& ego,
               const std::vector<roadgame::StateRecord>& reactive,
               const roadgame::DynamicsParams& p, const roadgame::VehicleProfile& profile);

}  // namespace oracles
