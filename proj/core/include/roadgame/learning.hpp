#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <utility>

#include "roadgame/safety_game.hpp"
#include "roadgame/strategy.hpp"

namespace roadgame {

struct RewardWeights {
  double goal = 100.0;
  double violation = -100.0;
  double step = -1.0;
  double accel_cost = -0.1;  // per m/s^2 of commanded |accel|
};

struct LearnConfig {
  int episodes = 5000;
  double alpha = 0.1;
  double gamma = 0.95;
  double epsilon_start = 1.0;  // linear schedule over episodes
  double epsilon_end = 0.05;
  int max_steps = 10;  // defaults to the grid horizon
  uint64_t seed = 1;
  RewardWeights rewards;
};

/// Tabular Q-function over abstract states; entries exist only for visited
/// state-action pairs and read as 0 while learning.
struct QTable {
  struct Entry {
    double q = 0.0;
    long visits = 0;
  };
  std::map<std::pair<uint64_t, int>, Entry> entries;

  double value(uint64_t state, int action) const;
  bool empty() const { return entries.empty(); }
};

/// True iff the position lies in the goal shape and every specified interval
/// (time, orientation, velocity) contains the matching state component.
bool goal(const EgoState& s, const GoalRegion& g);

/// Closed-form reward: goal weight on goal entry, violation weight on a
/// collide/offroad entry, otherwise step cost plus comfort cost.
double reward_value(const RewardWeights& w, const EgoAction& act, bool is_goal,
                    bool is_violation);

/// Reward for a transition in a scenario whose obstacles are time-determined
/// (static or trajectory). learn() evaluates reactive obstacles from its own
/// rollout state instead of this entry point.
double reward(const EgoState& s, const EgoAction& act, const EgoState& s_next,
              const Scenario& sc, const VehicleProfile& profile, const RewardWeights& w);

struct LearnResult {
  QTable table;
  long transitions = 0;
  long violations = 0;      // transitions whose target state collides or leaves the road
  long goal_episodes = 0;
};

/// Epsilon-greedy Q-learning with concrete-dynamics rollouts and center-mode
/// cell mapping. With a shield, action choice is restricted to shield(s) at
/// every step. Deterministic given the seed. Optional sink receives one JSON
/// line per transition.
LearnResult learn(const Scenario& sc, const LearnConfig& cfg, const GridSpec& grid,
                  const DynamicsParams& p, const VehicleProfile& profile,
                  const PermissiveStrategy* shield_strategy = nullptr,
                  std::ostream* log = nullptr);

/// One axis-aligned tree per action whose leaves are the grid cells carrying
/// that action's Q-value; unvisited pairs get a -infinity sentinel and
/// equal-valued sibling leaves are merged.
QTreeStrategy qtable_to_qtrees(const QTable& qt, const GridSpec& g);

}  // namespace roadgame
