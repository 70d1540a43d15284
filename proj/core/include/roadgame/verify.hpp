#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "roadgame/safety_game.hpp"
#include "roadgame/strategy.hpp"

namespace roadgame {

/// Ego trajectory: one record per consecutive time step starting at 0.
using Trajectory = std::vector<StateRecord>;

/// Deterministic ego policy over concrete states.
class Controller {
public:
  virtual ~Controller() = default;
  virtual int action(const EgoState& s) const = 0;
  virtual const char* kind() const = 0;
};

/// Lowest allowed action of the permissive strategy's cell.
class PermissiveController : public Controller {
public:
  explicit PermissiveController(const PermissiveStrategy& ps) : ps_(&ps) {}
  int action(const EgoState& s) const override;
  const char* kind() const override { return "permissive"; }

private:
  const PermissiveStrategy* ps_;
};

/// Argmax over the per-action Q-trees.
class GreedyController : public Controller {
public:
  explicit GreedyController(const QTreeStrategy& qs) : qs_(&qs) {}
  int action(const EgoState& s) const override;
  const char* kind() const override { return "greedy"; }

private:
  const QTreeStrategy* qs_;
};

class TreeController : public Controller {
public:
  explicit TreeController(const DecisionTree& dt) : dt_(&dt) {}
  int action(const EgoState& s) const override;
  const char* kind() const override { return "tree"; }

private:
  const DecisionTree* dt_;
};

struct TraceStep {
  EgoState state;
  int action = -1;                    // -1 on the final record
  std::vector<int> obstacle_choices;  // one entry per reactive obstacle
};

struct Verdict {
  bool holds = false;
  std::optional<std::vector<TraceStep>> counterexample;
  long states_explored = 0;
};

/// Explicit-state exploration of the closed loop; the ego move is fixed by
/// the controller and only reactive obstacle choices branch. Holds iff no
/// state reachable within `horizon` steps collides or leaves the road.
/// States are deduplicated on a 1e-6 quantization of the continuous
/// components.
Verdict check_safety_under(const Scenario& sc, const Controller& c, const DynamicsParams& p,
                           const VehicleProfile& profile, int horizon);

/// Holds iff every maximal closed-loop path reaches a goal state within
/// `horizon` steps, whatever the reactive obstacles choose.
Verdict check_goal_under(const Scenario& sc, const Controller& c, const DynamicsParams& p,
                         const VehicleProfile& profile, int horizon);

/// Holds iff some ego action sequence stays safe for the full horizon under
/// cooperative obstacle choices (existential on both sides).
Verdict check_exists_safe(const Scenario& sc, const DynamicsParams& p,
                          const VehicleProfile& profile, const GridSpec& g);

/// One seeded rollout; obstacle choices are sampled uniformly. Returns
/// horizon + 1 records.
Trajectory simulate(const Scenario& sc, const Controller& c, const DynamicsParams& p,
                    uint64_t seed, int horizon);

/// Copy of the scenario with one added dynamic obstacle (fresh id) whose
/// behaviour is the trajectory.
Scenario inject_trajectory(const Scenario& sc, const Trajectory& tr, const Shape& shape);

std::string trace_to_json_lines(const std::vector<TraceStep>& trace);

}  // namespace roadgame
