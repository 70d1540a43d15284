#pragma once

#include <array>
#include <vector>

#include "roadgame/scenario.hpp"

namespace roadgame {

/// Kinematic unicycle parameters shared by ego and reactive obstacles.
struct DynamicsParams {
  double accel = 2.0;      // A, m/s^2
  double yaw_rate = 0.4;   // Omega, rad/s
  double v_max = 15.0;     // m/s
  double period = 1.0;     // time units per decision
  int substeps = 10;       // forward-Euler sub-steps per period
};

/// One of the 9 atomic ego actions: accel in {-A, 0, +A} x yaw in
/// {-Omega, 0, +Omega}. index = 3 * accel_level + yaw_level, both levels
/// 0..2 in increasing command order (row-major over accel x yaw).
struct EgoAction {
  double accel_cmd = 0.0;
  double yaw_cmd = 0.0;
  int index = 0;
};

std::array<EgoAction, 9> ego_actions(const DynamicsParams& p);
EgoAction ego_action(int index, const DynamicsParams& p);
const char* ego_action_name(int index);

struct EgoState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // normalized to (-pi, pi]
  double v = 0.0;      // clamped to [0, v_max]
  double a = 0.0;      // last applied accel command
  int t = 0;

  static EgoState from_record(const StateRecord& s);
  StateRecord to_record() const;
};

/// Integrates x' = v cos theta, y' = v sin theta, theta' = yaw, v' = accel
/// over one period in p.substeps equal Euler sub-steps. v is clamped to
/// [0, v_max] after each sub-step and theta renormalized at the end.
EgoState step(const EgoState& s, const EgoAction& act, const DynamicsParams& p);

/// Obstacle state at time step t. Static obstacles return their single pose;
/// trajectories hold the last known record for t beyond the end. Reactive
/// obstacles throw Error(no_behaviour); use obstacle_moves for those.
StateRecord obstacle_state_at(const Obstacle& o, int t);

/// Reactive action set, in output order: maintain speed, brake at -A,
/// accelerate at +A, all with straight heading.
constexpr int kReactiveChoices = 3;

/// Successor states reachable by a reactive obstacle in one period.
std::vector<StateRecord> obstacle_moves(const Obstacle& o, const StateRecord& s,
                                        const DynamicsParams& p);

}  // namespace roadgame
