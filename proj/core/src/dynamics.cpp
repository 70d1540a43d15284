#include "roadgame/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace roadgame {

namespace {

struct Pose {
  double x, y, theta, v;
};

Pose integrate(Pose s, double accel, double yaw, const DynamicsParams& p) {
  const double dt = p.period / p.substeps;
  for (int i = 0; i < p.substeps; ++i) {
    const double nx = s.x + dt * s.v * std::cos(s.theta);
    const double ny = s.y + dt * s.v * std::sin(s.theta);
    const double ntheta = s.theta + dt * yaw;
    const double nv = std::clamp(s.v + dt * accel, 0.0, p.v_max);
    s = {nx, ny, ntheta, nv};
  }
  s.theta = normalize_angle(s.theta);
  return s;
}

}  // namespace

std::array<EgoAction, 9> ego_actions(const DynamicsParams& p) {
  std::array<EgoAction, 9> out{};
  const double accel_levels[3] = {-p.accel, 0.0, p.accel};
  const double yaw_levels[3] = {-p.yaw_rate, 0.0, p.yaw_rate};
  for (int ai = 0; ai < 3; ++ai) {
    for (int yi = 0; yi < 3; ++yi) {
      const int idx = 3 * ai + yi;
      out[idx] = {accel_levels[ai], yaw_levels[yi], idx};
    }
  }
  return out;
}

EgoAction ego_action(int index, const DynamicsParams& p) { return ego_actions(p)[index]; }

const char* ego_action_name(int index) {
  static const char* names[9] = {
      "brake_right",  "brake_straight",  "brake_left",
      "coast_right",  "coast_straight",  "coast_left",
      "accel_right",  "accel_straight",  "accel_left",
  };
  return names[index];
}

EgoState EgoState::from_record(const StateRecord& s) {
  return {s.position.x, s.position.y, normalize_angle(s.orientation), s.velocity, s.acceleration,
          s.time_step};
}

StateRecord EgoState::to_record() const {
  return {t, {x, y}, theta, v, a};
}

EgoState step(const EgoState& s, const EgoAction& act, const DynamicsParams& p) {
  const Pose out = integrate({s.x, s.y, s.theta, s.v}, act.accel_cmd, act.yaw_cmd, p);
  return {out.x, out.y, out.theta, out.v, act.accel_cmd, s.t + 1};
}

StateRecord obstacle_state_at(const Obstacle& o, int t) {
  if (const auto* sp = std::get_if<StaticPose>(&o.behaviour)) {
    return sp->state;
  }
  if (const auto* tb = std::get_if<TrajectoryBehaviour>(&o.behaviour)) {
    // last record with time_step <= t; hold-last beyond the end
    const StateRecord* best = &tb->states.front();
    for (const auto& st : tb->states) {
      if (st.time_step <= t) best = &st;
    }
    return *best;
  }
  fail(ErrorCode::no_behaviour,
       "obstacle " + std::to_string(o.id) + " is reactive; use obstacle_moves");
}

std::vector<StateRecord> obstacle_moves(const Obstacle& o, const StateRecord& s,
                                        const DynamicsParams& p) {
  if (!std::holds_alternative<ReactiveBehaviour>(o.behaviour)) {
    fail(ErrorCode::no_behaviour,
         "obstacle " + std::to_string(o.id) + " is not reactive");
  }
  const double accels[kReactiveChoices] = {0.0, -p.accel, p.accel};
  std::vector<StateRecord> out;
  out.reserve(kReactiveChoices);
  for (double a : accels) {
    const Pose next =
        integrate({s.position.x, s.position.y, s.orientation, s.velocity}, a, 0.0, p);
    out.push_back({s.time_step + 1, {next.x, next.y}, next.theta, next.v, a});
  }
  return out;
}

}  // namespace roadgame
