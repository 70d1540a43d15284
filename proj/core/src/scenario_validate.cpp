#include <cmath>
#include <set>
#include <string>

#include "roadgame/scenario.hpp"

namespace roadgame {

namespace {

bool finite_point(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

bool normalized(double angle) { return angle > -M_PI && angle <= M_PI; }

void check_state(const StateRecord& s, int owner, const char* what,
                 std::vector<Diagnostic>& out) {
  if (!finite_point(s.position) || !std::isfinite(s.orientation) || !std::isfinite(s.velocity) ||
      !std::isfinite(s.acceleration)) {
    out.push_back({owner, std::string(what) + " contains non-finite values"});
  }
  if (s.velocity < 0.0) out.push_back({owner, std::string(what) + " has negative velocity"});
  if (std::isfinite(s.orientation) && !normalized(s.orientation)) {
    out.push_back({owner, std::string(what) + " orientation not normalized to (-pi, pi]"});
  }
  if (s.time_step < 0) out.push_back({owner, std::string(what) + " has negative time step"});
}

void check_shape(const Shape& shape, int owner, std::vector<Diagnostic>& out) {
  if (const auto* r = std::get_if<RectangleShape>(&shape)) {
    if (r->length <= 0.0 || r->width <= 0.0) {
      out.push_back({owner, "rectangle dimensions must be positive"});
    }
  } else if (const auto* c = std::get_if<CircleShape>(&shape)) {
    if (c->radius <= 0.0) out.push_back({owner, "circle radius must be positive"});
  } else {
    const auto& poly = std::get<PolygonShape>(shape);
    if (poly.vertices.size() < 3) {
      out.push_back({owner, "polygon needs at least 3 vertices"});
    }
    for (const auto& v : poly.vertices) {
      if (!finite_point(v)) {
        out.push_back({owner, "polygon vertex is non-finite"});
        break;
      }
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate_scenario(const Scenario& s) {
  std::vector<Diagnostic> out;
  if (!(s.time_step_size > 0.0) || !std::isfinite(s.time_step_size)) {
    out.push_back({0, "timeStepSize must be positive and finite"});
  }

  std::set<int> lanelet_ids;
  for (const auto& l : s.lanelets) {
    if (l.id <= 0) out.push_back({l.id, "lanelet id must be positive"});
    if (!lanelet_ids.insert(l.id).second) {
      out.push_back({l.id, "duplicate lanelet id " + std::to_string(l.id)});
    }
    if (l.left_bound.size() < 2 || l.right_bound.size() < 2) {
      out.push_back({l.id, "lanelet bound needs at least 2 points"});
    }
    if (l.left_bound.size() != l.right_bound.size()) {
      out.push_back({l.id, "lanelet bounds have unequal point counts"});
    }
    for (const auto& p : l.left_bound) {
      if (!finite_point(p)) {
        out.push_back({l.id, "lanelet bound point is non-finite"});
        break;
      }
    }
  }
  for (const auto& l : s.lanelets) {
    for (int ref : l.predecessors) {
      if (!s.find_lanelet(ref)) {
        out.push_back({l.id, "predecessor id " + std::to_string(ref) + " references no lanelet"});
      }
    }
    for (int ref : l.successors) {
      if (!s.find_lanelet(ref)) {
        out.push_back({l.id, "successor id " + std::to_string(ref) + " references no lanelet"});
      }
    }
  }

  std::set<int> obstacle_ids;
  for (const auto& o : s.obstacles) {
    if (o.id <= 0) out.push_back({o.id, "obstacle id must be positive"});
    if (!obstacle_ids.insert(o.id).second) {
      out.push_back({o.id, "duplicate obstacle id " + std::to_string(o.id)});
    }
    check_shape(o.shape, o.id, out);
    if (const auto* sp = std::get_if<StaticPose>(&o.behaviour)) {
      if (o.role != ObstacleRole::static_obstacle) {
        out.push_back({o.id, "dynamic obstacle carries a static pose"});
      }
      check_state(sp->state, o.id, "static obstacle state", out);
    } else if (const auto* tb = std::get_if<TrajectoryBehaviour>(&o.behaviour)) {
      if (o.role != ObstacleRole::dynamic_obstacle) {
        out.push_back({o.id, "static obstacle carries a trajectory"});
      }
      if (tb->states.empty()) {
        out.push_back({o.id, "trajectory is empty"});
      } else {
        if (tb->states.front().time_step != 0) {
          out.push_back({o.id, "trajectory must start at time step 0"});
        }
        for (size_t i = 1; i < tb->states.size(); ++i) {
          if (tb->states[i].time_step <= tb->states[i - 1].time_step) {
            out.push_back({o.id, "trajectory time step " +
                                     std::to_string(tb->states[i].time_step) +
                                     " does not strictly increase"});
            break;
          }
        }
        for (const auto& st : tb->states) check_state(st, o.id, "trajectory state", out);
      }
    } else {
      const auto& rb = std::get<ReactiveBehaviour>(o.behaviour);
      if (o.role != ObstacleRole::dynamic_obstacle) {
        out.push_back({o.id, "static obstacle carries reactive behaviour"});
      }
      check_state(rb.initial_state, o.id, "reactive initial state", out);
    }
  }

  std::set<int> pp_ids;
  for (const auto& pp : s.planning_problems) {
    if (pp.id <= 0) out.push_back({pp.id, "planning problem id must be positive"});
    if (!pp_ids.insert(pp.id).second) {
      out.push_back({pp.id, "duplicate planning problem id " + std::to_string(pp.id)});
    }
    check_state(pp.initial_state, pp.id, "initial state", out);
    if (pp.initial_state.time_step != 0) {
      out.push_back({pp.id, "initial state must be at time step 0"});
    }
    check_shape(pp.goal.position_shape, pp.id, out);
    if (pp.goal.time.lo > pp.goal.time.hi || pp.goal.time.lo < 0) {
      out.push_back({pp.id, "goal time interval is malformed"});
    }
    if (pp.goal.orientation_interval &&
        pp.goal.orientation_interval->lo > pp.goal.orientation_interval->hi) {
      out.push_back({pp.id, "goal orientation interval is malformed"});
    }
    if (pp.goal.velocity_interval &&
        pp.goal.velocity_interval->lo > pp.goal.velocity_interval->hi) {
      out.push_back({pp.id, "goal velocity interval is malformed"});
    }
  }
  return out;
}

}  // namespace roadgame
