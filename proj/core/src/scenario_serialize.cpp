#include <charconv>
#include <string>

#include "roadgame/scenario.hpp"
#include "xml_doc.hpp"

namespace roadgame {

namespace {

using xml::Node;

Node elem(std::string name) {
  Node n;
  n.name = std::move(name);
  return n;
}

Node text_elem(std::string name, std::string text) {
  Node n;
  n.name = std::move(name);
  n.text = std::move(text);
  return n;
}

Node double_elem(const std::string& name, double v) { return text_elem(name, format_double(v)); }

Node int_elem(const std::string& name, int v) { return text_elem(name, std::to_string(v)); }

Node point_node(const Point2& p) {
  Node n = elem("point");
  n.children.push_back(double_elem("x", p.x));
  n.children.push_back(double_elem("y", p.y));
  return n;
}

Node exact_node(const std::string& name, const std::string& value) {
  Node n = elem(name);
  n.children.push_back(text_elem("exact", value));
  return n;
}

Node state_node(const std::string& name, const StateRecord& s) {
  Node n = elem(name);
  Node pos = elem("position");
  pos.children.push_back(point_node(s.position));
  n.children.push_back(std::move(pos));
  n.children.push_back(exact_node("orientation", format_double(s.orientation)));
  n.children.push_back(exact_node("velocity", format_double(s.velocity)));
  n.children.push_back(exact_node("acceleration", format_double(s.acceleration)));
  n.children.push_back(exact_node("time", std::to_string(s.time_step)));
  return n;
}

Node shape_body(const Shape& shape, const Point2* center, const double* orientation) {
  if (const auto* r = std::get_if<RectangleShape>(&shape)) {
    Node n = elem("rectangle");
    n.children.push_back(double_elem("length", r->length));
    n.children.push_back(double_elem("width", r->width));
    if (center) {
      n.children.push_back(double_elem("orientation", *orientation));
      Node c = elem("center");
      c.children.push_back(double_elem("x", center->x));
      c.children.push_back(double_elem("y", center->y));
      n.children.push_back(std::move(c));
    }
    return n;
  }
  if (const auto* c = std::get_if<CircleShape>(&shape)) {
    Node n = elem("circle");
    n.children.push_back(double_elem("radius", c->radius));
    if (center) {
      Node cc = elem("center");
      cc.children.push_back(double_elem("x", center->x));
      cc.children.push_back(double_elem("y", center->y));
      n.children.push_back(std::move(cc));
    }
    return n;
  }
  const auto& poly = std::get<PolygonShape>(shape);
  Node n = elem("polygon");
  for (const Point2& p : poly.vertices) n.children.push_back(point_node(p));
  return n;
}

Node interval_node(const std::string& name, double lo, double hi) {
  Node n = elem(name);
  n.children.push_back(double_elem("intervalStart", lo));
  n.children.push_back(double_elem("intervalEnd", hi));
  return n;
}

void append_extras(Node& parent, const std::vector<std::string>& extras) {
  for (const auto& fragment : extras) {
    parent.children.push_back(xml::parse(fragment));
  }
}

Node lanelet_node(const Lanelet& l) {
  Node n = elem("lanelet");
  n.attributes.emplace_back("id", std::to_string(l.id));
  Node lb = elem("leftBound");
  for (const Point2& p : l.left_bound) lb.children.push_back(point_node(p));
  Node rb = elem("rightBound");
  for (const Point2& p : l.right_bound) rb.children.push_back(point_node(p));
  n.children.push_back(std::move(lb));
  n.children.push_back(std::move(rb));
  for (int ref : l.predecessors) {
    Node p = elem("predecessor");
    p.attributes.emplace_back("ref", std::to_string(ref));
    n.children.push_back(std::move(p));
  }
  for (int ref : l.successors) {
    Node s = elem("successor");
    s.attributes.emplace_back("ref", std::to_string(ref));
    n.children.push_back(std::move(s));
  }
  append_extras(n, l.extras);
  return n;
}

Node obstacle_node(const Obstacle& o) {
  const bool dynamic = o.role == ObstacleRole::dynamic_obstacle;
  Node n = elem(dynamic ? "dynamicObstacle" : "staticObstacle");
  n.attributes.emplace_back("id", std::to_string(o.id));
  n.children.push_back(text_elem("type", to_string(o.type)));
  Node shape = elem("shape");
  shape.children.push_back(shape_body(o.shape, nullptr, nullptr));
  n.children.push_back(std::move(shape));

  if (const auto* sp = std::get_if<StaticPose>(&o.behaviour)) {
    n.children.push_back(state_node("initialState", sp->state));
  } else if (const auto* tb = std::get_if<TrajectoryBehaviour>(&o.behaviour)) {
    n.children.push_back(state_node("initialState", tb->states.front()));
    Node traj = elem("trajectory");
    for (size_t i = 1; i < tb->states.size(); ++i) {
      traj.children.push_back(state_node("state", tb->states[i]));
    }
    n.children.push_back(std::move(traj));
  } else {
    const auto& rb = std::get<ReactiveBehaviour>(o.behaviour);
    n.children.push_back(state_node("initialState", rb.initial_state));
    Node r = elem("reactiveBehaviour");
    r.attributes.emplace_back("actionSet", rb.action_set);
    n.children.push_back(std::move(r));
  }
  append_extras(n, o.extras);
  return n;
}

Node planning_problem_node(const PlanningProblem& pp) {
  Node n = elem("planningProblem");
  n.attributes.emplace_back("id", std::to_string(pp.id));
  n.children.push_back(state_node("initialState", pp.initial_state));

  Node goal = elem("goalState");
  Node pos = elem("position");
  pos.children.push_back(shape_body(pp.goal.position_shape, &pp.goal.center, &pp.goal.orientation));
  goal.children.push_back(std::move(pos));
  Node time = elem("time");
  time.children.push_back(int_elem("intervalStart", pp.goal.time.lo));
  time.children.push_back(int_elem("intervalEnd", pp.goal.time.hi));
  goal.children.push_back(std::move(time));
  if (pp.goal.orientation_interval) {
    goal.children.push_back(interval_node("orientation", pp.goal.orientation_interval->lo,
                                          pp.goal.orientation_interval->hi));
  }
  if (pp.goal.velocity_interval) {
    goal.children.push_back(
        interval_node("velocity", pp.goal.velocity_interval->lo, pp.goal.velocity_interval->hi));
  }
  append_extras(goal, pp.goal.extras);
  n.children.push_back(std::move(goal));
  append_extras(n, pp.extras);
  return n;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string serialize_scenario(const Scenario& s) {
  Node root = elem("commonRoad");
  root.attributes.emplace_back("commonRoadVersion", "2020a");
  root.attributes.emplace_back("benchmarkID", s.benchmark_id);
  root.attributes.emplace_back("timeStepSize", format_double(s.time_step_size));
  for (const auto& [k, v] : s.extra_attributes) root.attributes.emplace_back(k, v);

  for (const auto& l : s.lanelets) root.children.push_back(lanelet_node(l));
  for (const auto& o : s.obstacles) root.children.push_back(obstacle_node(o));
  for (const auto& pp : s.planning_problems) root.children.push_back(planning_problem_node(pp));
  append_extras(root, s.extras);
  return xml::write_document(root);
}

}  // namespace roadgame
