#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <string>

#include "roadgame/scenario.hpp"
#include "xml_doc.hpp"

namespace roadgame {

namespace {

using xml::Node;

[[noreturn]] void missing(const std::string& path, const std::string& name) {
  fail(ErrorCode::schema_violation, "missing mandatory element " + path + "/" + name);
}

const Node& need_child(const Node& n, const std::string& name, const std::string& path) {
  const Node* c = n.child(name);
  if (!c) missing(path, name);
  return *c;
}

double parse_double(const std::string& raw, const std::string& path) {
  const char* begin = raw.data();
  const char* end = begin + raw.size();
  if (begin != end && *begin == '+') ++begin;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    fail(ErrorCode::schema_violation, "invalid number '" + raw + "' at " + path);
  }
  if (!std::isfinite(value)) {
    fail(ErrorCode::invariant_violation, "non-finite number at " + path);
  }
  return value;
}

int parse_int(const std::string& raw, const std::string& path) {
  const char* begin = raw.data();
  const char* end = begin + raw.size();
  if (begin != end && *begin == '+') ++begin;
  int value = 0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    fail(ErrorCode::schema_violation, "invalid integer '" + raw + "' at " + path);
  }
  return value;
}

double child_double(const Node& n, const std::string& name, const std::string& path) {
  return parse_double(need_child(n, name, path).text, path + "/" + name);
}

Point2 parse_point(const Node& n, const std::string& path) {
  return {child_double(n, "x", path), child_double(n, "y", path)};
}

/// <exact>v</exact> wrapper used by state scalars.
double exact_value(const Node& n, const std::string& path) {
  return child_double(n, "exact", path);
}

void check_convex(const std::vector<Point2>& v, const std::string& where) {
  if (v.size() < 3) {
    fail(ErrorCode::invariant_violation, "polygon needs at least 3 vertices at " + where);
  }
  int sign = 0;
  bool any_nonzero = false;
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2& a = v[i];
    const Point2& b = v[(i + 1) % n];
    const Point2& c = v[(i + 2) % n];
    double cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
    if (cross != 0.0) {
      any_nonzero = true;
      int s = cross > 0.0 ? 1 : -1;
      if (sign == 0) sign = s;
      if (s != sign) {
        fail(ErrorCode::invariant_violation, "non-convex polygon at " + where);
      }
    }
  }
  if (!any_nonzero) {
    fail(ErrorCode::invariant_violation, "degenerate polygon at " + where);
  }
}

Shape parse_shape_body(const Node& n, const std::string& path, Point2* center, double* orientation) {
  if (const Node* rect = n.child("rectangle")) {
    const std::string p = path + "/rectangle";
    RectangleShape r{child_double(*rect, "length", p), child_double(*rect, "width", p)};
    if (r.length <= 0.0 || r.width <= 0.0) {
      fail(ErrorCode::invariant_violation, "rectangle dimensions must be positive at " + p);
    }
    if (center) {
      if (const Node* c = rect->child("center")) *center = parse_point(*c, p + "/center");
      if (const Node* o = rect->child("orientation")) {
        *orientation = normalize_angle(parse_double(o->text, p + "/orientation"));
      }
    }
    return r;
  }
  if (const Node* circ = n.child("circle")) {
    const std::string p = path + "/circle";
    CircleShape c{child_double(*circ, "radius", p)};
    if (c.radius <= 0.0) {
      fail(ErrorCode::invariant_violation, "circle radius must be positive at " + p);
    }
    if (center) {
      if (const Node* cc = circ->child("center")) *center = parse_point(*cc, p + "/center");
    }
    return c;
  }
  if (const Node* poly = n.child("polygon")) {
    const std::string p = path + "/polygon";
    PolygonShape ps;
    for (const Node* pn : poly->children_named("point")) {
      ps.vertices.push_back(parse_point(*pn, p + "/point"));
    }
    check_convex(ps.vertices, p);
    return ps;
  }
  missing(path, "rectangle|circle|polygon");
}

StateRecord parse_state(const Node& n, const std::string& path, int owner_id) {
  StateRecord s;
  const Node& pos = need_child(n, "position", path);
  s.position = parse_point(need_child(pos, "point", path + "/position"), path + "/position/point");
  s.orientation =
      normalize_angle(exact_value(need_child(n, "orientation", path), path + "/orientation"));
  if (const Node* v = n.child("velocity")) s.velocity = exact_value(*v, path + "/velocity");
  if (const Node* a = n.child("acceleration")) {
    s.acceleration = exact_value(*a, path + "/acceleration");
  }
  if (const Node* t = n.child("time")) {
    s.time_step = parse_int(need_child(*t, "exact", path + "/time").text, path + "/time/exact");
  }
  if (s.velocity < 0.0) {
    fail(ErrorCode::invariant_violation,
         "negative velocity at " + path + " (entity " + std::to_string(owner_id) + ")");
  }
  if (s.time_step < 0) {
    fail(ErrorCode::invariant_violation, "negative time step at " + path);
  }
  static const std::set<std::string> known = {"position", "orientation", "velocity",
                                              "acceleration", "time"};
  for (const auto& c : n.children) {
    if (!known.count(c.name)) {
      fail(ErrorCode::schema_violation, "unexpected element " + path + "/" + c.name);
    }
  }
  return s;
}

int id_attribute(const Node& n, const std::string& path) {
  const std::string* raw = n.attribute("id");
  if (!raw) fail(ErrorCode::schema_violation, "missing id attribute on " + path);
  int id = parse_int(*raw, path + "@id");
  if (id <= 0) fail(ErrorCode::invariant_violation, "non-positive id on " + path);
  return id;
}

void collect_extras(const Node& n, const std::set<std::string>& known,
                    std::vector<std::string>& extras) {
  for (const auto& c : n.children) {
    if (!known.count(c.name)) extras.push_back(xml::write_fragment(c));
  }
}

Lanelet parse_lanelet(const Node& n, const std::string& path) {
  Lanelet l;
  l.id = id_attribute(n, path);
  auto bound_points = [&](const std::string& name) {
    const Node& b = need_child(n, name, path);
    std::vector<Point2> pts;
    for (const Node* p : b.children_named("point")) {
      pts.push_back(parse_point(*p, path + "/" + name + "/point"));
    }
    return pts;
  };
  l.left_bound = bound_points("leftBound");
  l.right_bound = bound_points("rightBound");
  if (l.left_bound.size() < 2 || l.right_bound.size() < 2) {
    fail(ErrorCode::invariant_violation,
         "lanelet " + std::to_string(l.id) + " bound needs at least 2 points");
  }
  if (l.left_bound.size() != l.right_bound.size()) {
    fail(ErrorCode::invariant_violation,
         "lanelet " + std::to_string(l.id) + " bounds have unequal point counts");
  }
  for (const Node* p : n.children_named("predecessor")) {
    const std::string* r = p->attribute("ref");
    if (!r) fail(ErrorCode::schema_violation, "predecessor without ref at " + path);
    l.predecessors.push_back(parse_int(*r, path + "/predecessor@ref"));
  }
  for (const Node* p : n.children_named("successor")) {
    const std::string* r = p->attribute("ref");
    if (!r) fail(ErrorCode::schema_violation, "successor without ref at " + path);
    l.successors.push_back(parse_int(*r, path + "/successor@ref"));
  }
  collect_extras(n, {"leftBound", "rightBound", "predecessor", "successor"}, l.extras);
  return l;
}

Obstacle parse_obstacle(const Node& n, const std::string& path, bool dynamic) {
  Obstacle o;
  o.id = id_attribute(n, path);
  o.role = dynamic ? ObstacleRole::dynamic_obstacle : ObstacleRole::static_obstacle;
  o.type = obstacle_type_from_string(need_child(n, "type", path).text);
  o.shape = parse_shape_body(need_child(n, "shape", path), path + "/shape", nullptr, nullptr);
  StateRecord initial = parse_state(need_child(n, "initialState", path), path + "/initialState", o.id);

  if (!dynamic) {
    if (initial.time_step != 0) {
      fail(ErrorCode::invariant_violation,
           "static obstacle " + std::to_string(o.id) + " initial state must be at time 0");
    }
    o.behaviour = StaticPose{initial};
    collect_extras(n, {"type", "shape", "initialState"}, o.extras);
    return o;
  }

  const Node* traj = n.child("trajectory");
  const Node* reactive = n.child("reactiveBehaviour");
  if (traj && reactive) {
    fail(ErrorCode::schema_violation,
         "dynamic obstacle " + std::to_string(o.id) + " has both trajectory and reactiveBehaviour");
  }
  if (reactive) {
    ReactiveBehaviour r;
    if (const std::string* set = reactive->attribute("actionSet")) r.action_set = *set;
    r.initial_state = initial;
    o.behaviour = r;
  } else if (traj) {
    TrajectoryBehaviour t;
    t.states.push_back(initial);
    for (const Node* s : traj->children_named("state")) {
      t.states.push_back(parse_state(*s, path + "/trajectory/state", o.id));
    }
    if (t.states.front().time_step != 0) {
      fail(ErrorCode::invariant_violation,
           "obstacle " + std::to_string(o.id) + " trajectory must start at time step 0");
    }
    for (size_t i = 1; i < t.states.size(); ++i) {
      if (t.states[i].time_step <= t.states[i - 1].time_step) {
        fail(ErrorCode::invariant_violation,
             "obstacle " + std::to_string(o.id) + " trajectory time steps must strictly increase");
      }
    }
    o.behaviour = t;
  } else {
    fail(ErrorCode::schema_violation,
         "dynamic obstacle " + std::to_string(o.id) + " needs trajectory or reactiveBehaviour");
  }
  collect_extras(n, {"type", "shape", "initialState", "trajectory", "reactiveBehaviour"}, o.extras);
  return o;
}

TimeInterval parse_time_interval(const Node& n, const std::string& path) {
  TimeInterval t;
  t.lo = parse_int(need_child(n, "intervalStart", path).text, path + "/intervalStart");
  t.hi = parse_int(need_child(n, "intervalEnd", path).text, path + "/intervalEnd");
  if (t.lo > t.hi || t.lo < 0) {
    fail(ErrorCode::invariant_violation, "bad time interval at " + path);
  }
  return t;
}

Interval parse_interval(const Node& n, const std::string& path) {
  Interval iv;
  iv.lo = parse_double(need_child(n, "intervalStart", path).text, path + "/intervalStart");
  iv.hi = parse_double(need_child(n, "intervalEnd", path).text, path + "/intervalEnd");
  if (iv.lo > iv.hi) {
    fail(ErrorCode::invariant_violation, "interval start exceeds end at " + path);
  }
  return iv;
}

GoalRegion parse_goal(const Node& n, const std::string& path) {
  GoalRegion g;
  const Node& pos = need_child(n, "position", path);
  g.position_shape = parse_shape_body(pos, path + "/position", &g.center, &g.orientation);
  g.time = parse_time_interval(need_child(n, "time", path), path + "/time");
  if (const Node* o = n.child("orientation")) {
    g.orientation_interval = parse_interval(*o, path + "/orientation");
  }
  if (const Node* v = n.child("velocity")) {
    g.velocity_interval = parse_interval(*v, path + "/velocity");
  }
  collect_extras(n, {"position", "time", "orientation", "velocity"}, g.extras);
  return g;
}

PlanningProblem parse_planning_problem(const Node& n, const std::string& path) {
  PlanningProblem pp;
  pp.id = id_attribute(n, path);
  pp.initial_state = parse_state(need_child(n, "initialState", path), path + "/initialState", pp.id);
  if (pp.initial_state.time_step != 0) {
    fail(ErrorCode::invariant_violation,
         "planning problem " + std::to_string(pp.id) + " initial state must be at time 0");
  }
  pp.goal = parse_goal(need_child(n, "goalState", path), path + "/goalState");
  collect_extras(n, {"initialState", "goalState"}, pp.extras);
  return pp;
}

void check_unique(const std::vector<int>& ids, const std::string& category) {
  std::set<int> seen;
  for (int id : ids) {
    if (!seen.insert(id).second) {
      fail(ErrorCode::invariant_violation,
           "duplicate " + category + " id " + std::to_string(id));
    }
  }
}

}  // namespace

const char* to_string(ObstacleType type) {
  switch (type) {
    case ObstacleType::car: return "car";
    case ObstacleType::truck: return "truck";
    case ObstacleType::bus: return "bus";
    case ObstacleType::bicycle: return "bicycle";
    case ObstacleType::pedestrian: return "pedestrian";
    case ObstacleType::unknown: return "unknown";
  }
  return "unknown";
}

ObstacleType obstacle_type_from_string(const std::string& tag) {
  if (tag == "car") return ObstacleType::car;
  if (tag == "truck") return ObstacleType::truck;
  if (tag == "bus") return ObstacleType::bus;
  if (tag == "bicycle") return ObstacleType::bicycle;
  if (tag == "pedestrian") return ObstacleType::pedestrian;
  return ObstacleType::unknown;
}

double normalize_angle(double radians) {
  double r = std::fmod(radians, 2.0 * M_PI);
  if (r <= -M_PI) {
    r += 2.0 * M_PI;
  } else if (r > M_PI) {
    r -= 2.0 * M_PI;
  }
  return r;
}

const Lanelet* Scenario::find_lanelet(int id) const {
  for (const auto& l : lanelets) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

const Obstacle* Scenario::find_obstacle(int id) const {
  for (const auto& o : obstacles) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

Scenario parse_scenario(const std::string& xml_text) {
  Node root = xml::parse(xml_text);
  if (root.name != "commonRoad") {
    fail(ErrorCode::schema_violation, "root element must be commonRoad, got " + root.name);
  }
  const std::string path = "commonRoad";
  Scenario sc;

  const std::string* bid = root.attribute("benchmarkID");
  if (!bid) fail(ErrorCode::schema_violation, "missing benchmarkID attribute on " + path);
  sc.benchmark_id = *bid;
  const std::string* step = root.attribute("timeStepSize");
  if (!step) fail(ErrorCode::schema_violation, "missing timeStepSize attribute on " + path);
  sc.time_step_size = parse_double(*step, path + "@timeStepSize");
  if (sc.time_step_size <= 0.0) {
    fail(ErrorCode::invariant_violation, "timeStepSize must be positive");
  }
  for (const auto& [k, v] : root.attributes) {
    if (k != "benchmarkID" && k != "timeStepSize" && k != "commonRoadVersion") {
      sc.extra_attributes.emplace_back(k, v);
    }
  }

  int lanelet_no = 0, static_no = 0, dynamic_no = 0, pp_no = 0;
  for (const auto& c : root.children) {
    if (c.name == "lanelet") {
      sc.lanelets.push_back(
          parse_lanelet(c, path + "/lanelet[" + std::to_string(lanelet_no++) + "]"));
    } else if (c.name == "staticObstacle") {
      sc.obstacles.push_back(parse_obstacle(
          c, path + "/staticObstacle[" + std::to_string(static_no++) + "]", false));
    } else if (c.name == "dynamicObstacle") {
      sc.obstacles.push_back(parse_obstacle(
          c, path + "/dynamicObstacle[" + std::to_string(dynamic_no++) + "]", true));
    } else if (c.name == "planningProblem") {
      sc.planning_problems.push_back(parse_planning_problem(
          c, path + "/planningProblem[" + std::to_string(pp_no++) + "]"));
    } else {
      sc.extras.push_back(xml::write_fragment(c));
    }
  }

  if (sc.lanelets.empty()) missing(path, "lanelet");

  std::vector<int> ids;
  for (const auto& l : sc.lanelets) ids.push_back(l.id);
  check_unique(ids, "lanelet");
  ids.clear();
  for (const auto& o : sc.obstacles) ids.push_back(o.id);
  check_unique(ids, "obstacle");
  ids.clear();
  for (const auto& p : sc.planning_problems) ids.push_back(p.id);
  check_unique(ids, "planning problem");

  for (const auto& l : sc.lanelets) {
    for (int ref : l.predecessors) {
      if (!sc.find_lanelet(ref)) {
        fail(ErrorCode::invariant_violation, "lanelet " + std::to_string(l.id) +
                                                 " references unknown predecessor " +
                                                 std::to_string(ref));
      }
    }
    for (int ref : l.successors) {
      if (!sc.find_lanelet(ref)) {
        fail(ErrorCode::invariant_violation, "lanelet " + std::to_string(l.id) +
                                                 " references unknown successor " +
                                                 std::to_string(ref));
      }
    }
  }
  return sc;
}

}  // namespace roadgame
