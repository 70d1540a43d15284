#include "roadgame/uppaal.hpp"

#include <cmath>
#include <sstream>

#include "roadgame/geometry.hpp"

namespace roadgame {

namespace {

std::string escape_xml(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string double_list(const std::vector<double>& values) {
  std::string out = "{";
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  out += "}";
  return out;
}

std::string int_list(const std::vector<int>& values) {
  std::string out = "{";
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(values[i]);
  }
  out += "}";
  return out;
}

int obstacle_type_code(ObstacleType t) {
  switch (t) {
    case ObstacleType::car: return 0;
    case ObstacleType::truck: return 1;
    case ObstacleType::bus: return 2;
    case ObstacleType::bicycle: return 3;
    case ObstacleType::pedestrian: return 4;
    case ObstacleType::unknown: return 5;
  }
  return 5;
}

void emit_lanelets(std::ostringstream& out, const Scenario& sc) {
  size_t max_points = 0;
  for (const auto& l : sc.lanelets) max_points = std::max(max_points, l.left_bound.size());
  out << "const int LANELET_COUNT = " << sc.lanelets.size() << ";\n";
  out << "const int LANELET_MAX_POINTS = " << max_points << ";\n";
  out << "const int LANELET_ID[LANELET_COUNT] = ";
  {
    std::vector<int> ids;
    for (const auto& l : sc.lanelets) ids.push_back(l.id);
    out << int_list(ids) << ";\n";
  }
  out << "const int LANELET_POINTS[LANELET_COUNT] = ";
  {
    std::vector<int> counts;
    for (const auto& l : sc.lanelets) counts.push_back(static_cast<int>(l.left_bound.size()));
    out << int_list(counts) << ";\n";
  }
  auto emit_bound = [&](const char* name, bool left, bool x_coord) {
    out << "const double " << name << "[LANELET_COUNT][LANELET_MAX_POINTS] = {";
    for (size_t i = 0; i < sc.lanelets.size(); ++i) {
      const auto& bound = left ? sc.lanelets[i].left_bound : sc.lanelets[i].right_bound;
      std::vector<double> vals;
      for (const auto& p : bound) vals.push_back(x_coord ? p.x : p.y);
      vals.resize(max_points, 0.0);  // pad short bounds
      out << (i ? ", " : "") << double_list(vals);
    }
    out << "};\n";
  };
  emit_bound("LANELET_LEFT_X", true, true);
  emit_bound("LANELET_LEFT_Y", true, false);
  emit_bound("LANELET_RIGHT_X", false, true);
  emit_bound("LANELET_RIGHT_Y", false, false);
}

void emit_obstacles(std::ostringstream& out, const Scenario& sc, const DynamicsParams& p,
                    int maxt) {
  out << "const int OBSTACLE_COUNT = " << sc.obstacles.size() << ";\n";
  if (sc.obstacles.empty()) {
    out << "// no obstacles\n";
    return;
  }
  std::vector<int> ids, types, reactive;
  std::vector<double> lengths, widths;
  for (const auto& o : sc.obstacles) {
    ids.push_back(o.id);
    types.push_back(obstacle_type_code(o.type));
    reactive.push_back(std::holds_alternative<ReactiveBehaviour>(o.behaviour) ? 1 : 0);
    const OrientedBox box = occupancy_box(o.shape, StateRecord{});
    lengths.push_back(box.length);
    widths.push_back(box.width);
  }
  out << "const int OBSTACLE_ID[OBSTACLE_COUNT] = " << int_list(ids) << ";\n";
  out << "// type codes: 0 car, 1 truck, 2 bus, 3 bicycle, 4 pedestrian, 5 unknown\n";
  out << "const int OBSTACLE_TYPE[OBSTACLE_COUNT] = " << int_list(types) << ";\n";
  out << "const int OBSTACLE_REACTIVE[OBSTACLE_COUNT] = " << int_list(reactive) << ";\n";
  out << "const double OBSTACLE_LENGTH[OBSTACLE_COUNT] = " << double_list(lengths) << ";\n";
  out << "const double OBSTACLE_WIDTH[OBSTACLE_COUNT] = " << double_list(widths) << ";\n";

  // sampled poses per decision step; reactive obstacles hold their envelope
  // between the always-brake and always-accelerate paths
  auto emit_track = [&](const char* name, auto select) {
    out << "const double " << name << "[OBSTACLE_COUNT][" << (maxt + 1) << "] = {";
    for (size_t i = 0; i < sc.obstacles.size(); ++i) {
      const auto& o = sc.obstacles[i];
      std::vector<double> vals;
      if (std::holds_alternative<ReactiveBehaviour>(o.behaviour)) {
        StateRecord s = std::get<ReactiveBehaviour>(o.behaviour).initial_state;
        for (int t = 0; t <= maxt; ++t) {
          vals.push_back(select(s));
          if (t < maxt) s = obstacle_moves(o, s, p)[0];  // maintain-speed reference path
        }
      } else {
        for (int t = 0; t <= maxt; ++t) vals.push_back(select(obstacle_state_at(o, t)));
      }
      out << (i ? ", " : "") << double_list(vals);
    }
    out << "};\n";
  };
  emit_track("OBSTACLE_X", [](const StateRecord& s) { return s.position.x; });
  emit_track("OBSTACLE_Y", [](const StateRecord& s) { return s.position.y; });
  emit_track("OBSTACLE_THETA", [](const StateRecord& s) { return s.orientation; });
  emit_track("OBSTACLE_V", [](const StateRecord& s) { return s.velocity; });
}

void emit_goal(std::ostringstream& out, const PlanningProblem& pp) {
  const GoalRegion& g = pp.goal;
  const OrientedBox box = occupancy_box(
      g.position_shape, StateRecord{0, g.center, g.orientation, 0.0, 0.0});
  out << "const double GOAL_X = " << format_double(box.center.x) << ";\n";
  out << "const double GOAL_Y = " << format_double(box.center.y) << ";\n";
  out << "const double GOAL_LENGTH = " << format_double(box.length) << ";\n";
  out << "const double GOAL_WIDTH = " << format_double(box.width) << ";\n";
  out << "const double GOAL_ORIENT = " << format_double(box.orientation) << ";\n";
  out << "const int GOAL_TIME_LO = " << g.time.lo << ";\n";
  out << "const int GOAL_TIME_HI = " << g.time.hi << ";\n";
  out << "const int GOAL_HAS_ORIENT = " << (g.orientation_interval ? 1 : 0) << ";\n";
  out << "const double GOAL_ORIENT_LO = "
      << format_double(g.orientation_interval ? g.orientation_interval->lo : 0.0) << ";\n";
  out << "const double GOAL_ORIENT_HI = "
      << format_double(g.orientation_interval ? g.orientation_interval->hi : 0.0) << ";\n";
  out << "const int GOAL_HAS_VEL = " << (g.velocity_interval ? 1 : 0) << ";\n";
  out << "const double GOAL_VEL_LO = "
      << format_double(g.velocity_interval ? g.velocity_interval->lo : 0.0) << ";\n";
  out << "const double GOAL_VEL_HI = "
      << format_double(g.velocity_interval ? g.velocity_interval->hi : 0.0) << ";\n";
}

const char* kDrivabilityFunctions = R"(
bool point_on_road(double px, double py)
{
    int i, k, n;
    bool inside;
    double ax, ay, bx, by, xs;
    for (i = 0; i < LANELET_COUNT; i++) {
        n = LANELET_POINTS[i];
        inside = false;
        // ring: left bound forward, right bound backward
        for (k = 0; k < 2 * n; k++) {
            if (k < n) {
                ax = LANELET_LEFT_X[i][k]; ay = LANELET_LEFT_Y[i][k];
            } else {
                ax = LANELET_RIGHT_X[i][2 * n - 1 - k]; ay = LANELET_RIGHT_Y[i][2 * n - 1 - k];
            }
            if (k + 1 < n) {
                bx = LANELET_LEFT_X[i][k + 1]; by = LANELET_LEFT_Y[i][k + 1];
            } else if (k + 1 < 2 * n) {
                bx = LANELET_RIGHT_X[i][2 * n - 2 - k]; by = LANELET_RIGHT_Y[i][2 * n - 2 - k];
            } else {
                bx = LANELET_LEFT_X[i][0]; by = LANELET_LEFT_Y[i][0];
            }
            if ((ay > py) != (by > py)) {
                xs = (bx - ax) * (py - ay) / (by - ay) + ax;
                if (px < xs) { inside = !inside; }
            }
        }
        if (inside) { return true; }
    }
    return false;
}

bool offroad()
{
    int i, j;
    double cx, cy, hx, hy, wx, wy, sx, sy;
    double su[3] = {-1.0, 0.0, 1.0};
    double sv[3] = {-1.0, 0.0, 1.0};
    hx = 0.5 * EGO_LENGTH * cos(theta); hy = 0.5 * EGO_LENGTH * sin(theta);
    wx = -0.5 * EGO_WIDTH * sin(theta); wy = 0.5 * EGO_WIDTH * cos(theta);
    for (i = 0; i < 3; i++) {
        for (j = 0; j < 3; j++) {
            sx = x + su[i] * hx + sv[j] * wx;
            sy = y + su[i] * hy + sv[j] * wy;
            if (!point_on_road(sx, sy)) { return true; }
        }
    }
    return false;
}

bool collide()
{
    int i, a, b, na, nb;
    double ra, rb, seg_a, seg_b, oa, ob;
    double cax, cay, cbx, cby, dx, dy;
    for (i = 0; i < OBSTACLE_COUNT; i++) {
        na = fint(ceil(EGO_LENGTH / EGO_WIDTH));
        if (na < 1) { na = 1; }
        nb = fint(ceil(OBSTACLE_LENGTH[i] / OBSTACLE_WIDTH[i]));
        if (nb < 1) { nb = 1; }
        seg_a = EGO_LENGTH / na;
        seg_b = OBSTACLE_LENGTH[i] / nb;
        ra = 0.5 * sqrt(seg_a * seg_a + EGO_WIDTH * EGO_WIDTH);
        rb = 0.5 * sqrt(seg_b * seg_b + OBSTACLE_WIDTH[i] * OBSTACLE_WIDTH[i]);
        for (a = 0; a < na; a++) {
            oa = (2 * a + 1 - na) * EGO_LENGTH / (2 * na);
            cax = x + oa * cos(theta); cay = y + oa * sin(theta);
            for (b = 0; b < nb; b++) {
                ob = (2 * b + 1 - nb) * OBSTACLE_LENGTH[i] / (2 * nb);
                cbx = obs_x[i] + ob * cos(obs_theta[i]);
                cby = obs_y[i] + ob * sin(obs_theta[i]);
                dx = cax - cbx; dy = cay - cby;
                if (sqrt(dx * dx + dy * dy) - ra - rb < MARGIN) { return true; }
            }
        }
    }
    return false;
}

bool goal()
{
    double dx, dy, lx, ly;
    dx = x - GOAL_X; dy = y - GOAL_Y;
    lx = dx * cos(GOAL_ORIENT) + dy * sin(GOAL_ORIENT);
    ly = -dx * sin(GOAL_ORIENT) + dy * cos(GOAL_ORIENT);
    if (fabs(lx) > 0.5 * GOAL_LENGTH || fabs(ly) > 0.5 * GOAL_WIDTH) { return false; }
    if (step_count < GOAL_TIME_LO || step_count > GOAL_TIME_HI) { return false; }
    if (GOAL_HAS_ORIENT == 1 && (theta < GOAL_ORIENT_LO || theta > GOAL_ORIENT_HI)) { return false; }
    if (GOAL_HAS_VEL == 1 && (v < GOAL_VEL_LO || v > GOAL_VEL_HI)) { return false; }
    return true;
}

void sample_obstacles()
{
    int i;
    if (step_count <= MAXT) {
        for (i = 0; i < OBSTACLE_COUNT; i++) {
            obs_x[i] = OBSTACLE_X[i][step_count];
            obs_y[i] = OBSTACLE_Y[i][step_count];
            obs_theta[i] = OBSTACLE_THETA[i][step_count];
            obs_v[i] = OBSTACLE_V[i][step_count];
        }
    }
}
)";

}  // namespace

std::string ModelDocument::to_xml() const {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  out << "<!DOCTYPE nta PUBLIC '-//Uppaal Team//DTD Flat System 1.6//EN' "
         "'http://www.it.uu.se/research/group/darts/uppaal/flat-1_6.dtd'>\n";
  out << "<nta>\n";
  out << "  <declaration>" << escape_xml(declarations) << "</declaration>\n";
  for (const auto& t : templates) {
    out << "  <template>\n";
    out << "    <name>" << t.name << "</name>\n";
    if (!t.declaration.empty()) {
      out << "    <declaration>" << escape_xml(t.declaration) << "</declaration>\n";
    }
    out << t.locations_xml;
    out << "    <init ref=\"" << t.init_ref << "\"/>\n";
    out << t.transitions_xml;
    out << "  </template>\n";
  }
  out << "  <system>" << escape_xml(system_line) << "</system>\n";
  out << "  <queries>\n";
  for (const auto& q : queries) {
    out << "    <query>\n      <formula>" << escape_xml(q)
        << "</formula>\n      <comment/>\n    </query>\n";
  }
  out << "  </queries>\n";
  out << "</nta>\n";
  return out.str();
}

ModelDocument generate_model(const Scenario& sc, const DynamicsParams& p, const GridSpec& g,
                             const VehicleProfile& profile) {
  if (sc.planning_problems.empty()) {
    fail(ErrorCode::invariant_violation, "scenario has no planning problem");
  }
  for (const auto& o : sc.obstacles) {
    if (const auto* rb = std::get_if<ReactiveBehaviour>(&o.behaviour)) {
      if (rb->action_set != "default") {
        fail(ErrorCode::unsupported_feature,
             "reactive action set '" + rb->action_set + "' on obstacle " + std::to_string(o.id));
      }
    }
  }
  const PlanningProblem& pp = sc.planning_problems.front();

  ModelDocument doc;
  std::ostringstream decl;
  decl << "// generated from scenario " << sc.benchmark_id << "\n";
  decl << "const double PERIOD = " << format_double(p.period) << ";\n";
  decl << "const int MAXT = " << g.horizon << ";\n";
  decl << "const double A = " << format_double(p.accel) << ";\n";
  decl << "const double OMEGA = " << format_double(p.yaw_rate) << ";\n";
  decl << "const double VMAX = " << format_double(p.v_max) << ";\n";
  decl << "const double EGO_LENGTH = " << format_double(profile.length) << ";\n";
  decl << "const double EGO_WIDTH = " << format_double(profile.width) << ";\n";
  decl << "const double MARGIN = " << format_double(profile.margin) << ";\n";
  decl << "\n";
  emit_lanelets(decl, sc);
  decl << "\n";
  emit_obstacles(decl, sc, p, g.horizon);
  decl << "\n";
  emit_goal(decl, pp);
  decl << "\n";
  decl << "const double INIT_X = " << format_double(pp.initial_state.position.x) << ";\n";
  decl << "const double INIT_Y = " << format_double(pp.initial_state.position.y) << ";\n";
  decl << "const double INIT_THETA = " << format_double(pp.initial_state.orientation) << ";\n";
  decl << "const double INIT_V = " << format_double(pp.initial_state.velocity) << ";\n";
  decl << "\n";
  decl << "broadcast chan ego;\n";
  decl << "hybrid clock x = INIT_X, y = INIT_Y, theta = INIT_THETA, v = INIT_V;\n";
  decl << "double acc = 0.0;\n";
  decl << "double omega = 0.0;\n";
  decl << "double reward = 0.0;\n";
  decl << "int step_count = 0;\n";
  decl << "double obs_x[OBSTACLE_COUNT], obs_y[OBSTACLE_COUNT];\n";
  decl << "double obs_theta[OBSTACLE_COUNT], obs_v[OBSTACLE_COUNT];\n";
  decl << kDrivabilityFunctions;
  doc.declarations = decl.str();

  ModelDocument::Template cm;
  cm.name = "CM";
  cm.declaration = "clock t;";
  cm.locations_xml =
      "    <location id=\"id0\" x=\"0\" y=\"0\">\n"
      "      <name x=\"-10\" y=\"-34\">L1</name>\n"
      "      <urgent/>\n"
      "    </location>\n"
      "    <location id=\"id1\" x=\"170\" y=\"0\">\n"
      "      <name x=\"160\" y=\"-34\">L2</name>\n"
      "      <urgent/>\n"
      "    </location>\n"
      "    <location id=\"id2\" x=\"340\" y=\"0\">\n"
      "      <name x=\"330\" y=\"-34\">L3</name>\n"
      "      <label kind=\"invariant\" x=\"320\" y=\"18\">t &lt;= PERIOD</label>\n"
      "    </location>\n";
  cm.init_ref = "id0";
  cm.transitions_xml =
      "    <transition>\n"
      "      <source ref=\"id0\"/>\n"
      "      <target ref=\"id1\"/>\n"
      "      <label kind=\"synchronisation\" x=\"40\" y=\"-20\">ego!</label>\n"
      "      <label kind=\"assignment\" x=\"40\" y=\"2\">t = 0</label>\n"
      "    </transition>\n"
      "    <transition>\n"
      "      <source ref=\"id1\"/>\n"
      "      <target ref=\"id2\"/>\n"
      "      <label kind=\"assignment\" x=\"210\" y=\"2\">sample_obstacles()</label>\n"
      "    </transition>\n"
      "    <transition>\n"
      "      <source ref=\"id2\"/>\n"
      "      <target ref=\"id0\"/>\n"
      "      <label kind=\"guard\" x=\"150\" y=\"60\">t == PERIOD</label>\n"
      "      <label kind=\"assignment\" x=\"150\" y=\"82\">step_count = step_count + 1,\n"
      "reward = reward + (goal() ? 100.0 : -1.0 - 0.1 * fabs(acc))</label>\n"
      "    </transition>\n";

  ModelDocument::Template vd;
  vd.name = "VD";
  vd.locations_xml =
      "    <location id=\"id3\" x=\"0\" y=\"0\">\n"
      "      <name x=\"-10\" y=\"-34\">Drive</name>\n"
      "      <label kind=\"invariant\" x=\"-120\" y=\"18\">x' == v * cos(theta) &amp;&amp;\n"
      "y' == v * sin(theta) &amp;&amp;\ntheta' == omega &amp;&amp;\nv' == acc</label>\n"
      "    </location>\n";
  vd.init_ref = "id3";
  vd.transitions_xml =
      "    <transition controllable=\"false\">\n"
      "      <source ref=\"id3\"/>\n"
      "      <target ref=\"id3\"/>\n"
      "      <label kind=\"comments\" x=\"40\" y=\"-40\">perception</label>\n"
      "      <nail x=\"60\" y=\"-30\"/>\n"
      "      <nail x=\"60\" y=\"30\"/>\n"
      "    </transition>\n"
      "    <transition controllable=\"false\">\n"
      "      <source ref=\"id3\"/>\n"
      "      <target ref=\"id3\"/>\n"
      "      <label kind=\"comments\" x=\"-110\" y=\"-40\">moving obstacle reaction</label>\n"
      "      <nail x=\"-60\" y=\"-30\"/>\n"
      "      <nail x=\"-60\" y=\"30\"/>\n"
      "    </transition>\n";

  ModelDocument::Template aa;
  aa.name = "AA";
  aa.locations_xml =
      "    <location id=\"id4\" x=\"0\" y=\"0\">\n"
      "      <name x=\"-10\" y=\"-34\">Act</name>\n"
      "    </location>\n";
  aa.init_ref = "id4";
  {
    std::ostringstream edges;
    const auto actions = ego_actions(p);
    for (const auto& act : actions) {
      edges << "    <transition>\n"
            << "      <source ref=\"id4\"/>\n"
            << "      <target ref=\"id4\"/>\n"
            << "      <label kind=\"synchronisation\" x=\"20\" y=\"" << (act.index * 26)
            << "\">ego?</label>\n"
            << "      <label kind=\"assignment\" x=\"80\" y=\"" << (act.index * 26) << "\">acc = "
            << format_double(act.accel_cmd) << ", omega = " << format_double(act.yaw_cmd)
            << "</label>\n"
            << "      <nail x=\"" << (60 + act.index * 10) << "\" y=\"-30\"/>\n"
            << "      <nail x=\"" << (60 + act.index * 10) << "\" y=\"30\"/>\n"
            << "    </transition>\n";
    }
    aa.transitions_xml = edges.str();
  }

  doc.templates = {cm, vd, aa};
  doc.system_line = "system CM, VD, AA;";
  doc.queries = {"E[] !collide() && !offroad()",
                 "strategy safe = control: A[] !collide() && !offroad()",
                 "strategy reachS = maxE(reward)[<=" + std::to_string(g.horizon) +
                     "]: <> goal() under safe"};
  return doc;
}

std::string generate_queries(const Scenario& sc, int maxt) {
  (void)sc;
  std::string out;
  out += "E[] !collide() && !offroad()\n";
  out += "strategy safe = control: A[] !collide() && !offroad()\n";
  out += "strategy reachS = maxE(reward)[<=" + std::to_string(maxt) + "]: <> goal() under safe\n";
  return out;
}

}  // namespace roadgame
