#include "roadgame/render.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "roadgame/dynamics.hpp"
#include "roadgame/geometry.hpp"

namespace roadgame {

namespace {

struct Bounds {
  double lo_x = std::numeric_limits<double>::infinity();
  double hi_x = -std::numeric_limits<double>::infinity();
  double lo_y = std::numeric_limits<double>::infinity();
  double hi_y = -std::numeric_limits<double>::infinity();

  void add(const Point2& p) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  bool empty() const { return !(lo_x <= hi_x); }
};

std::string polygon_element(const ViewTransform& vt, const std::vector<Point2>& pts,
                            const std::string& cls) {
  std::string out = "<polygon class=\"" + cls + "\" points=\"";
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ' ';
    out += format_double(vt.px(pts[i].x));
    out += ',';
    out += format_double(vt.py(pts[i].y));
  }
  out += "\"/>";
  return out;
}

std::string box_element(const ViewTransform& vt, const OrientedBox& box,
                        const std::string& cls) {
  const auto corners = box_corners(box);
  return polygon_element(vt, {corners.begin(), corners.end()}, cls);
}

std::string shape_element(const ViewTransform& vt, const Shape& shape, const StateRecord& pose,
                          const std::string& cls) {
  if (const auto* c = std::get_if<CircleShape>(&shape)) {
    return "<circle class=\"" + cls + "\" cx=\"" + format_double(vt.px(pose.position.x)) +
           "\" cy=\"" + format_double(vt.py(pose.position.y)) + "\" r=\"" +
           format_double(vt.scale * c->radius) + "\"/>";
  }
  if (const auto* poly = std::get_if<PolygonShape>(&shape)) {
    const double cs = std::cos(pose.orientation);
    const double sn = std::sin(pose.orientation);
    std::vector<Point2> world;
    world.reserve(poly->vertices.size());
    for (const auto& v : poly->vertices) {
      world.push_back({pose.position.x + v.x * cs - v.y * sn,
                       pose.position.y + v.x * sn + v.y * cs});
    }
    return polygon_element(vt, world, cls);
  }
  return box_element(vt, occupancy_box(shape, pose), cls);
}

}  // namespace

ViewTransform view_transform(const Scenario& sc, const Trajectory* tr,
                             const RenderOptions& opts) {
  Bounds b;
  for (const auto& l : sc.lanelets) {
    for (const auto* bound : {&l.left_bound, &l.right_bound}) {
      for (const auto& p : *bound) b.add(p);
    }
  }
  for (const auto& o : sc.obstacles) {
    if (const auto* tb = std::get_if<TrajectoryBehaviour>(&o.behaviour)) {
      for (const auto& s : tb->states) b.add(s.position);
    } else if (const auto* sp = std::get_if<StaticPose>(&o.behaviour)) {
      b.add(sp->state.position);
    } else {
      b.add(std::get<ReactiveBehaviour>(o.behaviour).initial_state.position);
    }
  }
  for (const auto& pp : sc.planning_problems) {
    b.add(pp.initial_state.position);
    b.add(pp.goal.center);
  }
  if (tr) {
    for (const auto& s : *tr) b.add(s.position);
  }
  if (b.empty()) {
    b = Bounds{0.0, 1.0, 0.0, 1.0};
  }
  b.lo_x -= opts.padding;
  b.hi_x += opts.padding;
  b.lo_y -= opts.padding;
  b.hi_y += opts.padding;

  ViewTransform vt;
  vt.scale = std::min(opts.width / (b.hi_x - b.lo_x), opts.height / (b.hi_y - b.lo_y));
  vt.offset_x = -vt.scale * b.lo_x;
  vt.offset_y = vt.scale * b.hi_y;
  return vt;
}

int render_frame_count(const Scenario& sc, const Trajectory* tr) {
  int count = 1;
  if (tr) count = std::max(count, static_cast<int>(tr->size()));
  for (const auto& o : sc.obstacles) {
    if (const auto* tb = std::get_if<TrajectoryBehaviour>(&o.behaviour)) {
      count = std::max(count, tb->states.back().time_step + 1);
    }
  }
  return count;
}

std::string render_frame(const Scenario& sc, const Trajectory* tr, int t,
                         const VehicleProfile& profile, const RenderOptions& opts) {
  const ViewTransform vt = view_transform(sc, tr, opts);
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
      << opts.height << "\" viewBox=\"0 0 " << opts.width << " " << opts.height << "\">\n";
  svg << "  <style>\n"
         "    .lanelet { fill: #d9d9d9; stroke: #7a7a7a; stroke-width: 1; }\n"
         "    .goal { fill: #aee8ae; stroke: #2e8b2e; stroke-width: 1; fill-opacity: 0.6; }\n"
         "    .obstacle-static { fill: #8b4a4a; stroke: #5a2d2d; }\n"
         "    .obstacle { fill: #e8a13c; stroke: #9c6a1e; }\n"
         "    .ego { fill: #4a7ab5; stroke: #274d7a; }\n"
         "  </style>\n";

  for (const auto& l : sc.lanelets) {
    svg << "  " << polygon_element(vt, lanelet_polygon(l).ring, "lanelet") << "\n";
  }
  for (const auto& pp : sc.planning_problems) {
    StateRecord goal_pose{0, pp.goal.center, pp.goal.orientation, 0.0, 0.0};
    svg << "  " << shape_element(vt, pp.goal.position_shape, goal_pose, "goal") << "\n";
  }
  for (const auto& o : sc.obstacles) {
    StateRecord pose;
    if (std::holds_alternative<ReactiveBehaviour>(o.behaviour)) {
      // rendered at the maintain-speed reference position
      pose = std::get<ReactiveBehaviour>(o.behaviour).initial_state;
      DynamicsParams p;
      p.period = sc.time_step_size;
      for (int k = 0; k < t; ++k) pose = obstacle_moves(o, pose, p)[0];
    } else {
      pose = obstacle_state_at(o, t);
    }
    const bool is_static = o.role == ObstacleRole::static_obstacle;
    svg << "  " << shape_element(vt, o.shape, pose, is_static ? "obstacle-static" : "obstacle")
        << "\n";
  }
  if (tr && !tr->empty()) {
    const size_t idx = std::min(static_cast<size_t>(std::max(t, 0)), tr->size() - 1);
    const StateRecord& s = (*tr)[idx];
    const OrientedBox ego{{s.position.x, s.position.y}, profile.length, profile.width,
                          s.orientation};
    svg << "  " << box_element(vt, ego, "ego") << "\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_manifest(const std::vector<std::string>& frames, double frame_time) {
  nlohmann::json j;
  j["format"] = "render-manifest";
  j["version"] = 1;
  j["frame_time"] = frame_time;
  j["frames"] = frames;
  return j.dump(2) + "\n";
}

}  // namespace roadgame
