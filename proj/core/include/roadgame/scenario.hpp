#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "roadgame/errors.hpp"

namespace roadgame {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct RectangleShape {
  double length = 0.0;
  double width = 0.0;
  friend bool operator==(const RectangleShape&, const RectangleShape&) = default;
};

struct CircleShape {
  double radius = 0.0;
  friend bool operator==(const CircleShape&, const CircleShape&) = default;
};

/// Vertices are local to the carrying entity's pose and must form a convex ring.
struct PolygonShape {
  std::vector<Point2> vertices;
  friend bool operator==(const PolygonShape&, const PolygonShape&) = default;
};

using Shape = std::variant<RectangleShape, CircleShape, PolygonShape>;

enum class ObstacleType { car, truck, bus, bicycle, pedestrian, unknown };

const char* to_string(ObstacleType type);
ObstacleType obstacle_type_from_string(const std::string& tag);  // unmatched tags map to `unknown`

/// One sampled vehicle state. Orientation is kept normalized to (-pi, pi].
struct StateRecord {
  int time_step = 0;
  Point2 position;
  double orientation = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
  friend bool operator==(const StateRecord&, const StateRecord&) = default;
};

struct Lanelet {
  int id = 0;
  std::vector<Point2> left_bound;
  std::vector<Point2> right_bound;
  std::vector<int> predecessors;
  std::vector<int> successors;
  std::vector<std::string> extras;  // unknown child elements, canonical XML text
  friend bool operator==(const Lanelet&, const Lanelet&) = default;
};

enum class ObstacleRole { static_obstacle, dynamic_obstacle };

struct TrajectoryBehaviour {
  /// Full state sequence including time step 0; strictly increasing time steps.
  std::vector<StateRecord> states;
  friend bool operator==(const TrajectoryBehaviour&, const TrajectoryBehaviour&) = default;
};

struct ReactiveBehaviour {
  std::string action_set = "default";
  StateRecord initial_state;
  friend bool operator==(const ReactiveBehaviour&, const ReactiveBehaviour&) = default;
};

struct StaticPose {
  StateRecord state;
  friend bool operator==(const StaticPose&, const StaticPose&) = default;
};

using ObstacleBehaviour = std::variant<StaticPose, TrajectoryBehaviour, ReactiveBehaviour>;

struct Obstacle {
  int id = 0;
  ObstacleType type = ObstacleType::unknown;
  Shape shape;
  ObstacleRole role = ObstacleRole::static_obstacle;
  ObstacleBehaviour behaviour;
  std::vector<std::string> extras;
  friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct TimeInterval {
  int lo = 0;
  int hi = 0;
  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

/// Spatial goal shape placed at a pose, plus the intervals the ego state must hit.
/// For PolygonShape goals the vertices are absolute and the pose is identity.
struct GoalRegion {
  Shape position_shape;
  Point2 center;
  double orientation = 0.0;
  TimeInterval time;
  std::optional<Interval> orientation_interval;
  std::optional<Interval> velocity_interval;
  std::vector<std::string> extras;
  friend bool operator==(const GoalRegion&, const GoalRegion&) = default;
};

struct PlanningProblem {
  int id = 0;
  StateRecord initial_state;  // time_step must be 0
  GoalRegion goal;
  std::vector<std::string> extras;
  friend bool operator==(const PlanningProblem&, const PlanningProblem&) = default;
};

struct Scenario {
  std::string benchmark_id;
  double time_step_size = 1.0;  // seconds per decision period
  std::vector<Lanelet> lanelets;
  std::vector<Obstacle> obstacles;
  std::vector<PlanningProblem> planning_problems;
  std::vector<std::string> extras;
  std::vector<std::pair<std::string, std::string>> extra_attributes;
  friend bool operator==(const Scenario&, const Scenario&) = default;

  const Lanelet* find_lanelet(int id) const;
  const Obstacle* find_obstacle(int id) const;
};

/// Parses scenario XML. Throws Error with code malformed_xml, schema_violation
/// or invariant_violation; any byte input yields a Scenario or a typed error.
Scenario parse_scenario(const std::string& xml_text);

/// Canonical serialization; parse_scenario(serialize_scenario(s)) == s and the
/// output is byte-stable across runs.
std::string serialize_scenario(const Scenario& s);

struct Diagnostic {
  int entity_id = 0;
  std::string message;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Empty result iff all invariants and cross-references hold.
std::vector<Diagnostic> validate_scenario(const Scenario& s);

/// Normalizes an angle to (-pi, pi].
double normalize_angle(double radians);

/// Shortest decimal form that round-trips to the same double (std::to_chars).
std::string format_double(double value);

}  // namespace roadgame
