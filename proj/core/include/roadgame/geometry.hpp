#pragma once

#include <array>
#include <vector>

#include "roadgame/scenario.hpp"

namespace roadgame {

struct OrientedBox {
  Point2 center;
  double length = 0.0;
  double width = 0.0;
  double orientation = 0.0;
};

/// Circles of equal radius strung along a box main axis; their union covers
/// the box.
struct CircleCover {
  std::vector<Point2> centers;
  double radius = 0.0;
  size_t count() const { return centers.size(); }
};

/// Lanelet occupancy ring: left bound followed by the reversed right bound,
/// normalized to counter-clockwise orientation.
struct LaneletPolygon {
  int lanelet_id = 0;
  std::vector<Point2> ring;
};

/// Corners in counter-clockwise order starting front-left (axis-aligned at
/// orientation 0: +x/+y first).
std::array<Point2, 4> box_corners(const OrientedBox& b);

/// Default circle count used when a caller passes n = 0.
int default_circle_count(const OrientedBox& b);

/// n circles centered on the main axis at spacing length/n with radius
/// 0.5 * sqrt((length/n)^2 + width^2).
CircleCover circle_cover(const OrientedBox& b, int n);

/// Minimum over circle pairs of (center distance - r_a - r_b). Negative when
/// the covers overlap.
double min_circle_distance(const CircleCover& a, const CircleCover& b);

/// True iff any other box comes within `margin` of the ego box under the
/// circle approximation. n_circles = 0 picks default_circle_count per box.
bool collide(const OrientedBox& ego, const std::vector<OrientedBox>& others, double margin,
             int n_circles = 0);

LaneletPolygon lanelet_polygon(const Lanelet& l);
std::vector<LaneletPolygon> lanelet_polygons(const Scenario& sc);

/// Even-odd containment with boundary points counted inside.
bool point_on_road(const Point2& p, const std::vector<LaneletPolygon>& lanelets);

/// Samples 4 corners, 4 edge midpoints and the center; true iff any sample
/// point is off every lanelet.
bool offroad(const OrientedBox& ego, const std::vector<LaneletPolygon>& lanelets);

/// True iff p lies inside `shape` placed at (center, orientation). Polygon
/// shapes are absolute; the pose is ignored for them.
bool point_in_shape(const Point2& p, const Shape& shape, const Point2& center, double orientation);

/// Conservative oriented-box occupancy for an obstacle shape at a pose:
/// rectangles map exactly, circles and polygons map to their bounding box.
OrientedBox occupancy_box(const Shape& shape, const StateRecord& pose);

}  // namespace roadgame
