#include "roadgame/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace roadgame {

namespace {

constexpr double kBoundaryEps = 1e-9;

Point2 rotate(const Point2& p, double c, double s) {
  return {p.x * c - p.y * s, p.x * s + p.y * c};
}

double signed_area(const std::vector<Point2>& ring) {
  double a = 0.0;
  const size_t n = ring.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2& p = ring[i];
    const Point2& q = ring[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

bool on_segment(const Point2& p, const Point2& a, const Point2& b) {
  const double abx = b.x - a.x, aby = b.y - a.y;
  const double apx = p.x - a.x, apy = p.y - a.y;
  const double cross = abx * apy - aby * apx;
  const double scale = std::max({1.0, std::fabs(abx), std::fabs(aby), std::fabs(apx),
                                 std::fabs(apy)});
  if (std::fabs(cross) > kBoundaryEps * scale) return false;
  const double dot = apx * abx + apy * aby;
  const double len2 = abx * abx + aby * aby;
  return dot >= -kBoundaryEps * scale && dot <= len2 + kBoundaryEps * scale;
}

bool point_in_ring(const Point2& p, const std::vector<Point2>& ring) {
  const size_t n = ring.size();
  for (size_t i = 0; i < n; ++i) {
    if (on_segment(p, ring[i], ring[(i + 1) % n])) return true;
  }
  // even-odd crossing count
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = ring[i];
    const Point2& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

std::array<Point2, 4> box_corners(const OrientedBox& b) {
  const double c = std::cos(b.orientation);
  const double s = std::sin(b.orientation);
  const double hl = 0.5 * b.length;
  const double hw = 0.5 * b.width;
  const std::array<Point2, 4> local = {Point2{hl, hw}, Point2{-hl, hw}, Point2{-hl, -hw},
                                       Point2{hl, -hw}};
  std::array<Point2, 4> out{};
  for (size_t i = 0; i < 4; ++i) {
    Point2 r = rotate(local[i], c, s);
    out[i] = {b.center.x + r.x, b.center.y + r.y};
  }
  return out;
}

int default_circle_count(const OrientedBox& b) {
  return std::max(1, static_cast<int>(std::ceil(b.length / b.width)));
}

CircleCover circle_cover(const OrientedBox& b, int n) {
  CircleCover cover;
  const double seg = b.length / n;
  cover.radius = 0.5 * std::sqrt(seg * seg + b.width * b.width);
  const double c = std::cos(b.orientation);
  const double s = std::sin(b.orientation);
  cover.centers.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    // segment centers: offsets (2i + 1 - n) * length / (2n) along the main axis
    const double offset = (2.0 * i + 1.0 - n) * b.length / (2.0 * n);
    cover.centers.push_back({b.center.x + offset * c, b.center.y + offset * s});
  }
  return cover;
}

double min_circle_distance(const CircleCover& a, const CircleCover& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point2& pa : a.centers) {
    for (const Point2& pb : b.centers) {
      const double d = std::hypot(pa.x - pb.x, pa.y - pb.y) - a.radius - b.radius;
      best = std::min(best, d);
    }
  }
  return best;
}

bool collide(const OrientedBox& ego, const std::vector<OrientedBox>& others, double margin,
             int n_circles) {
  const CircleCover ego_cover =
      circle_cover(ego, n_circles > 0 ? n_circles : default_circle_count(ego));
  for (const OrientedBox& other : others) {
    const CircleCover other_cover =
        circle_cover(other, n_circles > 0 ? n_circles : default_circle_count(other));
    if (min_circle_distance(ego_cover, other_cover) < margin) return true;
  }
  return false;
}

LaneletPolygon lanelet_polygon(const Lanelet& l) {
  LaneletPolygon poly;
  poly.lanelet_id = l.id;
  poly.ring = l.left_bound;
  poly.ring.insert(poly.ring.end(), l.right_bound.rbegin(), l.right_bound.rend());
  if (signed_area(poly.ring) < 0.0) {
    std::reverse(poly.ring.begin(), poly.ring.end());
  }
  return poly;
}

std::vector<LaneletPolygon> lanelet_polygons(const Scenario& sc) {
  std::vector<LaneletPolygon> out;
  out.reserve(sc.lanelets.size());
  for (const auto& l : sc.lanelets) out.push_back(lanelet_polygon(l));
  return out;
}

bool point_on_road(const Point2& p, const std::vector<LaneletPolygon>& lanelets) {
  for (const auto& lp : lanelets) {
    if (point_in_ring(p, lp.ring)) return true;
  }
  return false;
}

bool offroad(const OrientedBox& ego, const std::vector<LaneletPolygon>& lanelets) {
  const auto corners = box_corners(ego);
  std::array<Point2, 9> samples{};
  for (size_t i = 0; i < 4; ++i) samples[i] = corners[i];
  for (size_t i = 0; i < 4; ++i) {
    const Point2& a = corners[i];
    const Point2& b = corners[(i + 1) % 4];
    samples[4 + i] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  }
  samples[8] = ego.center;
  for (const Point2& p : samples) {
    if (!point_on_road(p, lanelets)) return true;
  }
  return false;
}

bool point_in_shape(const Point2& p, const Shape& shape, const Point2& center,
                    double orientation) {
  if (const auto* r = std::get_if<RectangleShape>(&shape)) {
    const double c = std::cos(orientation);
    const double s = std::sin(orientation);
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    // rotate into the rectangle frame
    const double lx = dx * c + dy * s;
    const double ly = -dx * s + dy * c;
    return std::fabs(lx) <= 0.5 * r->length + kBoundaryEps &&
           std::fabs(ly) <= 0.5 * r->width + kBoundaryEps;
  }
  if (const auto* circ = std::get_if<CircleShape>(&shape)) {
    return std::hypot(p.x - center.x, p.y - center.y) <= circ->radius + kBoundaryEps;
  }
  const auto& poly = std::get<PolygonShape>(shape);
  return point_in_ring(p, poly.vertices);
}

OrientedBox occupancy_box(const Shape& shape, const StateRecord& pose) {
  if (const auto* r = std::get_if<RectangleShape>(&shape)) {
    return {pose.position, r->length, r->width, pose.orientation};
  }
  if (const auto* c = std::get_if<CircleShape>(&shape)) {
    return {pose.position, 2.0 * c->radius, 2.0 * c->radius, pose.orientation};
  }
  const auto& poly = std::get<PolygonShape>(shape);
  double lo_x = poly.vertices.front().x, hi_x = lo_x;
  double lo_y = poly.vertices.front().y, hi_y = lo_y;
  for (const auto& v : poly.vertices) {
    lo_x = std::min(lo_x, v.x);
    hi_x = std::max(hi_x, v.x);
    lo_y = std::min(lo_y, v.y);
    hi_y = std::max(hi_y, v.y);
  }
  const double c = std::cos(pose.orientation);
  const double s = std::sin(pose.orientation);
  const Point2 local_center{0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)};
  const Point2 world = {pose.position.x + local_center.x * c - local_center.y * s,
                        pose.position.y + local_center.x * s + local_center.y * c};
  return {world, hi_x - lo_x, hi_y - lo_y, pose.orientation};
}

}  // namespace roadgame
