#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "roadgame/geometry.hpp"

using namespace roadgame;

namespace {

Lanelet rect_lanelet(int id, double x0, double x1, double y0, double y1) {
  Lanelet l;
  l.id = id;
  l.left_bound = {{x0, y1}, {x1, y1}};
  l.right_bound = {{x0, y0}, {x1, y0}};
  return l;
}

bool near(const Point2& a, const Point2& b, double tol = 1e-12) {
  return std::fabs(a.x - b.x) <= tol && std::fabs(a.y - b.y) <= tol;
}

bool corner_set_matches(const std::array<Point2, 4>& got, std::array<Point2, 4> want,
                        double tol = 1e-9) {
  for (const Point2& g : got) {
    bool found = false;
    for (Point2& w : want) {
      if (near(g, w, tol)) {
        found = true;
        w = {1e18, 1e18};  // consume
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

OrientedBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> len(0.5, 6.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  OrientedBox b;
  b.center = {pos(rng), pos(rng)};
  b.length = len(rng);
  b.width = len(rng);
  b.orientation = ang(rng);
  return b;
}

}  // namespace

TEST_CASE("box_corners axis-aligned 4x2") {
  const OrientedBox b{{0, 0}, 4, 2, 0};
  const auto corners = box_corners(b);
  CHECK(near(corners[0], {2, 1}));
  CHECK(near(corners[1], {-2, 1}));
  CHECK(near(corners[2], {-2, -1}));
  CHECK(near(corners[3], {2, -1}));
  // counter-clockwise order
  double area = 0;
  for (size_t i = 0; i < 4; ++i) {
    const Point2& p = corners[i];
    const Point2& q = corners[(i + 1) % 4];
    area += p.x * q.y - q.x * p.y;
  }
  CHECK(area > 0);
}

TEST_CASE("box_corners rotations") {
  const OrientedBox quarter{{0, 0}, 4, 2, M_PI / 2};
  CHECK(corner_set_matches(box_corners(quarter),
                           {Point2{1, 2}, Point2{-1, 2}, Point2{-1, -2}, Point2{1, -2}}));
  const OrientedBox flipped{{0, 0}, 4, 2, M_PI};
  CHECK(corner_set_matches(box_corners(flipped),
                           {Point2{2, 1}, Point2{-2, 1}, Point2{-2, -1}, Point2{2, -1}}));
}

TEST_CASE("box center is the mean of its corners") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const OrientedBox b = random_box(rng);
    const auto corners = box_corners(b);
    double mx = 0, my = 0;
    for (const auto& c : corners) {
      mx += c.x;
      my += c.y;
    }
    CHECK(mx / 4 == doctest::Approx(b.center.x).epsilon(1e-9));
    CHECK(my / 4 == doctest::Approx(b.center.y).epsilon(1e-9));
  }
}

TEST_CASE("circle_cover radius and centers") {
  SUBCASE("4x2 box with three circles") {
    const CircleCover cover = circle_cover({{0, 0}, 4, 2, 0}, 3);
    REQUIRE(cover.count() == 3);
    const double expected = 0.5 * std::sqrt((4.0 / 3) * (4.0 / 3) + 4.0);
    CHECK(cover.radius == doctest::Approx(expected).epsilon(1e-12));
    CHECK(cover.radius == doctest::Approx(1.2019).epsilon(1e-4));
    CHECK(cover.centers[0].x == doctest::Approx(-4.0 / 3));
    CHECK(cover.centers[1].x == doctest::Approx(0.0));
    CHECK(cover.centers[2].x == doctest::Approx(4.0 / 3));
  }
  SUBCASE("single circle circumscribes the box") {
    const CircleCover cover = circle_cover({{0, 0}, 4, 2, 0}, 1);
    CHECK(cover.radius == doctest::Approx(0.5 * std::sqrt(16.0 + 4.0)));
  }
  SUBCASE("unit-ish square") {
    const CircleCover cover = circle_cover({{0, 0}, 2, 2, 0}, 1);
    CHECK(cover.radius == doctest::Approx(std::sqrt(2.0)));
  }
}

TEST_CASE("cover soundness: every box point lies in some circle") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const OrientedBox b = random_box(rng);
    for (int n = 1; n <= 8; ++n) {
      const CircleCover cover = circle_cover(b, n);
      const double c = std::cos(b.orientation), s = std::sin(b.orientation);
      for (int i = 0; i <= 30; ++i) {
        for (int j = 0; j <= 30; ++j) {
          const double lx = (i / 30.0 - 0.5) * b.length;
          const double ly = (j / 30.0 - 0.5) * b.width;
          const Point2 p{b.center.x + lx * c - ly * s, b.center.y + lx * s + ly * c};
          bool covered = false;
          for (const Point2& q : cover.centers) {
            if (std::hypot(p.x - q.x, p.y - q.y) <= cover.radius * (1 + 1e-12) + 1e-12) {
              covered = true;
              break;
            }
          }
          CHECK(covered);
          if (!covered) return;
        }
      }
    }
  }
}

TEST_CASE("min_circle_distance") {
  CircleCover a{{{0, 0}}, 1.0};
  CircleCover b{{{3, 0}}, 1.0};
  CHECK(min_circle_distance(a, b) == doctest::Approx(1.0));
  CHECK(min_circle_distance(a, a) == doctest::Approx(-2.0));
}

TEST_CASE("circle distance lower-bounds the exact polygon distance") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 500; ++i) {
    const OrientedBox a = random_box(rng);
    const OrientedBox b = random_box(rng);
    const double approx =
        min_circle_distance(circle_cover(a, default_circle_count(a)),
                            circle_cover(b, default_circle_count(b)));
    const double exact = oracles::convex_polygon_distance(oracles::box_polygon(a),
                                                          oracles::box_polygon(b));
    CHECK(approx <= exact + 1e-9);
  }
}

TEST_CASE("collide") {
  const OrientedBox ego{{0, 0}, 4, 2, 0};
  SUBCASE("coincident boxes collide") {
    CHECK(collide(ego, {OrientedBox{{0, 0}, 4, 2, 0}}, 0.5));
  }
  SUBCASE("distant boxes do not") {
    CHECK_FALSE(collide(ego, {OrientedBox{{100, 0}, 4, 2, 0}}, 0.5));
  }
  SUBCASE("no obstacles never collides") { CHECK_FALSE(collide(ego, {}, 0.5)); }
  SUBCASE("conservative against the exact distance oracle") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> margin_dist(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const OrientedBox a = random_box(rng);
      const OrientedBox b = random_box(rng);
      const double margin = margin_dist(rng);
      const double exact = oracles::convex_polygon_distance(oracles::box_polygon(a),
                                                            oracles::box_polygon(b));
      if (exact < margin) {
        CHECK(collide(a, {b}, margin));
      }
    }
  }
}

TEST_CASE("point_on_road with boundary counted inside") {
  const std::vector<LaneletPolygon> polys = {lanelet_polygon(rect_lanelet(1, 0, 100, -2, 2))};
  CHECK(point_on_road({50, 0}, polys));
  CHECK_FALSE(point_on_road({50, 5}, polys));
  CHECK(point_on_road({50, 2}, polys));
  CHECK(point_on_road({0, -2}, polys));
  CHECK_FALSE(point_on_road({-0.001, 0}, polys));
}

TEST_CASE("point_on_road is invariant under rigid transforms") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Lanelet base = rect_lanelet(1, 0, 20, -3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const double phi = unit(rng) * M_PI;
    const double tx = unit(rng) * 40, ty = unit(rng) * 40;
    const double c = std::cos(phi), s = std::sin(phi);
    auto transform = [&](const Point2& p) {
      return Point2{p.x * c - p.y * s + tx, p.x * s + p.y * c + ty};
    };
    Lanelet moved = base;
    for (auto* bound : {&moved.left_bound, &moved.right_bound}) {
      for (auto& p : *bound) p = transform(p);
    }
    const std::vector<LaneletPolygon> orig = {lanelet_polygon(base)};
    const std::vector<LaneletPolygon> rigid = {lanelet_polygon(moved)};
    for (int i = 0; i < 100; ++i) {
      const Point2 p{unit(rng) * 30, unit(rng) * 10};
      // skip points within 1e-6 of the boundary, where the decision may flip
      const double d_edge = std::min({std::fabs(p.y - 3), std::fabs(p.y + 3),
                                      std::fabs(p.x - 0), std::fabs(p.x - 20)});
      if (d_edge < 1e-6) continue;
      CHECK(point_on_road(p, orig) == point_on_road(transform(p), rigid));
    }
  }
}

TEST_CASE("offroad") {
  const std::vector<LaneletPolygon> polys = {lanelet_polygon(rect_lanelet(1, 0, 100, -2, 2))};
  SUBCASE("vehicle fully inside") {
    CHECK_FALSE(offroad({{50, 0}, 4, 2, 0}, polys));
  }
  SUBCASE("top corners poke out") {
    CHECK(offroad({{50, 1.5}, 4, 2, 0}, polys));
  }
  SUBCASE("vehicle spanning two touching lanelets stays on-road") {
    const std::vector<LaneletPolygon> pair = {lanelet_polygon(rect_lanelet(1, 0, 50, -2, 2)),
                                              lanelet_polygon(rect_lanelet(2, 50, 100, -2, 2))};
    const OrientedBox ego{{50, 0}, 4, 2, 0};
    CHECK_FALSE(offroad(ego, pair));
    // dense-sampling oracle: every box point lies in the union
    const auto corners = box_corners(ego);
    (void)corners;
    for (int i = 0; i <= 40; ++i) {
      for (int j = 0; j <= 40; ++j) {
        const double lx = (i / 40.0 - 0.5) * ego.length;
        const double ly = (j / 40.0 - 0.5) * ego.width;
        CHECK(point_on_road({ego.center.x + lx, ego.center.y + ly}, pair));
      }
    }
  }
  SUBCASE("removing a lanelet never flips offroad to false") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<LaneletPolygon> both = {lanelet_polygon(rect_lanelet(1, 0, 50, -2, 2)),
                                        lanelet_polygon(rect_lanelet(2, 20, 70, 1, 5))};
    std::vector<LaneletPolygon> fewer = {both[0]};
    for (int i = 0; i < 300; ++i) {
      OrientedBox b{{unit(rng) * 60 + 20, unit(rng) * 6}, 3, 1.5, unit(rng) * M_PI};
      if (offroad(b, both)) CHECK(offroad(b, fewer));
    }
  }
}

TEST_CASE("lanelet polygon is counter-clockwise regardless of bound direction") {
  const Lanelet l = rect_lanelet(1, 0, 10, -2, 2);
  const LaneletPolygon poly = lanelet_polygon(l);
  double area = 0;
  const size_t n = poly.ring.size();
  for (size_t i = 0; i < n; ++i) {
    area += poly.ring[i].x * poly.ring[(i + 1) % n].y -
            poly.ring[(i + 1) % n].x * poly.ring[i].y;
  }
  CHECK(area > 0);
}

TEST_CASE("occupancy_box conservatively contains every shape") {
  const StateRecord pose{0, {5, 3}, 0.7, 0, 0};
  SUBCASE("rectangle maps exactly") {
    const OrientedBox b = occupancy_box(RectangleShape{4, 2}, pose);
    CHECK(b.length == 4);
    CHECK(b.width == 2);
    CHECK(b.orientation == 0.7);
  }
  SUBCASE("circle maps to its bounding square") {
    const OrientedBox b = occupancy_box(CircleShape{1.5}, pose);
    CHECK(b.length == 3);
    CHECK(b.width == 3);
  }
  SUBCASE("polygon maps to its local bounding box") {
    PolygonShape poly{{{-1, 0}, {1, -1}, {2, 2}}};
    const OrientedBox b = occupancy_box(poly, StateRecord{0, {0, 0}, 0, 0, 0});
    CHECK(b.length == doctest::Approx(3.0));
    CHECK(b.width == doctest::Approx(3.0));
    CHECK(b.center.x == doctest::Approx(0.5));
    CHECK(b.center.y == doctest::Approx(0.5));
  }
}
