#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "roadgame/dynamics.hpp"

using namespace roadgame;

TEST_CASE("the nine atomic actions are distinct and index-bijective") {
  const DynamicsParams p;
  const auto actions = ego_actions(p);
  std::set<std::pair<double, double>> seen;
  for (int i = 0; i < 9; ++i) {
    CHECK(actions[static_cast<size_t>(i)].index == i);
    seen.insert({actions[static_cast<size_t>(i)].accel_cmd,
                 actions[static_cast<size_t>(i)].yaw_cmd});
  }
  CHECK(seen.size() == 9);
  // row-major over accel x yaw
  CHECK(actions[0].accel_cmd == -p.accel);
  CHECK(actions[0].yaw_cmd == -p.yaw_rate);
  CHECK(actions[4].accel_cmd == 0.0);
  CHECK(actions[4].yaw_cmd == 0.0);
  CHECK(actions[8].accel_cmd == p.accel);
  CHECK(actions[8].yaw_cmd == p.yaw_rate);
}

TEST_CASE("rest is a fixpoint of the coast action") {
  const DynamicsParams p;
  const EgoState s{3.0, -1.0, 0.5, 0.0, 0.0, 4};
  const EgoState next = step(s, ego_action(4, p), p);
  CHECK(next.x == s.x);
  CHECK(next.y == s.y);
  CHECK(next.v == 0.0);
  CHECK(next.t == 5);
}

TEST_CASE("straight-line motion advances x by v * period") {
  const DynamicsParams p;
  const EgoState s{0, 0, 0, 10.0, 0, 0};
  const EgoState next = step(s, ego_action(4, p), p);
  CHECK(next.x == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(next.y == 0.0);
  CHECK(next.v == 10.0);
}

TEST_CASE("one period of turning matches a fine-step reference within 1e-3") {
  DynamicsParams p;
  const EgoState s{0, 0, 0, 5.0, 0, 0};
  EgoAction turn{0.0, 0.4, 5};
  const EgoState coarse = step(s, turn, p);
  const oracles::SimplePose fine =
      oracles::integrate_reference({0, 0, 0, 5.0}, 0.0, 0.4, p.period, 1000, p.v_max);
  CHECK(std::hypot(coarse.x - fine.x, coarse.y - fine.y) < 1e-3);
}

TEST_CASE("step is deterministic") {
  const DynamicsParams p;
  const EgoState s{1, 2, 0.3, 4, 0, 7};
  const EgoState a = step(s, ego_action(6, p), p);
  const EgoState b = step(s, ego_action(6, p), p);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.theta == b.theta);
  CHECK(a.v == b.v);
}

TEST_CASE("speed stays within [0, v_max] and time advances") {
  const DynamicsParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-50, 50);
  std::uniform_real_distribution<double> vel(0, p.v_max);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_int_distribution<int> act(0, 8);
  for (int i = 0; i < 2000; ++i) {
    const EgoState s{pos(rng), pos(rng), ang(rng), vel(rng), 0, i};
    const EgoState next = step(s, ego_action(act(rng), p), p);
    CHECK(next.v >= 0.0);
    CHECK(next.v <= p.v_max);
    CHECK(next.t == s.t + 1);
    CHECK(next.theta <= M_PI);
    CHECK(next.theta > -M_PI);
  }
}

TEST_CASE("stepping commutes with rigid rotation of the pose") {
  const DynamicsParams p;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> vel(0, p.v_max);
  std::uniform_int_distribution<int> act(0, 8);
  for (int i = 0; i < 500; ++i) {
    const double phi = ang(rng);
    const EgoState s{2.0, 1.0, ang(rng) * 0.25, vel(rng), 0, 0};
    const EgoAction a = ego_action(act(rng), p);

    const EgoState direct = step(s, a, p);
    EgoState rotated = s;
    const double c = std::cos(phi), sn = std::sin(phi);
    rotated.x = s.x * c - s.y * sn;
    rotated.y = s.x * sn + s.y * c;
    rotated.theta = normalize_angle(s.theta + phi);
    const EgoState stepped = step(rotated, a, p);
    const double back_x = stepped.x * c + stepped.y * sn;
    const double back_y = -stepped.x * sn + stepped.y * c;
    CHECK(back_x == doctest::Approx(direct.x).epsilon(1e-9));
    CHECK(back_y == doctest::Approx(direct.y).epsilon(1e-9));
    const double dtheta = normalize_angle(stepped.theta - phi - direct.theta);
    CHECK(std::fabs(dtheta) < 1e-9);
    CHECK(stepped.v == doctest::Approx(direct.v).epsilon(1e-12));
  }
}

TEST_CASE("obstacle_state_at") {
  Obstacle fixed;
  fixed.id = 1;
  fixed.role = ObstacleRole::static_obstacle;
  fixed.shape = RectangleShape{4, 2};
  fixed.behaviour = StaticPose{{0, {9, 9}, 0.1, 0, 0}};
  CHECK(obstacle_state_at(fixed, 7).position.x == 9);

  Obstacle moving;
  moving.id = 2;
  moving.role = ObstacleRole::dynamic_obstacle;
  moving.shape = RectangleShape{4, 2};
  TrajectoryBehaviour tb;
  for (int t = 0; t < 10; ++t) tb.states.push_back({t, {double(t), 0}, 0, 1, 0});
  moving.behaviour = tb;
  CHECK(obstacle_state_at(moving, 3).position.x == 3);
  CHECK(obstacle_state_at(moving, 3).time_step == 3);
  // hold-last beyond the end
  CHECK(obstacle_state_at(moving, 15).position.x == 9);
  CHECK(obstacle_state_at(moving, 15).time_step == 9);

  Obstacle reactive;
  reactive.id = 3;
  reactive.role = ObstacleRole::dynamic_obstacle;
  reactive.shape = RectangleShape{4, 2};
  reactive.behaviour = ReactiveBehaviour{"default", {0, {0, 0}, 0, 5, 0}};
  CHECK_THROWS_AS((void)obstacle_state_at(reactive, 0), Error);
  try {
    (void)obstacle_state_at(reactive, 0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_behaviour);
  }
}

TEST_CASE("obstacle_moves yields maintain, brake and accelerate successors") {
  DynamicsParams p;  // A = 2, period 1
  Obstacle reactive;
  reactive.id = 3;
  reactive.role = ObstacleRole::dynamic_obstacle;
  reactive.shape = RectangleShape{4, 2};
  reactive.behaviour = ReactiveBehaviour{"default", {0, {0, 0}, 0, 10, 0}};

  SUBCASE("cruising speed splits into {10, 8, 12}") {
    const auto moves = obstacle_moves(reactive, {0, {0, 0}, 0, 10, 0}, p);
    REQUIRE(moves.size() == 3);
    CHECK(moves[0].velocity == doctest::Approx(10.0));
    CHECK(moves[1].velocity == doctest::Approx(8.0));
    CHECK(moves[2].velocity == doctest::Approx(12.0));
    for (const auto& m : moves) {
      CHECK(m.time_step == 1);
      CHECK(m.orientation == 0.0);
      CHECK(m.position.y == 0.0);
    }
    CHECK(moves[1].position.x < moves[0].position.x);
    CHECK(moves[0].position.x < moves[2].position.x);
  }
  SUBCASE("braking clamps at zero") {
    const auto moves = obstacle_moves(reactive, {0, {0, 0}, 0, 0, 0}, p);
    CHECK(moves[1].velocity == 0.0);
  }
  SUBCASE("accelerating clamps at v_max") {
    const auto moves = obstacle_moves(reactive, {0, {0, 0}, 0, p.v_max, 0}, p);
    CHECK(moves[2].velocity == p.v_max);
  }
  SUBCASE("non-reactive obstacles are rejected") {
    Obstacle fixed;
    fixed.role = ObstacleRole::static_obstacle;
    fixed.behaviour = StaticPose{{0, {0, 0}, 0, 0, 0}};
    CHECK_THROWS_AS((void)obstacle_moves(fixed, {0, {0, 0}, 0, 0, 0}, p), Error);
  }
}
