#include <doctest.h>

#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "roadgame/scenario.hpp"

using namespace roadgame;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fixture(const std::string& name) {
  return read_file(std::string(ROADGAME_SCENARIO_DIR) + "/" + name);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::io_error;
}

const char* kFixtures[] = {
    "straight_one_lanelet.xml", "dynamic_trajectory.xml", "corridor.xml",
    "left_turn.xml",            "long_straight.xml",      "three_lanelets.xml",
    "all_blocked.xml",
};

}  // namespace

TEST_CASE("minimal fixture parses with 1/1/1 counts") {
  const Scenario sc = parse_scenario(fixture("straight_one_lanelet.xml"));
  CHECK(sc.lanelets.size() == 1);
  CHECK(sc.obstacles.size() == 1);
  CHECK(sc.planning_problems.size() == 1);
  CHECK(sc.benchmark_id == "RG_StraightOne-1");
  CHECK(sc.time_step_size == 1.0);
  CHECK(sc.lanelets[0].left_bound.size() == 2);
  CHECK(std::holds_alternative<StaticPose>(sc.obstacles[0].behaviour));
}

TEST_CASE("document without lanelets is a schema violation naming the path") {
  const char* doc = R"(<?xml version="1.0"?>
<commonRoad commonRoadVersion="2020a" benchmarkID="X" timeStepSize="1"/>)";
  try {
    parse_scenario(doc);
    FAIL("expected schema violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::schema_violation);
    CHECK(std::string(e.what()).find("commonRoad/lanelet") != std::string::npos);
  }
}

TEST_CASE("dynamic obstacle trajectory holds 10 records with steps 0..9") {
  const Scenario sc = parse_scenario(fixture("dynamic_trajectory.xml"));
  const auto* traj = std::get_if<TrajectoryBehaviour>(&sc.obstacles[0].behaviour);
  REQUIRE(traj != nullptr);
  REQUIRE(traj->states.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(traj->states[static_cast<size_t>(i)].time_step == i);
}

TEST_CASE("parse-serialize round trip is a fixpoint on every fixture") {
  for (const char* name : kFixtures) {
    CAPTURE(name);
    const Scenario sc = parse_scenario(fixture(name));
    const std::string out = serialize_scenario(sc);
    const Scenario again = parse_scenario(out);
    CHECK(again == sc);
    // reserialization is byte-identical
    CHECK(serialize_scenario(again) == out);
  }
}

TEST_CASE("unknown elements and attributes survive the round trip") {
  const char* doc = R"(<?xml version="1.0"?>
<commonRoad commonRoadVersion="2020a" benchmarkID="X" timeStepSize="1" author="someone">
  <scenarioTags><tag>urban</tag></scenarioTags>
  <lanelet id="1">
    <leftBound><point><x>0</x><y>2</y></point><point><x>10</x><y>2</y></point></leftBound>
    <rightBound><point><x>0</x><y>-2</y></point><point><x>10</x><y>-2</y></point></rightBound>
    <laneletType>urban</laneletType>
  </lanelet>
</commonRoad>)";
  const Scenario sc = parse_scenario(doc);
  REQUIRE(sc.extras.size() == 1);
  CHECK(sc.extras[0].find("scenarioTags") != std::string::npos);
  REQUIRE(sc.lanelets[0].extras.size() == 1);
  CHECK(sc.lanelets[0].extras[0] == "<laneletType>urban</laneletType>");
  REQUIRE(sc.extra_attributes.size() == 1);
  CHECK(sc.extra_attributes[0].first == "author");

  const Scenario again = parse_scenario(serialize_scenario(sc));
  CHECK(again == sc);
}

TEST_CASE("malformed input yields typed errors, never crashes") {
  CHECK(code_of([] { (void)parse_scenario("<commonRoad"); }) == ErrorCode::malformed_xml);
  CHECK(code_of([] { (void)parse_scenario(""); }) == ErrorCode::malformed_xml);
  CHECK(code_of([] { (void)parse_scenario("just text"); }) == ErrorCode::malformed_xml);
  CHECK(code_of([] { (void)parse_scenario("<other/>"); }) == ErrorCode::schema_violation);

  // byte fuzz: arbitrary input must never escape the typed error contract
  std::mt19937_64 rng(12345);
  const std::string seed = fixture("straight_one_lanelet.xml");
  for (int i = 0; i < 300; ++i) {
    std::string mutated = seed.substr(0, rng() % seed.size());
    for (int k = 0; k < 10; ++k) {
      mutated += static_cast<char>(rng() % 256);
    }
    try {
      (void)parse_scenario(mutated);
    } catch (const Error&) {
      // typed failure is fine
    }
  }
}

TEST_CASE("parser enforces structural invariants") {
  auto wrap = [](const std::string& body) {
    return "<commonRoad commonRoadVersion=\"2020a\" benchmarkID=\"X\" timeStepSize=\"1\">" +
           body + "</commonRoad>";
  };
  const std::string lanelet =
      "<lanelet id=\"1\"><leftBound><point><x>0</x><y>2</y></point>"
      "<point><x>9</x><y>2</y></point></leftBound><rightBound>"
      "<point><x>0</x><y>-2</y></point><point><x>9</x><y>-2</y></point></rightBound></lanelet>";

  SUBCASE("duplicate lanelet ids") {
    const std::string dup = lanelet + lanelet;
    CHECK(code_of([&] { (void)parse_scenario(wrap(dup)); }) == ErrorCode::invariant_violation);
  }
  SUBCASE("unequal bound point counts carry the lanelet id") {
    const std::string bad =
        "<lanelet id=\"77\"><leftBound><point><x>0</x><y>2</y></point>"
        "<point><x>5</x><y>2</y></point><point><x>9</x><y>2</y></point></leftBound>"
        "<rightBound><point><x>0</x><y>-2</y></point><point><x>9</x><y>-2</y></point>"
        "</rightBound></lanelet>";
    try {
      (void)parse_scenario(wrap(bad));
      FAIL("expected invariant violation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invariant_violation);
      CHECK(std::string(e.what()).find("77") != std::string::npos);
    }
  }
  SUBCASE("dangling successor reference") {
    const std::string bad =
        "<lanelet id=\"1\"><leftBound><point><x>0</x><y>2</y></point>"
        "<point><x>9</x><y>2</y></point></leftBound><rightBound>"
        "<point><x>0</x><y>-2</y></point><point><x>9</x><y>-2</y></point></rightBound>"
        "<successor ref=\"999\"/></lanelet>";
    CHECK(code_of([&] { (void)parse_scenario(wrap(bad)); }) == ErrorCode::invariant_violation);
  }
  SUBCASE("negative velocity") {
    const std::string bad = lanelet +
        "<staticObstacle id=\"5\"><type>car</type><shape><rectangle><length>4</length>"
        "<width>2</width></rectangle></shape><initialState>"
        "<position><point><x>1</x><y>0</y></point></position>"
        "<orientation><exact>0</exact></orientation>"
        "<velocity><exact>-1</exact></velocity></initialState></staticObstacle>";
    CHECK(code_of([&] { (void)parse_scenario(wrap(bad)); }) == ErrorCode::invariant_violation);
  }
  SUBCASE("non-convex polygon shape") {
    const std::string bad = lanelet +
        "<staticObstacle id=\"5\"><type>car</type><shape><polygon>"
        "<point><x>0</x><y>0</y></point><point><x>4</x><y>0</y></point>"
        "<point><x>1</x><y>1</y></point><point><x>0</x><y>4</y></point>"
        "</polygon></shape><initialState>"
        "<position><point><x>1</x><y>0</y></point></position>"
        "<orientation><exact>0</exact></orientation></initialState></staticObstacle>";
    CHECK(code_of([&] { (void)parse_scenario(wrap(bad)); }) == ErrorCode::invariant_violation);
  }
}

TEST_CASE("unknown obstacle type maps to unknown, not a failure") {
  CHECK(obstacle_type_from_string("parkedVehicle") == ObstacleType::unknown);
  CHECK(obstacle_type_from_string("truck") == ObstacleType::truck);
}

TEST_CASE("orientations are normalized to (-pi, pi] on ingestion") {
  const char* doc = R"(<commonRoad commonRoadVersion="2020a" benchmarkID="X" timeStepSize="1">
  <lanelet id="1">
    <leftBound><point><x>0</x><y>2</y></point><point><x>10</x><y>2</y></point></leftBound>
    <rightBound><point><x>0</x><y>-2</y></point><point><x>10</x><y>-2</y></point></rightBound>
  </lanelet>
  <staticObstacle id="2"><type>car</type>
    <shape><rectangle><length>4</length><width>2</width></rectangle></shape>
    <initialState><position><point><x>5</x><y>0</y></point></position>
      <orientation><exact>7.0</exact></orientation>
    </initialState>
  </staticObstacle>
</commonRoad>)";
  const Scenario sc = parse_scenario(doc);
  const double theta = std::get<StaticPose>(sc.obstacles[0].behaviour).state.orientation;
  CHECK(theta == doctest::Approx(7.0 - 2.0 * M_PI).epsilon(1e-12));
  CHECK(theta <= M_PI);
  CHECK(theta > -M_PI);
}

TEST_CASE("normalize_angle maps to (-pi, pi]") {
  CHECK(normalize_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(normalize_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(normalize_angle(3.0 * M_PI) == doctest::Approx(M_PI));
  CHECK(normalize_angle(0.0) == 0.0);
  CHECK(normalize_angle(-0.1) == doctest::Approx(-0.1));
}

TEST_CASE("validate_scenario") {
  Scenario sc = parse_scenario(fixture("straight_one_lanelet.xml"));
  SUBCASE("clean fixture has no diagnostics") { CHECK(validate_scenario(sc).empty()); }
  SUBCASE("dangling successor is diagnosed with the missing id") {
    sc.lanelets[0].successors.push_back(999);
    const auto diags = validate_scenario(sc);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].entity_id == 1);
    CHECK(diags[0].message.find("999") != std::string::npos);
  }
  SUBCASE("repeated trajectory time step is diagnosed") {
    Obstacle o;
    o.id = 50;
    o.type = ObstacleType::car;
    o.shape = RectangleShape{4, 2};
    o.role = ObstacleRole::dynamic_obstacle;
    TrajectoryBehaviour tb;
    tb.states.push_back({0, {0, 0}, 0, 1, 0});
    tb.states.push_back({1, {1, 0}, 0, 1, 0});
    tb.states.push_back({1, {2, 0}, 0, 1, 0});
    o.behaviour = tb;
    sc.obstacles.push_back(o);
    const auto diags = validate_scenario(sc);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].entity_id == 50);
  }
  SUBCASE("duplicate ids are diagnosed") {
    sc.obstacles.push_back(sc.obstacles[0]);
    CHECK(validate_scenario(sc).size() == 1);
  }
}

TEST_CASE("format_double round-trips exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = dist(rng);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
}
