#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"
#include "topomap/scenario.hpp"
#include "topomap/scenario_file.hpp"

using namespace topomap;
using topomap::fixtures::arena;
using topomap::fixtures::box;

namespace {

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(),
                     [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Validate, ArenaWithTwoBoxesIsValid) {
  const auto c = arena({box(5, 3, 9, 7), box(21, 3, 25, 7)});
  EXPECT_TRUE(validate(c).empty());
}

TEST(Validate, NoObstaclesIsValid) { EXPECT_TRUE(validate(arena()).empty()); }

TEST(Validate, ShortSweepIsOneCoverageViolation) {
  auto c = arena();
  c.windows.total_time = 1000.0;
  c.windows.overlap = 10.0;
  const auto v = validate(c);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("coverage"), std::string::npos);
}

TEST(Validate, MalformedGeometryIsReportedNotThrown) {
  auto c = arena({Obstacle{{{5, 5}, {6, 5}}},                       // two vertices
                  Obstacle{{{10, 2}, {12, 4}, {12, 2}, {10, 4}}},   // bow tie
                  Obstacle{{{15, 5}, {16, 5}, {17, 5}}},            // zero area
                  box(20, 1, 22, 3), box(21, 2, 23, 4),             // overlapping
                  box(-1, 1, 2, 2)});                               // outside
  std::vector<std::string> v;
  ASSERT_NO_THROW(v = validate(c));
  EXPECT_TRUE(mentions(v, "obstacle 1: needs at least 3 vertices"));
  EXPECT_TRUE(mentions(v, "obstacle 2: edges self-intersect"));
  EXPECT_TRUE(mentions(v, "obstacle 3: zero area"));
  EXPECT_TRUE(mentions(v, "obstacle 5: overlaps obstacle 4"));
  EXPECT_TRUE(mentions(v, "obstacle 6: not strictly inside"));
}

TEST(Validate, ParameterInvariants) {
  auto c = arena();
  c.agents.speed = 0.004;
  c.windows.overlap = 1350.0;  // == T/N
  c.leader.velocity = {0.005, 0.005};
  const auto v = validate(c);
  EXPECT_TRUE(mentions(v, "speed must exceed the leader speed"));
  EXPECT_TRUE(mentions(v, "overlap must satisfy"));
  EXPECT_TRUE(mentions(v, "axis-aligned"));
}

TEST(Validate, LeaderLeavingTheArena) {
  auto c = arena();
  c.windows.total_time = 6000.0;
  EXPECT_TRUE(mentions(validate(c), "path leaves the environment"));
}

TEST(Leader, Position) {
  const auto c = arena();
  EXPECT_EQ(leader_position(c, 0.0), (Vec2{1.5, 5.0}));
  const Vec2 p = leader_position(c, 100.0);
  EXPECT_DOUBLE_EQ(p.x, 2.0);
  EXPECT_DOUBLE_EQ(p.y, 5.0);
  EXPECT_NEAR(leader_position(c, 160.0).x - leader_position(c, 100.0).x, 0.3, 1e-12);
  EXPECT_THROW(leader_position(c, -0.1), std::out_of_range);
  EXPECT_THROW(leader_position(c, 5400.1), std::out_of_range);
}

TEST(Coverage, LeaderIsCoveredAlways) {
  const auto c = arena();
  for (double t = 0.0; t <= 5400.0; t += 37.5) {
    EXPECT_TRUE(in_coverage(c, leader_position(c, t), t)) << t;
  }
}

TEST(Coverage, SlabBoundary) {
  const auto c = arena();
  const double t = 1000.0;
  const Vec2 x = leader_position(c, t);
  EXPECT_TRUE(in_coverage(c, x + Vec2{1.4, 0.0}, t));
  EXPECT_TRUE(in_coverage(c, x + Vec2{-1.4, 4.9}, t));
  EXPECT_FALSE(in_coverage(c, x + Vec2{1.5 + 1e-9, 0.0}, t));
  EXPECT_FALSE(in_coverage(c, x + Vec2{-1.5 - 1e-9, 0.0}, t));
}

TEST(LocalDomain, StationaryLeaderGivesIdenticalDomains) {
  auto c = arena();
  c.environment.width = 3.0;
  c.leader.velocity = {1e-12, 0.0};
  for (std::size_t i = 1; i <= 4; ++i) {
    const Rect d = local_domain(c, i);
    const Rect at = coverage_rect(c, WindowGrid(c.windows).boundary(i));
    EXPECT_NEAR(d.x_min, at.x_min, 1e-6);
    EXPECT_NEAR(d.x_max, at.x_max, 1e-6);
  }
}

TEST(LocalDomain, LengthIsCoveragePlusSweep) {
  auto c = arena();
  c.windows = {60.0, 4, 4.0};
  c.leader.start = {10.0, 5.0};
  // W_2 = [13, 32], |W_2| = 19 s.
  const Rect d = local_domain(c, 2);
  EXPECT_NEAR(d.x_max - d.x_min, 3.0 + 0.005 * 19.0, 1e-12);
  EXPECT_DOUBLE_EQ(d.y_min, 0.0);
  EXPECT_DOUBLE_EQ(d.y_max, 10.0);
}

TEST(LocalDomain, UnionCoversArenaAndNeighborsOverlap) {
  for (std::size_t n : {4u, 6u, 5u}) {
    auto c = arena();
    c.windows.count = n;
    double lo = 1e9, hi = -1e9;
    for (std::size_t i = 1; i <= n; ++i) {
      const Rect d = local_domain(c, i);
      lo = std::min(lo, d.x_min);
      hi = std::max(hi, d.x_max);
      if (i < n) {
        EXPECT_GT(d.x_max, local_domain(c, i + 1).x_min);
      }
    }
    EXPECT_LE(lo, 0.0);
    EXPECT_GE(hi, 30.0);
  }
}

TEST(Windows, GridArithmetic) {
  const WindowGrid g(60.0, 4, 4.0);
  EXPECT_DOUBLE_EQ(g.boundary(1), 15.0);
  EXPECT_DOUBLE_EQ(g.boundary(2), 30.0);
  EXPECT_DOUBLE_EQ(g.boundary(3), 45.0);
  EXPECT_EQ(g.window(1), (Interval{0.0, 17.0}));
  EXPECT_EQ(g.window(4), (Interval{43.0, 60.0}));
  EXPECT_THROW((void)g.window(0), std::out_of_range);
  EXPECT_THROW((void)g.window(5), std::out_of_range);
}

TEST(Windows, UnionIsWholeRunAndOverlapIsExact) {
  for (auto [T, N, dt] : {std::tuple{60.0, 4u, 4.0}, {5400.0, 6u, 60.0}, {1000.0, 5u, 0.0}}) {
    const WindowGrid g(T, N, dt);
    EXPECT_DOUBLE_EQ(g.window(1).begin, 0.0);
    EXPECT_DOUBLE_EQ(g.window(N).end, T);
    for (std::size_t i = 1; i < N; ++i) {
      const Interval a = g.window(i), b = g.window(i + 1);
      EXPECT_NEAR(a.end - b.begin, dt, 1e-9);
    }
  }
}

TEST(ScenarioFile, ParsesAllSections) {
  const auto c = parse_scenario(R"(# comment
name = demo
[environment]
width = 6
height = 2
obstacle = 1 0.5, 2 0.5, 2 1.5, 1 1.5
[leader]
start = 0.5 1
velocity = 0.005 0
coverage_length = 1
[agents]
count = 12
detection_radius = 0.05
[windows]
total_time = 1000
count = 4
overlap = 20
[tda]
cluster_cutoff = 40
static_zeroing = strict
)");
  EXPECT_EQ(c.name, "demo");
  ASSERT_EQ(c.environment.obstacles.size(), 1u);
  EXPECT_EQ(c.environment.obstacles[0].polygon[2], (Vec2{2, 1.5}));
  EXPECT_EQ(c.agents.count, 12u);
  EXPECT_DOUBLE_EQ(c.mapping.cluster_cutoff, 40.0);
  EXPECT_EQ(c.mapping.static_zeroing, StaticZeroing::Strict);
  EXPECT_TRUE(validate(c).empty());
}

TEST(ScenarioFile, RejectsUnknownKeysAndBadNumbers) {
  EXPECT_THROW(parse_scenario("[agents]\ncolour = red\n"), ScenarioParseError);
  EXPECT_THROW(parse_scenario("[nowhere]\n"), ScenarioParseError);
  EXPECT_THROW(parse_scenario("[agents]\nspeed = fast\n"), ScenarioParseError);
}

TEST(ScenarioFile, BundledScenariosAreValid) {
  for (const char* name : {"scenario1", "scenario2", "scenario3", "scaled_scenario1",
                           "scaled_scenario2", "scaled_null"}) {
    const auto c = load_scenario(std::string(TOPOMAP_SCENARIO_DIR) + "/" + name + ".ini");
    EXPECT_TRUE(validate(c).empty()) << name;
  }
}
