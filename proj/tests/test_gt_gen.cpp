#include <doctest.h>

#include <cmath>
#include <random>

#include "lanepatch/gt_gen.hpp"

using namespace lanepatch;

namespace {

DenseLane straight(double x, double z, double y0, double y1) {
  return DenseLane::create("s", "l", 1, {{x, y0, z}, {x, y1, z}});
}

std::vector<int> visible_indices(const std::vector<uint8_t>& vis) {
  std::vector<int> idx;
  for (int j = 0; j < static_cast<int>(vis.size()); ++j) {
    if (vis[j]) idx.push_back(j);
  }
  return idx;
}

DenseLane random_lane(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> start(0.0, 80.0);
  std::uniform_real_distribution<double> len(4.0, 90.0);
  std::uniform_real_distribution<double> off(-8.0, 8.0);
  const double y0 = start(rng);
  const double y1 = y0 + len(rng);
  const double x = off(rng);
  std::vector<Point3> pts;
  for (double y = y0; y < y1; y += 1.0) pts.push_back({x + 0.01 * y, y, 0.002 * y});
  pts.push_back({x + 0.01 * y1, y1, 0.002 * y1});
  return DenseLane::create("s", "l", 0, pts);
}

}  // namespace

TEST_CASE("mode name round trip") {
  for (const char* name : {"short", "long", "persformer", "anchor", "patched"}) {
    CHECK(to_string(gt_mode_from_string(name)) == name);
  }
  CHECK_THROWS_AS(gt_mode_from_string("bogus"), Error);
}

TEST_CASE("visibility masks for a 10..30 lane on the 20-point grid") {
  auto lane = straight(1.0, 0.0, 10.0, 30.0);
  auto grid = make_grid(20, 3, 103);

  CHECK(visible_indices(visibility_mask(lane, grid, GtMode::Short)) ==
        std::vector<int>{2, 3, 4, 5});
  CHECK(visible_indices(visibility_mask(lane, grid, GtMode::Patched)) ==
        std::vector<int>{2, 3, 4, 5});
  CHECK(visible_indices(visibility_mask(lane, grid, GtMode::Long)) ==
        std::vector<int>{1, 2, 3, 4, 5, 6});
  // +-5 m reaches one extra grid point on each side here too.
  CHECK(visible_indices(visibility_mask(lane, grid, GtMode::PersformerStyle)) ==
        std::vector<int>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("full-range lane is fully visible in every mode") {
  auto lane = straight(1.0, 0.0, 3.0, 103.0);
  auto grid = make_grid(20, 3, 103);
  for (auto mode : {GtMode::Short, GtMode::Long, GtMode::PersformerStyle,
                    GtMode::AnchorLatrStyle, GtMode::Patched}) {
    auto vis = visibility_mask(lane, grid, mode);
    CHECK(visible_indices(vis).size() == 20);
  }
}

TEST_CASE("persformer-style comparison is strict at exactly 5 m") {
  // Grid point at y=3; a lane starting at y=8 puts the point exactly at
  // y_min - 5, which the strict > comparison must exclude.
  auto lane = straight(0.0, 0.0, 8.0, 40.0);
  auto grid = make_grid(20, 3, 103);
  auto vis = visibility_mask(lane, grid, GtMode::PersformerStyle);
  CHECK(vis[0] == 0);
}

TEST_CASE("short-mode gt truncates the lane") {
  auto lane = straight(1.0, 0.0, 10.0, 30.0);
  auto grid = make_grid(20, 3, 103);
  auto gt = generate_training_gt(lane, grid, GtMode::Short);
  CHECK(gt.visible_count() == 4);
  CHECK(gt.y[gt.first_visible()] == doctest::Approx(3.0 + 2 * 100.0 / 19.0).epsilon(1e-12));
  CHECK(gt.y[gt.last_visible()] == doctest::Approx(3.0 + 5 * 100.0 / 19.0).epsilon(1e-12));
  const double extent = gt.y[gt.last_visible()] - gt.y[gt.first_visible()];
  CHECK(extent < lane_length(lane));
  CHECK(extent == doctest::Approx(300.0 / 19.0).epsilon(1e-12));
  CHECK_FALSE(gt.s.has_value());
  CHECK_FALSE(gt.e.has_value());
}

TEST_CASE("patched-mode gt stores endpoint deltas for every preset point") {
  auto lane = straight(1.0, 0.0, 10.0, 30.0);
  auto grid = make_grid(20, 3, 103);
  auto gt = generate_training_gt(lane, grid, GtMode::Patched);
  REQUIRE(gt.s.has_value());
  REQUIRE(gt.e.has_value());
  CHECK(gt.s->size() == 20);
  CHECK(gt.e->size() == 20);
  CHECK((*gt.s)[2].y == doctest::Approx(10.0 - (3.0 + 2 * 100.0 / 19.0)).epsilon(1e-12));
  CHECK((*gt.s)[2].y == doctest::Approx(-3.5263).epsilon(1e-4));
  CHECK((*gt.e)[5].y == doctest::Approx(30.0 - (3.0 + 5 * 100.0 / 19.0)).epsilon(1e-12));
  CHECK((*gt.e)[5].y == doctest::Approx(0.6842).epsilon(1e-4));
  CHECK((*gt.s)[2].x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((*gt.e)[5].z == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("patch deltas on a sloped lane follow the slope") {
  auto lane = DenseLane::create("s", "l", 0, {{1.0, 10.0, 0.0}, {3.0, 30.0, 0.0}});
  auto grid = make_grid(20, 3, 103);
  auto vis = visibility_mask(lane, grid, GtMode::Short);
  auto [s, e] = compute_patch_deltas(lane, grid, vis);
  // x = 0.1*y slope, so s_x at j=2 is 0.1*(10 - 13.5263...).
  CHECK(s[2].x == doctest::Approx(0.1 * (10.0 - (3.0 + 2 * 100.0 / 19.0))).epsilon(1e-12));
  CHECK(s[2].x == doctest::Approx(-0.35263).epsilon(1e-4));
}

TEST_CASE("endpoints aligned to grid points give zero deltas there") {
  auto grid = make_grid(21, 3, 103);  // spacing 5, grid hits 8 and 53
  auto lane = straight(2.0, 0.1, 8.0, 53.0);
  auto gt = generate_training_gt(lane, grid, GtMode::Patched);
  const int f = gt.first_visible();
  const int l = gt.last_visible();
  CHECK(std::abs((*gt.s)[f].x) <= 1e-9);
  CHECK(std::abs((*gt.s)[f].y) <= 1e-9);
  CHECK(std::abs((*gt.s)[f].z) <= 1e-9);
  CHECK(std::abs((*gt.e)[l].x) <= 1e-9);
  CHECK(std::abs((*gt.e)[l].y) <= 1e-9);
  CHECK(std::abs((*gt.e)[l].z) <= 1e-9);
}

TEST_CASE("no overlap with the grid range is an error") {
  auto grid = make_grid(20, 3, 103);
  CHECK_THROWS_AS(generate_training_gt(straight(0, 0, 110.0, 130.0), grid, GtMode::Short),
                  Error);
  // gen-gt on a lane that only clips the range start still works.
  CHECK_NOTHROW(generate_training_gt(straight(0, 0, 1.0, 4.0), grid, GtMode::Short));
}

TEST_CASE("single visible point is flagged, not dropped") {
  auto grid = make_grid(20, 3, 103);
  auto lane = straight(0, 0, 13.0, 14.0);  // brackets only grid point 13.526
  auto gt = generate_training_gt(lane, grid, GtMode::Short);
  CHECK(gt.visible_count() == 1);
  CHECK(gt.single_visible);
}

TEST_CASE("short extent is contained, long extent contains") {
  std::mt19937_64 rng(123);
  auto grid = make_grid(20, 3, 103);
  for (int trial = 0; trial < 200; ++trial) {
    auto lane = random_lane(rng);
    auto vshort = visibility_mask(lane, grid, GtMode::Short);
    auto vlong = visibility_mask(lane, grid, GtMode::Long);
    int nshort = 0, nlong = 0;
    for (int j = 0; j < grid.m; ++j) {
      if (vshort[j]) {
        ++nshort;
        CHECK(vlong[j]);  // Long is a superset of Short
        CHECK(grid.y_at(j) >= lane.y_min() - 1e-12);
        CHECK(grid.y_at(j) <= lane.y_max() + 1e-12);
      }
      if (vlong[j]) ++nlong;
    }
    CHECK(nlong >= nshort);
    CHECK(nlong - nshort <= 2);
    if (nshort > 0) {
      auto gt = generate_training_gt(lane, grid, GtMode::Long);
      // Long-mode extent covers the lane extent clipped to the grid range.
      const double lo = std::max(lane.y_min(), grid.range_start);
      const double hi = std::min(lane.y_max(), grid.range_end);
      CHECK(gt.y[gt.first_visible()] <= lo + grid.spacing() + 1e-9);
      CHECK(gt.y[gt.last_visible()] >= hi - grid.spacing() - 1e-9);
    }
  }
}

TEST_CASE("all modes agree on a lane spanning the whole range") {
  auto lane = DenseLane::create("s", "l", 0, {{0.5, 2.0, 0.0}, {1.5, 50.0, 0.3},
                                              {2.0, 104.0, 0.6}});
  auto grid = make_grid(20, 3, 103);
  auto ref = generate_training_gt(lane, grid, GtMode::Short);
  for (auto mode : {GtMode::Long, GtMode::PersformerStyle, GtMode::AnchorLatrStyle,
                    GtMode::Patched}) {
    auto gt = generate_training_gt(lane, grid, mode);
    CHECK(gt.vis == ref.vis);
    for (int j = 0; j < grid.m; ++j) {
      CHECK(gt.x[j] == doctest::Approx(ref.x[j]).epsilon(1e-12));
      CHECK(gt.z[j] == doctest::Approx(ref.z[j]).epsilon(1e-12));
    }
  }
}
