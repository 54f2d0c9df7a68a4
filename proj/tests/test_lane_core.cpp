#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lanepatch/lane.hpp"

using namespace lanepatch;

namespace {

DenseLane straight(double x, double z, double y0, double y1) {
  return DenseLane::create("s", "l", 1, {{x, y0, z}, {x, y1, z}});
}

}  // namespace

TEST_CASE("interpolate basics") {
  auto lane = straight(1.0, 0.0, 3.0, 103.0);
  auto [x, z] = interpolate(lane, 50.0);
  CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(z == doctest::Approx(0.0).epsilon(1e-12));

  auto seg = DenseLane::create("s", "l", 1, {{0, 10, 0}, {2, 30, 1}});
  auto [mx, mz] = interpolate(seg, 20.0);
  CHECK(mx == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mz == doctest::Approx(0.5).epsilon(1e-12));

  auto pw = DenseLane::create("s", "l", 1, {{0, 0, 0}, {1, 10, 0}, {3, 20, 0}});
  auto [px, pz] = interpolate(pw, 15.0);
  CHECK(px == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pz == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("interpolate rejects queries outside extent") {
  auto lane = straight(0.0, 0.0, 10.0, 30.0);
  CHECK_THROWS_AS(interpolate(lane, 9.999), Error);
  CHECK_THROWS_AS(interpolate(lane, 30.001), Error);
  CHECK_NOTHROW(interpolate(lane, 10.0));
  CHECK_NOTHROW(interpolate(lane, 30.0));
}

TEST_CASE("interpolate exact at every vertex") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point3> pts;
    double y = u(rng);
    const int n = 2 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      pts.push_back({u(rng), y, u(rng)});
      y += 0.1 + std::abs(u(rng));
    }
    auto lane = DenseLane::create("s", "l", 0, pts);
    for (const auto& p : pts) {
      auto [x, z] = interpolate(lane, p.y);
      CHECK(std::abs(x - p.x) <= 1e-12 * std::max(1.0, std::abs(p.x)));
      CHECK(std::abs(z - p.z) <= 1e-12 * std::max(1.0, std::abs(p.z)));
    }
  }
}

TEST_CASE("interpolate stays within bracketing vertices for monotone x") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point3> pts;
  double x = 0.0, y = 0.0;
  for (int i = 0; i < 10; ++i) {
    pts.push_back({x, y, 0.0});
    x += u(rng);
    y += 0.5 + u(rng);
  }
  auto lane = DenseLane::create("s", "l", 0, pts);
  for (int i = 0; i + 1 < static_cast<int>(pts.size()); ++i) {
    for (int k = 1; k < 5; ++k) {
      const double q = pts[i].y + (pts[i + 1].y - pts[i].y) * k / 5.0;
      auto [ix, iz] = interpolate(lane, q);
      CHECK(ix >= pts[i].x - 1e-12);
      CHECK(ix <= pts[i + 1].x + 1e-12);
      (void)iz;
    }
  }
}

TEST_CASE("DenseLane validation") {
  CHECK_THROWS_AS(DenseLane::create("s", "l", 0, {{0, 1, 0}}), Error);
  CHECK_THROWS_AS(DenseLane::create("s", "l", 0, {{0, 2, 0}, {0, 1, 0}}), Error);
  CHECK_THROWS_AS(DenseLane::create("s", "l", 0, {{0, 1, 0}, {0, 1, 0}}), Error);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(DenseLane::create("s", "l", 0, {{0, 1, 0}, {0, nan, 0}}), Error);
}

TEST_CASE("lane_length is the y extent") {
  CHECK(lane_length(straight(0, 0, 10, 30)) == doctest::Approx(20.0));
  CHECK(lane_length(straight(0, 0, 3, 103)) == doctest::Approx(100.0));
  CHECK(lane_length(straight(0, 0, 12.5, 47.25)) == doctest::Approx(34.75));
}

TEST_CASE("make_grid endpoints and spacing") {
  auto g = make_grid(20, 3, 103);
  CHECK(g.spacing() == doctest::Approx(100.0 / 19.0).epsilon(1e-15));
  CHECK(g.y_at(0) == 3.0);
  CHECK(g.y_at(19) == 103.0);

  auto g2 = make_grid(2, 0, 1);
  CHECK(g2.y_values() == std::vector<double>{0.0, 1.0});

  auto g10 = make_grid(10, 3, 103);
  CHECK(g10.spacing() == doctest::Approx(100.0 / 9.0).epsilon(1e-15));

  CHECK_THROWS_AS(make_grid(1, 3, 103), Error);
  CHECK_THROWS_AS(make_grid(10, 103, 3), Error);
}

TEST_CASE("make_grid spacing exact for M in 2..100") {
  for (int m = 2; m <= 100; ++m) {
    auto g = make_grid(m, 3, 103);
    CHECK(g.spacing() == 100.0 / (m - 1));
    CHECK(g.y_values().size() == static_cast<size_t>(m));
    CHECK(g.y_values().back() == 103.0);
  }
}

TEST_CASE("sample_unbounded extrapolates from end segments") {
  auto lane = DenseLane::create("s", "l", 0, {{0, 10, 0}, {1, 20, 0.5}, {1, 30, 0.5}});
  auto [x0, z0] = sample_unbounded(lane, 0.0);   // before: slope of first segment
  CHECK(x0 == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(z0 == doctest::Approx(-0.5).epsilon(1e-12));
  auto [x1, z1] = sample_unbounded(lane, 40.0);  // after: flat last segment
  CHECK(x1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(z1 == doctest::Approx(0.5).epsilon(1e-12));
  auto [xm, zm] = sample_unbounded(lane, 15.0);  // inside: same as interpolate
  CHECK(xm == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(zm == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("SparseLane visibility helpers") {
  SparseLane lane;
  lane.grid = make_grid(6, 0, 5);
  lane.x.assign(6, 0.0);
  lane.y = lane.grid.y_values();
  lane.z.assign(6, 0.0);
  lane.vis = {0, 1, 0, 1, 1, 0};
  CHECK(lane.first_visible() == 1);
  CHECK(lane.last_visible() == 4);
  CHECK(lane.visible_count() == 3);
  lane.repair_visibility();
  CHECK(lane.vis == std::vector<uint8_t>{0, 1, 1, 1, 1, 0});
  CHECK(lane.visible_count() == 4);
}
