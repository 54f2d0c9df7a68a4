#include "lanepatch/lane.hpp"

#include <algorithm>
#include <cmath>

namespace lanepatch {

DenseLane DenseLane::create(std::string scene_id, std::string lane_id, int category,
                            std::vector<Point3> points) {
  if (points.size() < 2) {
    throw Error(ErrorCode::InvalidConfig,
                "dense lane needs at least 2 points (" + lane_id + ")");
  }
  for (size_t i = 0; i < points.size(); ++i) {
    const Point3& p = points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw Error(ErrorCode::InvalidConfig, "non-finite coordinate in lane " + lane_id);
    }
    if (i > 0 && !(points[i - 1].y < p.y)) {
      throw Error(ErrorCode::InvalidConfig,
                  "lane y must be strictly increasing (" + lane_id + ")");
    }
  }
  DenseLane lane;
  lane.scene_id = std::move(scene_id);
  lane.lane_id = std::move(lane_id);
  lane.category = category;
  lane.points = std::move(points);
  return lane;
}

double lane_length(const DenseLane& lane) { return lane.y_max() - lane.y_min(); }

namespace {

std::pair<double, double> lerp_on_segment(const Point3& a, const Point3& b, double y) {
  double t = (y - a.y) / (b.y - a.y);
  return {a.x + t * (b.x - a.x), a.z + t * (b.z - a.z)};
}

}  // namespace

std::pair<double, double> interpolate(const DenseLane& lane, double y) {
  if (y < lane.y_min() || y > lane.y_max()) {
    throw Error(ErrorCode::OutOfRange, "query y outside lane extent");
  }
  return sample_unbounded(lane, y);
}

std::pair<double, double> sample_unbounded(const DenseLane& lane, double y) {
  const auto& pts = lane.points;
  if (y <= pts.front().y) return lerp_on_segment(pts[0], pts[1], y);
  if (y >= pts.back().y) {
    return lerp_on_segment(pts[pts.size() - 2], pts[pts.size() - 1], y);
  }
  // Bracketing segment: first vertex with y >= query.
  auto it = std::lower_bound(pts.begin(), pts.end(), y,
                             [](const Point3& p, double v) { return p.y < v; });
  if (it->y == y) return {it->x, it->z};
  return lerp_on_segment(*(it - 1), *it, y);
}

std::vector<double> PresetGrid::y_values() const {
  std::vector<double> ys(m);
  for (int j = 0; j < m; ++j) ys[j] = y_at(j);
  return ys;
}

PresetGrid make_grid(int m, double range_start, double range_end) {
  if (m < 2) throw Error(ErrorCode::InvalidConfig, "grid needs m >= 2");
  if (!(range_end > range_start)) {
    throw Error(ErrorCode::InvalidConfig, "grid range_end must exceed range_start");
  }
  return PresetGrid{m, range_start, range_end};
}

int SparseLane::first_visible() const {
  for (size_t j = 0; j < vis.size(); ++j) {
    if (vis[j]) return static_cast<int>(j);
  }
  return -1;
}

int SparseLane::last_visible() const {
  for (int j = static_cast<int>(vis.size()) - 1; j >= 0; --j) {
    if (vis[j]) return j;
  }
  return -1;
}

int SparseLane::visible_count() const {
  int n = 0;
  for (uint8_t v : vis) n += v ? 1 : 0;
  return n;
}

void SparseLane::repair_visibility() {
  int first = first_visible();
  int last = last_visible();
  for (int j = first; j >= 0 && j <= last; ++j) vis[j] = 1;
}

}  // namespace lanepatch
