#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lanepatch/error.hpp"

namespace lanepatch {

struct Point3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};
};

/// Dense annotated polyline, ordered by strictly increasing y.
struct DenseLane {
  std::string scene_id;
  std::string lane_id;
  int category{0};
  std::vector<Point3> points;

  double y_min() const { return points.front().y; }
  double y_max() const { return points.back().y; }

  /// Validates the invariants (>= 2 points, strictly increasing finite y).
  /// Non-monotone input is rejected, never silently sorted.
  static DenseLane create(std::string scene_id, std::string lane_id, int category,
                          std::vector<Point3> points);
};

/// Longitudinal extent (y_max - y_min) in meters.
double lane_length(const DenseLane& lane);

/// Linear interpolation at y inside the lane extent. Throws OutOfRange otherwise.
std::pair<double, double> interpolate(const DenseLane& lane, double y);

/// Like interpolate, but outside the extent extrapolates linearly from the
/// nearest end segment.
std::pair<double, double> sample_unbounded(const DenseLane& lane, double y);

/// M uniformly spaced y values over [range_start, range_end], both inclusive.
struct PresetGrid {
  int m{0};
  double range_start{0.0};
  double range_end{0.0};

  double spacing() const { return (range_end - range_start) / (m - 1); }
  double y_at(int j) const {
    if (j == m - 1) return range_end;
    return range_start + spacing() * j;
  }
  std::vector<double> y_values() const;
};

PresetGrid make_grid(int m, double range_start, double range_end);

/// Sparse training representation: M preset points with visibility and
/// optional per-point endpoint patch deltas. `y` starts as the grid values
/// and may deviate at patched endpoints.
struct SparseLane {
  std::string scene_id;
  std::string lane_id;
  int category{0};
  PresetGrid grid;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;
  std::vector<uint8_t> vis;
  std::optional<std::vector<Point3>> s;
  std::optional<std::vector<Point3>> e;
  bool single_visible{false};

  int first_visible() const;
  int last_visible() const;
  int visible_count() const;

  /// Externally loaded predictions may have holes in vis; repair by marking
  /// the whole first-to-last visible span visible.
  void repair_visibility();
};

}  // namespace lanepatch
