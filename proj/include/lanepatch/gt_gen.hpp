#pragma once

#include <string>
#include <vector>

#include "lanepatch/lane.hpp"

namespace lanepatch {

enum class GtMode { Short, Long, PersformerStyle, AnchorLatrStyle, Patched };

GtMode gt_mode_from_string(const std::string& name);
std::string to_string(GtMode mode);

/// Per-grid-point visibility under the given truncation/extension rule.
/// Short/Patched: y_min <= g <= y_max. Long: widened by one grid interval.
/// Persformer/Anchor-LATR style: strict +-5 m comparison.
std::vector<uint8_t> visibility_mask(const DenseLane& lane, const PresetGrid& grid,
                                     GtMode mode);

/// Signed 3-vector deltas from every preset point to the lane's start and end
/// vertices. Invisible points use coordinates extrapolated from the nearest
/// end segment, so any point can act as an endpoint.
std::pair<std::vector<Point3>, std::vector<Point3>> compute_patch_deltas(
    const DenseLane& lane, const PresetGrid& grid, const std::vector<uint8_t>& vis);

/// Sparse training ground truth for one dense lane. Throws NoOverlap when no
/// grid point is visible.
SparseLane generate_training_gt(const DenseLane& lane, const PresetGrid& grid,
                                GtMode mode);

}  // namespace lanepatch
