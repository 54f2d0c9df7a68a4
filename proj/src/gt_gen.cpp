#include "lanepatch/gt_gen.hpp"

namespace lanepatch {

GtMode gt_mode_from_string(const std::string& name) {
  if (name == "short") return GtMode::Short;
  if (name == "long") return GtMode::Long;
  if (name == "persformer") return GtMode::PersformerStyle;
  if (name == "anchor") return GtMode::AnchorLatrStyle;
  if (name == "patched") return GtMode::Patched;
  throw Error(ErrorCode::InvalidConfig, "unknown gt mode: " + name);
}

std::string to_string(GtMode mode) {
  switch (mode) {
    case GtMode::Short: return "short";
    case GtMode::Long: return "long";
    case GtMode::PersformerStyle: return "persformer";
    case GtMode::AnchorLatrStyle: return "anchor";
    case GtMode::Patched: return "patched";
  }
  return "?";
}

std::vector<uint8_t> visibility_mask(const DenseLane& lane, const PresetGrid& grid,
                                     GtMode mode) {
  const double y_min = lane.y_min();
  const double y_max = lane.y_max();
  std::vector<uint8_t> vis(grid.m, 0);
  for (int j = 0; j < grid.m; ++j) {
    const double g = grid.y_at(j);
    bool v = false;
    switch (mode) {
      case GtMode::Short:
      case GtMode::Patched:
        v = g >= y_min && g <= y_max;
        break;
      case GtMode::Long: {
        const double delta = grid.spacing();
        v = g >= y_min - delta && g <= y_max + delta;
        break;
      }
      case GtMode::PersformerStyle:
      case GtMode::AnchorLatrStyle:
        v = g > y_min - 5.0 && g < y_max + 5.0;
        break;
    }
    vis[j] = v ? 1 : 0;
  }
  return vis;
}

std::pair<std::vector<Point3>, std::vector<Point3>> compute_patch_deltas(
    const DenseLane& lane, const PresetGrid& grid, const std::vector<uint8_t>& vis) {
  bool any = false;
  for (uint8_t v : vis) any = any || v;
  if (!any) throw Error(ErrorCode::NoOverlap, "patch deltas need at least one visible point");

  const Point3& start = lane.points.front();
  const Point3& end = lane.points.back();
  std::vector<Point3> s(grid.m), e(grid.m);
  for (int j = 0; j < grid.m; ++j) {
    const double g = grid.y_at(j);
    auto [x, z] = sample_unbounded(lane, g);
    s[j] = Point3{start.x - x, start.y - g, start.z - z};
    e[j] = Point3{end.x - x, end.y - g, end.z - z};
  }
  return {std::move(s), std::move(e)};
}

SparseLane generate_training_gt(const DenseLane& lane, const PresetGrid& grid,
                                GtMode mode) {
  std::vector<uint8_t> vis = visibility_mask(lane, grid, mode);
  int n_vis = 0;
  for (uint8_t v : vis) n_vis += v ? 1 : 0;
  if (n_vis == 0) {
    throw Error(ErrorCode::NoOverlap, "lane " + lane.lane_id + " has no visible preset point");
  }

  SparseLane out;
  out.scene_id = lane.scene_id;
  out.lane_id = lane.lane_id;
  out.category = lane.category;
  out.grid = grid;
  out.x.assign(grid.m, 0.0);
  out.y = grid.y_values();
  out.z.assign(grid.m, 0.0);
  out.vis = vis;
  out.single_visible = n_vis == 1;
  for (int j = 0; j < grid.m; ++j) {
    if (!vis[j]) continue;
    auto [x, z] = sample_unbounded(lane, grid.y_at(j));
    out.x[j] = x;
    out.z[j] = z;
  }
  if (mode == GtMode::Patched) {
    auto [s, e] = compute_patch_deltas(lane, grid, vis);
    out.s = std::move(s);
    out.e = std::move(e);
  }
  return out;
}

}  // namespace lanepatch
