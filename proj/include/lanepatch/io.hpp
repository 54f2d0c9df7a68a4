#pragma once

#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "lanepatch/ep_post.hpp"
#include "lanepatch/lane.hpp"

namespace lanepatch {

using AnyLane = std::variant<DenseLane, SparseLane>;

/// A sparse prediction record may ship EP-head outputs next to the lane.
struct PredRecord {
  AnyLane lane;
  std::optional<EpPrediction> ep;
};

std::vector<DenseLane> read_dense_lanes(const std::string& path);
std::vector<PredRecord> read_lane_records(const std::string& path);

void write_dense_lanes(const std::string& path, const std::vector<DenseLane>& lanes);
void write_sparse_lanes(const std::string& path, const std::vector<SparseLane>& lanes);

std::string dense_lane_to_json(const DenseLane& lane);
std::string sparse_lane_to_json(const SparseLane& lane);

/// Write-temp-then-rename.
void atomic_write(const std::string& path, const std::string& content);

/// Groups lanes by scene_id in first-appearance order.
template <typename Lane>
std::vector<std::pair<std::string, std::vector<const Lane*>>> group_by_scene(
    const std::vector<Lane>& lanes) {
  std::vector<std::pair<std::string, std::vector<const Lane*>>> groups;
  std::unordered_map<std::string, size_t> index;
  for (const auto& lane : lanes) {
    auto [it, inserted] = index.try_emplace(lane.scene_id, groups.size());
    if (inserted) groups.push_back({lane.scene_id, {}});
    groups[it->second].second.push_back(&lane);
  }
  return groups;
}

}  // namespace lanepatch
