#pragma once

#include <vector>

#include "lanepatch/lane.hpp"

namespace lanepatch {

/// Predicted distances from every preset point to the lane's start and end.
struct EpPrediction {
  std::vector<Point3> s_hat;
  std::vector<Point3> e_hat;
};

/// Moves the first visible point by s_hat and the last visible point by e_hat
/// (all three axes). Interior points, visibility, and category are untouched.
/// Lanes with fewer than two visible points pass through unmodified with the
/// single_visible flag set.
SparseLane ep_patch_inference(const SparseLane& pred, const EpPrediction& ep);

/// Mean over M of the summed L1 norms of the start/end residual 3-vectors.
double loss_ep(const EpPrediction& pred, const std::vector<Point3>& s_target,
               const std::vector<Point3>& e_target);

}  // namespace lanepatch
