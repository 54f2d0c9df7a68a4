#include "lanepatch/ep_post.hpp"

#include <cmath>

namespace lanepatch {

SparseLane ep_patch_inference(const SparseLane& pred, const EpPrediction& ep) {
  const size_t m = pred.vis.size();
  if (ep.s_hat.size() != m || ep.e_hat.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "ep prediction length differs from lane M");
  }
  SparseLane out = pred;
  if (pred.visible_count() < 2) {
    out.single_visible = true;
    return out;
  }
  const int first = pred.first_visible();
  const int last = pred.last_visible();
  out.x[first] += ep.s_hat[first].x;
  out.y[first] += ep.s_hat[first].y;
  out.z[first] += ep.s_hat[first].z;
  out.x[last] += ep.e_hat[last].x;
  out.y[last] += ep.e_hat[last].y;
  out.z[last] += ep.e_hat[last].z;
  return out;
}

double loss_ep(const EpPrediction& pred, const std::vector<Point3>& s_target,
               const std::vector<Point3>& e_target) {
  const size_t m = pred.s_hat.size();
  if (pred.e_hat.size() != m || s_target.size() != m || e_target.size() != m || m == 0) {
    throw Error(ErrorCode::DimensionMismatch, "loss_ep operands must share M >= 1");
  }
  double sum = 0.0;
  for (size_t j = 0; j < m; ++j) {
    sum += std::abs(pred.s_hat[j].x - s_target[j].x) +
           std::abs(pred.s_hat[j].y - s_target[j].y) +
           std::abs(pred.s_hat[j].z - s_target[j].z);
    sum += std::abs(pred.e_hat[j].x - e_target[j].x) +
           std::abs(pred.e_hat[j].y - e_target[j].y) +
           std::abs(pred.e_hat[j].z - e_target[j].z);
  }
  return sum / static_cast<double>(m);
}

}  // namespace lanepatch
