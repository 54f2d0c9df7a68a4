#include "lanepatch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lanepatch {

EvalConfig EvalConfig::standard() {
  EvalConfig cfg;
  cfg.eval_y.reserve(101);
  for (int y = 3; y <= 103; ++y) cfg.eval_y.push_back(static_cast<double>(y));
  return cfg;
}

void EvalConfig::validate() const {
  if (eval_y.size() < 2) throw Error(ErrorCode::InvalidConfig, "eval grid needs >= 2 points");
  if (!(point_match_threshold > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "point_match_threshold must be positive");
  }
  if (!(lane_iou > 0.0 && lane_iou <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "lane_iou must be in (0, 1]");
  }
}

int LaneSamples::covered_count() const {
  int n = 0;
  for (uint8_t c : covered) n += c ? 1 : 0;
  return n;
}

LaneSamples resample_for_eval(const DenseLane& lane, const EvalConfig& cfg) {
  LaneSamples out;
  const size_t n = cfg.eval_y.size();
  out.x.assign(n, 0.0);
  out.z.assign(n, 0.0);
  out.covered.assign(n, 0);
  out.length = lane_length(lane);
  for (size_t i = 0; i < n; ++i) {
    const double y = cfg.eval_y[i];
    if (y < lane.y_min() || y > lane.y_max()) continue;
    auto [x, z] = sample_unbounded(lane, y);
    out.x[i] = x;
    out.z[i] = z;
    out.covered[i] = 1;
  }
  return out;
}

LaneSamples resample_for_eval(const SparseLane& lane, const EvalConfig& cfg) {
  std::vector<Point3> pts;
  for (size_t j = 0; j < lane.vis.size(); ++j) {
    if (lane.vis[j]) pts.push_back(Point3{lane.x[j], lane.y[j], lane.z[j]});
  }
  if (pts.size() < 2) {
    // Degenerate lane: covers nothing, but still occupies a prediction slot.
    LaneSamples out;
    out.x.assign(cfg.eval_y.size(), 0.0);
    out.z.assign(cfg.eval_y.size(), 0.0);
    out.covered.assign(cfg.eval_y.size(), 0);
    out.length = 0.0;
    return out;
  }
  DenseLane dense = DenseLane::create(lane.scene_id, lane.lane_id, lane.category, std::move(pts));
  return resample_for_eval(dense, cfg);
}

PairScore pair_score(const LaneSamples& gt, const LaneSamples& pred, const EvalConfig& cfg) {
  if (gt.covered.size() != pred.covered.size()) {
    throw Error(ErrorCode::DimensionMismatch, "pair_score needs a shared eval grid");
  }
  PairScore score;
  const double thr2 = cfg.point_match_threshold * cfg.point_match_threshold;
  for (size_t i = 0; i < gt.covered.size(); ++i) {
    score.gt_covered += gt.covered[i] ? 1 : 0;
    score.pred_covered += pred.covered[i] ? 1 : 0;
    if (!gt.covered[i] || !pred.covered[i]) continue;
    const double dx = gt.x[i] - pred.x[i];
    const double dz = gt.z[i] - pred.z[i];
    if (dx * dx + dz * dz <= thr2) ++score.matched;
  }
  return score;
}

bool truncation_bound(double length, double loss, double lane_iou) {
  return (length - loss) / length < lane_iou;
}

std::vector<int> solve_assignment_max(const std::vector<std::vector<long long>>& weight,
                                      long long* total_out) {
  const int rows = static_cast<int>(weight.size());
  if (rows == 0) {
    if (total_out) *total_out = 0;
    return {};
  }
  const int cols = static_cast<int>(weight[0].size());
  for (const auto& row : weight) {
    if (static_cast<int>(row.size()) != cols) {
      throw Error(ErrorCode::DimensionMismatch, "assignment matrix rows differ in length");
    }
  }
  // Pad to square with zero-weight cells so rectangles leave extras unassigned.
  const int n = std::max(rows, cols);
  const auto cell = [&](int i, int j) -> long long {
    return (i < rows && j < cols) ? weight[i][j] : 0;
  };
  const long long kInf = std::numeric_limits<long long>::max() / 4;
  // Kuhn-Munkres on negated weights, potentials formulation.
  std::vector<long long> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<long long> minv(n + 1, kInf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = 0;
      long long delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        long long cur = -cell(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> rowsol(rows, -1);
  long long total = 0;
  for (int j = 1; j <= n; ++j) {
    const int i = p[j] - 1;
    if (i < 0 || i >= rows || j - 1 >= cols) continue;
    rowsol[i] = j - 1;
    total += weight[i][j - 1];
  }
  if (total_out) *total_out = total;
  return rowsol;
}

SceneEval evaluate_scene(const std::vector<LaneSamples>& gt,
                         const std::vector<LaneSamples>& pred, const EvalConfig& cfg) {
  cfg.validate();
  SceneEval scene;
  scene.n_gt = static_cast<int>(gt.size());
  scene.n_pred = static_cast<int>(pred.size());
  scene.gt_lanes.resize(gt.size());
  scene.pred_lanes.resize(pred.size());
  for (size_t i = 0; i < gt.size(); ++i) scene.gt_lanes[i].length = gt[i].length;
  for (size_t j = 0; j < pred.size(); ++j) scene.pred_lanes[j].length = pred[j].length;
  if (gt.empty() || pred.empty()) return scene;

  std::vector<std::vector<PairScore>> scores(gt.size(), std::vector<PairScore>(pred.size()));
  std::vector<std::vector<long long>> weight(gt.size(),
                                             std::vector<long long>(pred.size(), 0));
  for (size_t i = 0; i < gt.size(); ++i) {
    for (size_t j = 0; j < pred.size(); ++j) {
      scores[i][j] = pair_score(gt[i], pred[j], cfg);
      weight[i][j] = scores[i][j].matched;
    }
  }
  long long total = 0;
  std::vector<int> rowsol = solve_assignment_max(weight, &total);
  scene.assignment_matched_points = total;

  for (size_t i = 0; i < gt.size(); ++i) {
    const int j = rowsol[i];
    if (j < 0 || j >= static_cast<int>(pred.size())) continue;
    const PairScore& sc = scores[i][j];
    scene.gt_lanes[i].assigned = j;
    scene.pred_lanes[j].assigned = static_cast<int>(i);
    const bool gt_ok = sc.gt_covered > 0 &&
                       static_cast<double>(sc.matched) / sc.gt_covered >= cfg.lane_iou;
    const bool pred_ok = sc.pred_covered > 0 &&
                         static_cast<double>(sc.matched) / sc.pred_covered >= cfg.lane_iou;
    // Each side is scored against its own coverage ratio: a truncated lane
    // fails on the gt side (recall), an over-extended one on the pred side
    // (precision). Only pairs passing both contribute to the error averages.
    if (gt_ok) {
      ++scene.gt_matched;
      scene.gt_lanes[i].matched = true;
    }
    if (pred_ok) {
      ++scene.pred_matched;
      scene.pred_lanes[j].matched = true;
    }
    if (!gt_ok || !pred_ok) continue;
    ++scene.tp;
    // X/Z errors over matched points of this true-positive pair.
    const double thr2 = cfg.point_match_threshold * cfg.point_match_threshold;
    for (size_t k = 0; k < cfg.eval_y.size(); ++k) {
      if (!gt[i].covered[k] || !pred[j].covered[k]) continue;
      const double dx = gt[i].x[k] - pred[j].x[k];
      const double dz = gt[i].z[k] - pred[j].z[k];
      if (dx * dx + dz * dz > thr2) continue;
      if (cfg.eval_y[k] < cfg.near_far_split) {
        scene.x_near_sum += std::abs(dx);
        scene.z_near_sum += std::abs(dz);
        ++scene.near_count;
      } else {
        scene.x_far_sum += std::abs(dx);
        scene.z_far_sum += std::abs(dz);
        ++scene.far_count;
      }
    }
  }
  return scene;
}

SceneEval evaluate_scene(const std::vector<DenseLane>& gt,
                         const std::vector<DenseLane>& pred, const EvalConfig& cfg) {
  std::vector<LaneSamples> gs, ps;
  gs.reserve(gt.size());
  ps.reserve(pred.size());
  for (const auto& l : gt) gs.push_back(resample_for_eval(l, cfg));
  for (const auto& l : pred) ps.push_back(resample_for_eval(l, cfg));
  return evaluate_scene(gs, ps, cfg);
}

double LengthBucketStat::recall() const {
  return gt_total > 0 ? static_cast<double>(gt_matched) / gt_total : 0.0;
}

double LengthBucketStat::precision() const {
  return pred_total > 0 ? static_cast<double>(pred_matched) / pred_total : 0.0;
}

double LengthBucketStat::f1() const {
  const double p = precision(), r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

void EvalAccumulator::set_length_buckets(const std::vector<std::pair<double, double>>& edges) {
  buckets_.clear();
  for (const auto& [lo, hi] : edges) {
    LengthBucketStat b;
    b.lo = lo;
    b.hi = hi;
    buckets_.push_back(b);
  }
}

void EvalAccumulator::add(const SceneEval& scene) {
  total_.tp += scene.tp;
  total_.gt_matched += scene.gt_matched;
  total_.pred_matched += scene.pred_matched;
  total_.n_gt += scene.n_gt;
  total_.n_pred += scene.n_pred;
  total_.assignment_matched_points += scene.assignment_matched_points;
  total_.x_near_sum += scene.x_near_sum;
  total_.x_far_sum += scene.x_far_sum;
  total_.z_near_sum += scene.z_near_sum;
  total_.z_far_sum += scene.z_far_sum;
  total_.near_count += scene.near_count;
  total_.far_count += scene.far_count;
  for (auto& b : buckets_) {
    for (const auto& lane : scene.gt_lanes) {
      if (lane.length >= b.lo && lane.length < b.hi) {
        ++b.gt_total;
        if (lane.matched) ++b.gt_matched;
      }
    }
    for (const auto& lane : scene.pred_lanes) {
      if (lane.length >= b.lo && lane.length < b.hi) {
        ++b.pred_total;
        if (lane.matched) ++b.pred_matched;
      }
    }
  }
}

EvalReport EvalAccumulator::report() const {
  EvalReport r;
  r.tp = total_.tp;
  r.gt_matched = total_.gt_matched;
  r.pred_matched = total_.pred_matched;
  r.n_gt = total_.n_gt;
  r.n_pred = total_.n_pred;
  r.total_matched_points = total_.assignment_matched_points;
  if (total_.n_gt > 0) {
    r.recall = static_cast<double>(total_.gt_matched) / total_.n_gt;
  } else {
    r.recall = 1.0;
    r.flags.push_back("empty_gt");
  }
  if (total_.n_pred > 0) {
    r.precision = static_cast<double>(total_.pred_matched) / total_.n_pred;
  } else {
    r.precision = 1.0;
    r.flags.push_back("empty_pred");
  }
  r.f1_arith = 0.5 * (r.recall + r.precision);
  r.f1_harmonic = r.recall + r.precision > 0.0
                      ? 2.0 * r.recall * r.precision / (r.recall + r.precision)
                      : 0.0;
  r.x_err_near = total_.near_count > 0 ? total_.x_near_sum / total_.near_count : 0.0;
  r.z_err_near = total_.near_count > 0 ? total_.z_near_sum / total_.near_count : 0.0;
  r.x_err_far = total_.far_count > 0 ? total_.x_far_sum / total_.far_count : 0.0;
  r.z_err_far = total_.far_count > 0 ? total_.z_far_sum / total_.far_count : 0.0;
  return r;
}

}  // namespace lanepatch
