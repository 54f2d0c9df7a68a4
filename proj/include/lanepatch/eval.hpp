#pragma once

#include <string>
#include <vector>

#include "lanepatch/lane.hpp"

namespace lanepatch {

struct EvalConfig {
  std::vector<double> eval_y;            // default integers 3..103
  double point_match_threshold{1.5};     // meters, x-z plane
  double lane_iou{0.75};
  double near_far_split{40.0};

  static EvalConfig standard();
  void validate() const;
};

struct LaneSamples {
  std::vector<double> x;
  std::vector<double> z;
  std::vector<uint8_t> covered;
  double length{0.0};  // y extent of the source lane

  int covered_count() const;
};

LaneSamples resample_for_eval(const DenseLane& lane, const EvalConfig& cfg);
LaneSamples resample_for_eval(const SparseLane& lane, const EvalConfig& cfg);

struct PairScore {
  int matched{0};
  int gt_covered{0};
  int pred_covered{0};
};

PairScore pair_score(const LaneSamples& gt, const LaneSamples& pred, const EvalConfig& cfg);

/// True iff a lane of this length losing `loss` meters of extent falls below
/// the Lane-IoU threshold, i.e. its ground truth can no longer be matched.
bool truncation_bound(double length, double loss, double lane_iou);

struct LaneOutcome {
  double length{0.0};
  bool matched{false};  // participates in a true-positive pair
  int assigned{-1};     // index on the other side, -1 if unassigned
};

struct SceneEval {
  int tp{0};          // pairs passing the coverage ratio on both sides
  int gt_matched{0};  // gt lanes whose pair passes the gt-side ratio
  int pred_matched{0};  // pred lanes whose pair passes the pred-side ratio
  int n_gt{0};
  int n_pred{0};
  long long assignment_matched_points{0};  // optimal total matched over the assignment
  double x_near_sum{0.0}, x_far_sum{0.0}, z_near_sum{0.0}, z_far_sum{0.0};
  long long near_count{0}, far_count{0};
  std::vector<LaneOutcome> gt_lanes;
  std::vector<LaneOutcome> pred_lanes;
};

SceneEval evaluate_scene(const std::vector<LaneSamples>& gt,
                         const std::vector<LaneSamples>& pred, const EvalConfig& cfg);
SceneEval evaluate_scene(const std::vector<DenseLane>& gt,
                         const std::vector<DenseLane>& pred, const EvalConfig& cfg);

struct EvalReport {
  double recall{0.0};
  double precision{0.0};
  double f1_harmonic{0.0};
  double f1_arith{0.0};
  double x_err_near{0.0}, x_err_far{0.0}, z_err_near{0.0}, z_err_far{0.0};
  long long tp{0}, gt_matched{0}, pred_matched{0}, n_gt{0}, n_pred{0};
  long long total_matched_points{0};
  std::vector<std::string> flags;
};

struct LengthBucketStat {
  double lo{0.0}, hi{0.0};
  long long gt_total{0}, gt_matched{0};
  long long pred_total{0}, pred_matched{0};

  double recall() const;
  double precision() const;
  double f1() const;
};

/// Order-independent scene aggregation: sums of counts, not averages of averages.
class EvalAccumulator {
 public:
  void set_length_buckets(const std::vector<std::pair<double, double>>& edges);
  void add(const SceneEval& scene);
  EvalReport report() const;
  const std::vector<LengthBucketStat>& buckets() const { return buckets_; }

 private:
  SceneEval total_{};
  std::vector<LengthBucketStat> buckets_;
};

/// Maximum-weight square assignment; returns row -> column and the total weight.
std::vector<int> solve_assignment_max(const std::vector<std::vector<long long>>& weight,
                                      long long* total_out);

}  // namespace lanepatch
