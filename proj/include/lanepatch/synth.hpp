#pragma once

#include <cstdint>
#include <vector>

#include "lanepatch/lane.hpp"

namespace lanepatch {

/// One mixture component of the lane-length distribution: lengths are drawn
/// uniformly from [draw_lo, draw_hi] with probability prob.
struct LengthBucket {
  double draw_lo{0.0};
  double draw_hi{0.0};
  double prob{0.0};
};

struct SynthConfig {
  uint64_t seed{0};
  int scenes{1};
  int lanes_min{4};
  int lanes_max{6};
  std::vector<LengthBucket> length_hist;
  double range_start{3.0};
  double range_end{103.0};
  // Lanes either attach near the range start (ego-adjacent) or begin mid-range.
  double anchor_prob_short{0.9};
  double anchor_prob_long{0.45};
  double anchor_length_split{25.0};
  double anchor_y_min{1.5};
  double anchor_y_max{3.0};
  double mid_start_max{60.0};
  double curvature_max{0.004};   // 1/m, |x''(y)|
  double tangent_max{0.1};
  double lateral_spacing{3.5};
  double z_slope_max{0.03};
  double dense_step{0.5};

  void validate() const;
  static SynthConfig openlane_like(uint64_t seed, int scenes);
  static SynthConfig apollosim_like(uint64_t seed, int scenes);
};

/// Deterministic scene set; the per-scene RNG stream depends only on
/// (seed, scene index) so scene order and parallelism cannot change output.
std::vector<DenseLane> generate_scene_set(const SynthConfig& cfg);

/// Fraction of lanes per [lo, hi) bucket; fractions sum to 1.
std::vector<double> length_histogram(const std::vector<DenseLane>& lanes,
                                     const std::vector<std::pair<double, double>>& buckets);

/// SplitMix64; used to derive independent sub-seeds.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

}  // namespace lanepatch
