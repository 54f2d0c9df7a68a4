#include "lanepatch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lanepatch {

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

void SynthConfig::validate() const {
  if (scenes < 1 || lanes_min < 1 || lanes_max < lanes_min) {
    throw Error(ErrorCode::InvalidConfig, "bad scene/lane counts");
  }
  if (length_hist.empty()) throw Error(ErrorCode::InvalidConfig, "length_hist is empty");
  double total = 0.0;
  for (const auto& b : length_hist) {
    if (b.prob < 0.0 || b.draw_hi < b.draw_lo || b.draw_lo < 0.0 || b.draw_hi > 100.0) {
      throw Error(ErrorCode::InvalidConfig, "bad length bucket");
    }
    total += b.prob;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidConfig, "length_hist probabilities must sum to 1");
  }
  if (!(range_end > range_start) || dense_step <= 0.0) {
    throw Error(ErrorCode::InvalidConfig, "bad range or dense_step");
  }
}

SynthConfig SynthConfig::openlane_like(uint64_t seed, int scenes) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.scenes = scenes;
  // ~40% of lanes below 20 m and ~70% below 40 m. Lengths between 10 and
  // 14.5 m are avoided: with 10 preset points they usually straddle a single
  // grid interval and degenerate to one visible point.
  cfg.length_hist = {
      {6.0, 10.0, 0.005}, {14.5, 20.0, 0.395}, {20.0, 30.0, 0.15}, {30.0, 40.0, 0.15},
      {40.0, 50.0, 0.08}, {50.0, 60.0, 0.07},  {60.0, 70.0, 0.06}, {70.0, 80.0, 0.05},
      {80.0, 90.0, 0.04},
  };
  return cfg;
}

SynthConfig SynthConfig::apollosim_like(uint64_t seed, int scenes) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.scenes = scenes;
  // ~20% of lanes below 40 m.
  cfg.length_hist = {
      {6.0, 10.0, 0.01},  {14.5, 20.0, 0.04}, {20.0, 30.0, 0.07}, {30.0, 40.0, 0.08},
      {40.0, 50.0, 0.12}, {50.0, 60.0, 0.14}, {60.0, 70.0, 0.16}, {70.0, 80.0, 0.16},
      {80.0, 90.0, 0.16}, {90.0, 100.0, 0.06},
  };
  return cfg;
}

namespace {

double draw_length(const SynthConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  for (const auto& b : cfg.length_hist) {
    if (u < b.prob || &b == &cfg.length_hist.back()) {
      std::uniform_real_distribution<double> len(b.draw_lo, b.draw_hi);
      return len(rng);
    }
    u -= b.prob;
  }
  return cfg.length_hist.back().draw_hi;
}

}  // namespace

std::vector<DenseLane> generate_scene_set(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<DenseLane> lanes;
  for (int s = 0; s < cfg.scenes; ++s) {
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<uint64_t>(s)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> n_lanes_dist(cfg.lanes_min, cfg.lanes_max);
    const int n_lanes = n_lanes_dist(rng);

    char scene_name[32];
    std::snprintf(scene_name, sizeof(scene_name), "scene_%05d", s);

    for (int li = 0; li < n_lanes; ++li) {
      const double length = draw_length(cfg, rng);
      const double anchor_prob =
          length < cfg.anchor_length_split ? cfg.anchor_prob_short : cfg.anchor_prob_long;
      double y0;
      if (unit(rng) < anchor_prob) {
        std::uniform_real_distribution<double> a(cfg.anchor_y_min, cfg.anchor_y_max);
        y0 = a(rng);
      } else {
        const double hi = std::min(cfg.mid_start_max, cfg.range_end - length);
        std::uniform_real_distribution<double> m(cfg.range_start, std::max(cfg.range_start, hi));
        y0 = m(rng);
      }
      std::uniform_real_distribution<double> kappa_dist(-cfg.curvature_max, cfg.curvature_max);
      std::uniform_real_distribution<double> tangent_dist(-cfg.tangent_max, cfg.tangent_max);
      std::uniform_real_distribution<double> jitter(-1.0, 1.0);
      std::uniform_real_distribution<double> slope_dist(-cfg.z_slope_max, cfg.z_slope_max);
      const double x0 =
          (li - 0.5 * (n_lanes - 1)) * cfg.lateral_spacing + jitter(rng);
      const double t = tangent_dist(rng);
      const double kappa = kappa_dist(rng);
      const double z_slope = slope_dist(rng);

      const int n_pts = std::max(2, static_cast<int>(std::ceil(length / cfg.dense_step)) + 1);
      std::vector<Point3> pts(n_pts);
      for (int k = 0; k < n_pts; ++k) {
        const double d = length * k / (n_pts - 1);
        pts[k] = Point3{x0 + t * d + 0.5 * kappa * d * d, y0 + d, z_slope * d};
      }
      char lane_name[32];
      std::snprintf(lane_name, sizeof(lane_name), "lane_%02d", li);
      lanes.push_back(DenseLane::create(scene_name, lane_name, 1 + (li % 3), std::move(pts)));
    }
  }
  return lanes;
}

std::vector<double> length_histogram(const std::vector<DenseLane>& lanes,
                                     const std::vector<std::pair<double, double>>& buckets) {
  if (lanes.empty()) throw Error(ErrorCode::InvalidConfig, "length_histogram needs lanes");
  std::vector<double> fractions(buckets.size(), 0.0);
  for (const auto& lane : lanes) {
    const double len = lane_length(lane);
    for (size_t b = 0; b < buckets.size(); ++b) {
      if (len >= buckets[b].first && len < buckets[b].second) {
        fractions[b] += 1.0;
        break;
      }
    }
  }
  for (double& f : fractions) f /= static_cast<double>(lanes.size());
  return fractions;
}

}  // namespace lanepatch
