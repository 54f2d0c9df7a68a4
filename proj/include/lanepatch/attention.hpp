#pragma once

#include <cstdint>
#include <vector>

#include "lanepatch/error.hpp"

namespace lanepatch {

/// Row-major float matrix, just big enough for the reference kernels.
struct Matrix {
  int rows{0};
  int cols{0};
  std::vector<float> d;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), d(static_cast<size_t>(r) * c, 0.0f) {}
  float& at(int r, int c) { return d[static_cast<size_t>(r) * cols + c]; }
  float at(int r, int c) const { return d[static_cast<size_t>(r) * cols + c]; }
};

enum class Activation { Identity, Relu };

struct MlpLayer {
  Matrix w;  // out x in
  std::vector<float> b;
};

struct MlpWeights {
  std::vector<MlpLayer> layers;
  Activation act{Activation::Relu};

  static MlpWeights seeded(const std::vector<int>& sizes, Activation act, uint64_t seed);
};

/// Affine layers with the activation between them (not after the last).
/// Input rows are samples, columns features.
Matrix mlp_forward(const MlpWeights& w, const Matrix& input);

struct AttentionWeights {
  Matrix wq, wk, wv, wo;  // each c x c
  int heads{1};

  static AttentionWeights seeded(int c, int heads, uint64_t seed);
};

/// Multi-head self-attention over the rows of `tokens` (T x C), numerically
/// stable softmax, no residual or normalization.
Matrix self_attention(const AttentionWeights& w, const Matrix& tokens);

/// N x (M+1) x C point-aware features; slot M of each lane is the [CLS] token.
struct FeatureTensor {
  int n{0}, m{0}, c{0};
  std::vector<float> data;

  FeatureTensor() = default;
  FeatureTensor(int n_, int m_, int c_)
      : n(n_), m(m_), c(c_), data(static_cast<size_t>(n_) * (m_ + 1) * c_, 0.0f) {}
  float& at(int lane, int slot, int ch) {
    return data[(static_cast<size_t>(lane) * (m + 1) + slot) * c + ch];
  }
  float at(int lane, int slot, int ch) const {
    return data[(static_cast<size_t>(lane) * (m + 1) + slot) * c + ch];
  }

  /// Random features with a shared seeded [CLS] vector in slot M.
  static FeatureTensor seeded(int n, int m, int c, uint64_t seed);
};

struct PlAttentionWeights {
  MlpWeights pos_mlp;
  AttentionWeights ppa, lla, pya;

  static PlAttentionWeights seeded(int c, int heads, uint64_t seed);
};

/// P' = P + MLP(P), applied per token.
FeatureTensor add_position_embedding(const FeatureTensor& feat, const MlpWeights& w);

/// Self-attention over the M+1 tokens of each lane independently.
FeatureTensor ppa_forward(const FeatureTensor& feat, const AttentionWeights& w);

/// Self-attention over the N lane-level [CLS] features (N x C).
Matrix lla_forward(const Matrix& cls_feats, const AttentionWeights& w);

/// Self-attention across the N lanes within each of the M y-groups.
/// Input and output are N x M x C flattened row-major (no CLS slots).
std::vector<float> pya_forward(const std::vector<float>& point_feats, int n, int m, int c,
                               const AttentionWeights& w);

struct PlAttentionOutput {
  Matrix lane_feats;               // N x C
  std::vector<float> point_feats;  // N x M x C
};

PlAttentionOutput pl_attention_forward(const FeatureTensor& feat, const PlAttentionWeights& w);

enum class AttnKind { PLA, MSA };

/// Multiply-accumulate counts for one forward pass over N lanes of M points.
struct FlopBreakdown {
  unsigned long long projection_macs{0};
  unsigned long long score_macs{0};
  unsigned long long weighted_sum_macs{0};

  unsigned long long interaction_macs() const { return score_macs + weighted_sum_macs; }
  unsigned long long total_macs() const {
    return projection_macs + score_macs + weighted_sum_macs;
  }
};

FlopBreakdown flop_estimate(AttnKind kind, unsigned long long n, unsigned long long m,
                            unsigned long long c, unsigned long long heads);

}  // namespace lanepatch
