#include "lanepatch/attention.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace lanepatch {

namespace {

Matrix seeded_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<float> dist(0.0f, 0.02f);
  Matrix m(rows, cols);
  for (float& v : m.d) v = dist(rng);
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw Error(ErrorCode::ShapeMismatch, "matmul shape mismatch");
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const float av = a.at(i, k);
      if (av == 0.0f) continue;
      for (int j = 0; j < b.cols; ++j) out.at(i, j) += av * b.at(k, j);
    }
  }
  return out;
}

}  // namespace

MlpWeights MlpWeights::seeded(const std::vector<int>& sizes, Activation act, uint64_t seed) {
  if (sizes.size() < 2) throw Error(ErrorCode::InvalidConfig, "mlp needs >= 2 layer sizes");
  std::mt19937_64 rng(seed);
  MlpWeights w;
  w.act = act;
  for (size_t i = 0; i + 1 < sizes.size(); ++i) {
    MlpLayer layer;
    layer.w = seeded_matrix(sizes[i + 1], sizes[i], rng);
    layer.b.assign(sizes[i + 1], 0.0f);
    std::normal_distribution<float> dist(0.0f, 0.02f);
    for (float& v : layer.b) v = dist(rng);
    w.layers.push_back(std::move(layer));
  }
  return w;
}

Matrix mlp_forward(const MlpWeights& w, const Matrix& input) {
  Matrix cur = input;
  for (size_t li = 0; li < w.layers.size(); ++li) {
    const MlpLayer& layer = w.layers[li];
    if (cur.cols != layer.w.cols) {
      throw Error(ErrorCode::ShapeMismatch, "mlp layer input width mismatch");
    }
    Matrix next(cur.rows, layer.w.rows);
    for (int i = 0; i < cur.rows; ++i) {
      for (int o = 0; o < layer.w.rows; ++o) {
        float acc = layer.b[o];
        for (int k = 0; k < cur.cols; ++k) acc += layer.w.at(o, k) * cur.at(i, k);
        if (li + 1 < w.layers.size() && w.act == Activation::Relu && acc < 0.0f) acc = 0.0f;
        next.at(i, o) = acc;
      }
    }
    cur = std::move(next);
  }
  return cur;
}

AttentionWeights AttentionWeights::seeded(int c, int heads, uint64_t seed) {
  if (heads < 1 || c % heads != 0) {
    throw Error(ErrorCode::InvalidConfig, "channels must divide evenly into heads");
  }
  std::mt19937_64 rng(seed);
  AttentionWeights w;
  w.heads = heads;
  w.wq = seeded_matrix(c, c, rng);
  w.wk = seeded_matrix(c, c, rng);
  w.wv = seeded_matrix(c, c, rng);
  w.wo = seeded_matrix(c, c, rng);
  return w;
}

Matrix self_attention(const AttentionWeights& w, const Matrix& tokens) {
  const int c = w.wq.rows;
  if (tokens.cols != c) throw Error(ErrorCode::ShapeMismatch, "token width != weight width");
  const int t = tokens.rows;
  const int dk = c / w.heads;
  const float scale = 1.0f / std::sqrt(static_cast<float>(dk));

  Matrix q = matmul(tokens, w.wq);
  Matrix k = matmul(tokens, w.wk);
  Matrix v = matmul(tokens, w.wv);
  Matrix concat(t, c);
  std::vector<float> logits(t);
  for (int h = 0; h < w.heads; ++h) {
    const int off = h * dk;
    for (int i = 0; i < t; ++i) {
      float maxv = -std::numeric_limits<float>::infinity();
      for (int j = 0; j < t; ++j) {
        float acc = 0.0f;
        for (int d = 0; d < dk; ++d) acc += q.at(i, off + d) * k.at(j, off + d);
        logits[j] = acc * scale;
        if (logits[j] > maxv) maxv = logits[j];
      }
      float denom = 0.0f;
      for (int j = 0; j < t; ++j) {
        logits[j] = std::exp(logits[j] - maxv);
        denom += logits[j];
      }
      for (int j = 0; j < t; ++j) {
        const float a = logits[j] / denom;
        for (int d = 0; d < dk; ++d) concat.at(i, off + d) += a * v.at(j, off + d);
      }
    }
  }
  return matmul(concat, w.wo);
}

FeatureTensor FeatureTensor::seeded(int n, int m, int c, uint64_t seed) {
  if (n < 1 || m < 1 || c < 1) throw Error(ErrorCode::InvalidConfig, "bad feature dims");
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> dist(0.0f, 1.0f);
  FeatureTensor f(n, m, c);
  // One learned [CLS] vector shared by all lanes.
  std::vector<float> cls(c);
  for (float& v : cls) v = dist(rng);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int ch = 0; ch < c; ++ch) f.at(i, j, ch) = dist(rng);
    }
    for (int ch = 0; ch < c; ++ch) f.at(i, m, ch) = cls[ch];
  }
  return f;
}

PlAttentionWeights PlAttentionWeights::seeded(int c, int heads, uint64_t seed) {
  PlAttentionWeights w;
  w.pos_mlp = MlpWeights::seeded({c, c, c}, Activation::Relu, seed ^ 0x706f73ULL);
  w.ppa = AttentionWeights::seeded(c, heads, seed ^ 0x707061ULL);
  w.lla = AttentionWeights::seeded(c, heads, seed ^ 0x6c6c61ULL);
  w.pya = AttentionWeights::seeded(c, heads, seed ^ 0x707961ULL);
  return w;
}

FeatureTensor add_position_embedding(const FeatureTensor& feat, const MlpWeights& w) {
  Matrix tokens(feat.n * (feat.m + 1), feat.c);
  tokens.d = feat.data;
  Matrix emb = mlp_forward(w, tokens);
  if (emb.cols != feat.c) {
    throw Error(ErrorCode::ShapeMismatch, "position mlp must preserve channel count");
  }
  FeatureTensor out = feat;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += emb.d[i];
  return out;
}

FeatureTensor ppa_forward(const FeatureTensor& feat, const AttentionWeights& w) {
  FeatureTensor out(feat.n, feat.m, feat.c);
  Matrix lane_tokens(feat.m + 1, feat.c);
  for (int i = 0; i < feat.n; ++i) {
    for (int s = 0; s <= feat.m; ++s) {
      for (int ch = 0; ch < feat.c; ++ch) lane_tokens.at(s, ch) = feat.at(i, s, ch);
    }
    Matrix res = self_attention(w, lane_tokens);
    for (int s = 0; s <= feat.m; ++s) {
      for (int ch = 0; ch < feat.c; ++ch) out.at(i, s, ch) = res.at(s, ch);
    }
  }
  return out;
}

Matrix lla_forward(const Matrix& cls_feats, const AttentionWeights& w) {
  return self_attention(w, cls_feats);
}

std::vector<float> pya_forward(const std::vector<float>& point_feats, int n, int m, int c,
                               const AttentionWeights& w) {
  if (point_feats.size() != static_cast<size_t>(n) * m * c) {
    throw Error(ErrorCode::ShapeMismatch, "pya input size != n*m*c");
  }
  std::vector<float> out(point_feats.size());
  Matrix group(n, c);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      for (int ch = 0; ch < c; ++ch) {
        group.at(i, ch) = point_feats[(static_cast<size_t>(i) * m + j) * c + ch];
      }
    }
    Matrix res = self_attention(w, group);
    for (int i = 0; i < n; ++i) {
      for (int ch = 0; ch < c; ++ch) {
        out[(static_cast<size_t>(i) * m + j) * c + ch] = res.at(i, ch);
      }
    }
  }
  return out;
}

PlAttentionOutput pl_attention_forward(const FeatureTensor& feat, const PlAttentionWeights& w) {
  FeatureTensor embedded = add_position_embedding(feat, w.pos_mlp);
  FeatureTensor after_ppa = ppa_forward(embedded, w.ppa);

  Matrix cls(feat.n, feat.c);
  std::vector<float> points(static_cast<size_t>(feat.n) * feat.m * feat.c);
  for (int i = 0; i < feat.n; ++i) {
    for (int ch = 0; ch < feat.c; ++ch) cls.at(i, ch) = after_ppa.at(i, feat.m, ch);
    for (int j = 0; j < feat.m; ++j) {
      for (int ch = 0; ch < feat.c; ++ch) {
        points[(static_cast<size_t>(i) * feat.m + j) * feat.c + ch] = after_ppa.at(i, j, ch);
      }
    }
  }
  PlAttentionOutput out;
  out.lane_feats = lla_forward(cls, w.lla);
  out.point_feats = pya_forward(points, feat.n, feat.m, feat.c, w.pya);
  return out;
}

FlopBreakdown flop_estimate(AttnKind kind, unsigned long long n, unsigned long long m,
                            unsigned long long c, unsigned long long heads) {
  if (n == 0 || m == 0 || c == 0 || heads == 0) {
    throw Error(ErrorCode::InvalidConfig, "flop_estimate needs positive dims");
  }
  (void)heads;  // per-pair work sums to T^2*C regardless of the head split
  FlopBreakdown f;
  const unsigned long long mp1 = m + 1;
  if (kind == AttnKind::MSA) {
    const unsigned long long t = n * mp1;
    f.projection_macs = 4 * t * c * c;
    f.score_macs = t * t * c;
    f.weighted_sum_macs = t * t * c;
  } else {
    // PPA over M+1 tokens per lane, LLA over N tokens, PYA over N tokens per y-group.
    f.projection_macs = 4 * (n * mp1 + n + n * m) * c * c;
    f.score_macs = (n * mp1 * mp1 + n * n + m * n * n) * c;
    f.weighted_sum_macs = f.score_macs;
  }
  return f;
}

}  // namespace lanepatch
