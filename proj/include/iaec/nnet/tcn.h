// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_NNET_TCN_H_
#define IAEC_NNET_TCN_H_

#include <cstdint>
#include <vector>

#include "iaec/nnet/config.h"
#include "iaec/nnet/layers.h"
#include "iaec/rng.h"

namespace iaec {

// B examples of equal length. Rows of `reference` are read only for
// playback examples; it may be empty when no example is playback.
struct Batch {
  int size = 0;
  int frames = 0;
  Matrix mixture;    // (size * frames) x in_features
  Matrix reference;  // same shape as mixture, or empty
  std::vector<uint8_t> playback;
  std::vector<int> labels;
};

struct ForwardOptions {
  bool train = false;
  // Applied after the input batch norms, per example and per branch.
  const SpecAugmentPolicy* spec_augment = nullptr;
  Rng* rng = nullptr;
  MacCounter* macs = nullptr;
};

// Everything backward needs from one forward pass.
struct TcnCache {
  int batch = 0, frames = 0, frames_out = 0;
  bool train = false;
  std::vector<int> playback_index;
  BatchNorm::Cache bn_y, bn_r;
  bool ran_bn_r = false;
  Matrix mask_y, mask_r;
  Matrix init_in;
  int init_batch = 0;
  std::vector<ResBlock::Cache> blocks;
  Matrix fuse_in, gate, zy_playback;
  Matrix head_in;
  Matrix frame_logits;
  std::vector<int> argmax_rows;
};

// Temporal convolutional classifier with optional reference fusion.
//
//   baseline      BN(y) -> conv k5/s2 -> 6 residual blocks -> dense head
//   concat_input  [BN_y(y), BN_r(r)] -> wider conv -> blocks -> head
//   concat_dk     shared conv + blocks 1..k on both branches, channel concat,
//                 pointwise 2D->D, remaining blocks, head
//   mask_d2       shared conv + blocks 1..2 on both branches,
//                 M = sigmoid(P [Z_y, Z_r]), Z = M * Z_y, blocks 3..6, head
//
// Non-playback examples: the concat modes feed the reference branch the
// learned BN_r shift broadcast over time; mask_d2 skips the branch and the
// gate entirely.
class Tcn {
 public:
  explicit Tcn(const TcnConfig& cfg, uint64_t seed = 0);

  const TcnConfig& config() const { return cfg_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  ParamStore& buffers() { return buffers_; }
  const ParamStore& buffers() const { return buffers_; }
  int64_t NumParams() const { return params_.NumElements(); }

  // (B * T') x C frame logits.
  Matrix FrameLogits(const Batch& batch, const ForwardOptions& opts,
                     TcnCache* cache = nullptr) const;
  // B x C logits max-pooled over time.
  Matrix Forward(const Batch& batch, const ForwardOptions& opts,
                 TcnCache* cache = nullptr) const;
  // Gradients of sum_{b,c} dlogits(b, c) * logits(b, c).
  Grads Backward(const TcnCache& cache, const Matrix& dlogits) const;

  void UpdateRunningStats(const TcnCache& cache, double momentum = 0.1,
                          bool unbiased = true);

  // Copies every parameter and buffer of `from` whose name and shape match.
  // Returns the number of tensors copied.
  int CopyMatchingFrom(const Tcn& from);

  int mask_weight() const { return mask_.weight(); }
  int mask_bias() const { return mask_.bias(); }

 private:
  TcnConfig cfg_;
  ParamStore params_, buffers_;
  BatchNorm bn_y_, bn_r_;
  StridedConv init_;
  std::vector<ResBlock> blocks_;
  Pointwise proj_, mask_, head_;
};

// Batch of one built from feature matrices (T x F each).
Batch SingleExample(const Matrix& mixture, const Matrix* reference, int label);

// Row block helpers over stacked sequences.
Matrix GatherExamples(const Matrix& x, int frames, const std::vector<int>& idx);
void ScatterExamples(Matrix& dst, const Matrix& src, int frames,
                     const std::vector<int>& idx);

}  // namespace iaec

#endif  // IAEC_NNET_TCN_H_
