// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_NNET_CONFIG_H_
#define IAEC_NNET_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace iaec {

enum class Fusion {
  kBaseline,
  kConcatInput,
  kConcatD1,
  kConcatD2,
  kConcatD3,
  kMaskD2,
};

std::string ToString(Fusion f);
Fusion ParseFusion(const std::string& s);
const std::vector<Fusion>& AllFusions();

struct TcnConfig {
  int in_features = 64;
  int bottleneck = 64;  // D
  int hidden = 128;     // H
  int init_kernel = 5;
  int init_stride = 2;
  int blocks_per_repeat = 3;
  int repeats = 2;
  std::vector<int> dilations = {1, 2, 4};  // one per block within a repeat
  int dw_kernel = 5;
  int num_classes = 35;
  Fusion fusion = Fusion::kBaseline;

  int num_blocks() const { return blocks_per_repeat * repeats; }
  int dilation(int block) const {
    return dilations[block % blocks_per_repeat];
  }
  // Number of encoder blocks run on the reference branch: k for ConcatD_k,
  // 2 for MaskD2, 0 otherwise.
  int fusion_depth() const;
  bool uses_reference() const { return fusion != Fusion::kBaseline; }

  void Validate() const;
  nlohmann::json ToJson() const;
  static TcnConfig FromJson(const nlohmann::json& j);
};

// Input frames seen by one output frame, counted inclusively.
int ReceptiveField(const TcnConfig& cfg);
// Inclusive field of view after the initial conv and the first `blocks`
// residual blocks.
int EncoderFov(const TcnConfig& cfg, int blocks);
// Same quantity as a span (first to last frame distance), i.e. inclusive - 1.
int EncoderFovSpan(const TcnConfig& cfg, int blocks);
// Output frames for `frames` input frames.
int OutputFrames(const TcnConfig& cfg, int frames);

struct CostReport {
  int64_t params = 0;
  int64_t flops_per_frame = 0;  // 2 x MACs per output frame
  bool playback = false;
  Fusion fusion = Fusion::kBaseline;
};

// Closed-form count. Batch norm is assumed folded into the neighbouring
// convolutions; activations, the mask product and residual adds are free.
CostReport CountCost(const TcnConfig& cfg, bool playback);

}  // namespace iaec

#endif  // IAEC_NNET_CONFIG_H_
