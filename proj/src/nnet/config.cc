// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/nnet/config.h"

#include "iaec/errors.h"

namespace iaec {

namespace {

struct FusionName {
  Fusion fusion;
  const char* name;
};

constexpr FusionName kFusionNames[] = {
    {Fusion::kBaseline, "baseline"},    {Fusion::kConcatInput, "concat_input"},
    {Fusion::kConcatD1, "concat_d1"},   {Fusion::kConcatD2, "concat_d2"},
    {Fusion::kConcatD3, "concat_d3"},   {Fusion::kMaskD2, "mask_d2"},
};

}  // namespace

std::string ToString(Fusion f) {
  for (const auto& n : kFusionNames) {
    if (n.fusion == f) return n.name;
  }
  return "unknown";
}

Fusion ParseFusion(const std::string& s) {
  for (const auto& n : kFusionNames) {
    if (s == n.name) return n.fusion;
  }
  throw ConfigError("unknown fusion mode '" + s + "'");
}

const std::vector<Fusion>& AllFusions() {
  static const std::vector<Fusion> all = {
      Fusion::kBaseline, Fusion::kConcatInput, Fusion::kConcatD1,
      Fusion::kConcatD2, Fusion::kConcatD3,    Fusion::kMaskD2};
  return all;
}

int TcnConfig::fusion_depth() const {
  switch (fusion) {
    case Fusion::kConcatD1: return 1;
    case Fusion::kConcatD2: return 2;
    case Fusion::kConcatD3: return 3;
    case Fusion::kMaskD2: return 2;
    default: return 0;
  }
}

void TcnConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("model." + what);
  };
  require(in_features > 0, "in_features must be positive");
  require(bottleneck > 0, "bottleneck must be positive");
  require(hidden > 0, "hidden must be positive");
  require(init_kernel > 0, "init_kernel must be positive");
  require(init_stride > 0, "init_stride must be positive");
  require(blocks_per_repeat > 0, "blocks_per_repeat must be positive");
  require(repeats > 0, "repeats must be positive");
  require(static_cast<int>(dilations.size()) == blocks_per_repeat,
          "dilations needs one entry per block in a repeat");
  for (int d : dilations) require(d > 0, "dilations must be positive");
  require(dw_kernel > 0, "dw_kernel must be positive");
  require(num_classes > 0, "num_classes must be positive");
  require(fusion_depth() <= num_blocks(), "fusion depth exceeds block count");
}

nlohmann::json TcnConfig::ToJson() const {
  return {{"in_features", in_features},
          {"bottleneck", bottleneck},
          {"hidden", hidden},
          {"init_kernel", init_kernel},
          {"init_stride", init_stride},
          {"blocks_per_repeat", blocks_per_repeat},
          {"repeats", repeats},
          {"dilations", dilations},
          {"dw_kernel", dw_kernel},
          {"num_classes", num_classes},
          {"fusion", ToString(fusion)}};
}

TcnConfig TcnConfig::FromJson(const nlohmann::json& j) {
  TcnConfig c;
  try {
    c.in_features = j.value("in_features", c.in_features);
    c.bottleneck = j.value("bottleneck", c.bottleneck);
    c.hidden = j.value("hidden", c.hidden);
    c.init_kernel = j.value("init_kernel", c.init_kernel);
    c.init_stride = j.value("init_stride", c.init_stride);
    c.blocks_per_repeat = j.value("blocks_per_repeat", c.blocks_per_repeat);
    c.repeats = j.value("repeats", c.repeats);
    c.dilations = j.value("dilations", c.dilations);
    c.dw_kernel = j.value("dw_kernel", c.dw_kernel);
    c.num_classes = j.value("num_classes", c.num_classes);
    c.fusion = ParseFusion(j.value("fusion", std::string("baseline")));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad model config: ") + e.what());
  }
  c.Validate();
  return c;
}

int EncoderFov(const TcnConfig& cfg, int blocks) {
  int fov = cfg.init_kernel;
  for (int b = 0; b < blocks; ++b) {
    fov += (cfg.dw_kernel - 1) * cfg.dilation(b) * cfg.init_stride;
  }
  return fov;
}

int EncoderFovSpan(const TcnConfig& cfg, int blocks) {
  return EncoderFov(cfg, blocks) - 1;
}

int ReceptiveField(const TcnConfig& cfg) {
  return EncoderFov(cfg, cfg.num_blocks());
}

int OutputFrames(const TcnConfig& cfg, int frames) {
  if (frames < cfg.init_kernel) return 0;
  return (frames - cfg.init_kernel) / cfg.init_stride + 1;
}

CostReport CountCost(const TcnConfig& cfg, bool playback) {
  cfg.Validate();
  const int64_t f = cfg.in_features, d = cfg.bottleneck, h = cfg.hidden;
  const int64_t k0 = cfg.init_kernel, kd = cfg.dw_kernel, c = cfg.num_classes;
  const int64_t init_w = k0 * f * d;
  const int64_t block_w = d * h + kd * h + h * d;
  const int64_t head_w = d * c;
  const int64_t blocks = cfg.num_blocks();

  // Parameters: weights plus biases, two per batch norm channel, one PReLU
  // slope per activation.
  const int64_t block_p = (d * h + h) + 1 + 2 * h + (kd * h + h) + 1 + 2 * h +
                          (h * d + d);
  CostReport r;
  r.fusion = cfg.fusion;
  r.playback = playback;
  r.params = 2 * f + init_w + d + blocks * block_p + head_w + c;
  int64_t macs = init_w + blocks * block_w + head_w;
  switch (cfg.fusion) {
    case Fusion::kBaseline:
      break;
    case Fusion::kConcatInput:
      r.params += 2 * f + k0 * f * d;
      macs += k0 * f * d;
      break;
    case Fusion::kConcatD1:
    case Fusion::kConcatD2:
    case Fusion::kConcatD3: {
      const int64_t k = cfg.fusion_depth();
      r.params += 2 * f + 2 * d * d + d;
      macs += init_w + k * block_w + 2 * d * d;
      break;
    }
    case Fusion::kMaskD2: {
      r.params += 2 * f + 2 * d * d + d;
      if (playback) macs += init_w + 2 * block_w + 2 * d * d;
      break;
    }
  }
  r.flops_per_frame = 2 * macs;
  return r;
}

}  // namespace iaec
