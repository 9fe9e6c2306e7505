// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/nnet/tcn.h"

#include <cmath>

#include "iaec/errors.h"

namespace iaec {

namespace {

Matrix VStack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

Matrix HCat(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

bool IsConcat(Fusion f) {
  return f == Fusion::kConcatInput || f == Fusion::kConcatD1 ||
         f == Fusion::kConcatD2 || f == Fusion::kConcatD3;
}

Matrix AugmentMasks(int examples, int frames, int features, Rng& rng,
                    const SpecAugmentPolicy& policy) {
  Matrix m(static_cast<Eigen::Index>(examples) * frames, features);
  for (int b = 0; b < examples; ++b) {
    m.middleRows(static_cast<Eigen::Index>(b) * frames, frames) =
        SpecAugmentMask(frames, features, rng, policy);
  }
  return m;
}

}  // namespace

Matrix GatherExamples(const Matrix& x, int frames,
                      const std::vector<int>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()) * frames, x.cols());
  for (size_t i = 0; i < idx.size(); ++i) {
    out.middleRows(static_cast<Eigen::Index>(i) * frames, frames) =
        x.middleRows(static_cast<Eigen::Index>(idx[i]) * frames, frames);
  }
  return out;
}

void ScatterExamples(Matrix& dst, const Matrix& src, int frames,
                     const std::vector<int>& idx) {
  for (size_t i = 0; i < idx.size(); ++i) {
    dst.middleRows(static_cast<Eigen::Index>(idx[i]) * frames, frames) =
        src.middleRows(static_cast<Eigen::Index>(i) * frames, frames);
  }
}

Batch SingleExample(const Matrix& mixture, const Matrix* reference,
                    int label) {
  Batch b;
  b.size = 1;
  b.frames = static_cast<int>(mixture.rows());
  b.mixture = mixture;
  if (reference) {
    if (reference->rows() != mixture.rows() ||
        reference->cols() != mixture.cols()) {
      throw DataError("reference features do not match the mixture shape");
    }
    b.reference = *reference;
  }
  b.playback = {static_cast<uint8_t>(reference != nullptr)};
  b.labels = {label};
  return b;
}

Tcn::Tcn(const TcnConfig& cfg, uint64_t seed) : cfg_(cfg) {
  cfg_.Validate();
  const int f = cfg_.in_features, d = cfg_.bottleneck;
  bn_y_ = BatchNorm(params_, buffers_, "bn_y", f);
  if (cfg_.uses_reference()) bn_r_ = BatchNorm(params_, buffers_, "bn_r", f);
  const int init_in = cfg_.fusion == Fusion::kConcatInput ? 2 * f : f;
  init_ = StridedConv(params_, "init", init_in, d, cfg_.init_kernel,
                      cfg_.init_stride);
  for (int i = 0; i < cfg_.num_blocks(); ++i) {
    blocks_.emplace_back(params_, buffers_, "block" + std::to_string(i), d,
                         cfg_.hidden, cfg_.dw_kernel, cfg_.dilation(i));
  }
  if (IsConcat(cfg_.fusion) && cfg_.fusion != Fusion::kConcatInput) {
    proj_ = Pointwise(params_, "proj", 2 * d, d);
  }
  if (cfg_.fusion == Fusion::kMaskD2) mask_ = Pointwise(params_, "mask", 2 * d, d);
  head_ = Pointwise(params_, "head", d, cfg_.num_classes);

  Rng rng(seed);
  init_.Init(params_, rng);
  for (const auto& b : blocks_) b.Init(params_, rng);
  if (proj_.weight() >= 0) proj_.Init(params_, rng);
  if (mask_.weight() >= 0) mask_.Init(params_, rng);
  head_.Init(params_, rng);
}

Matrix Tcn::FrameLogits(const Batch& batch, const ForwardOptions& opts,
                        TcnCache* cache) const {
  const int nb = batch.size, t = batch.frames, f = cfg_.in_features;
  const Fusion fusion = cfg_.fusion;
  if (nb < 1 || t < 1) throw DataError("empty batch");
  if (batch.mixture.rows() != static_cast<Eigen::Index>(nb) * t ||
      batch.mixture.cols() != f) {
    throw DataError("mixture features have the wrong shape");
  }
  if (static_cast<int>(batch.playback.size()) != nb) {
    throw DataError("playback flags do not match the batch size");
  }
  TcnCache local;
  TcnCache& c = cache ? *cache : local;
  c = TcnCache();
  c.batch = nb;
  c.frames = t;
  c.train = opts.train;
  if (cfg_.uses_reference()) {
    for (int b = 0; b < nb; ++b) {
      if (batch.playback[b]) c.playback_index.push_back(b);
    }
    if (!c.playback_index.empty() &&
        (batch.reference.rows() != batch.mixture.rows() ||
         batch.reference.cols() != f)) {
      throw DataError("playback example without reference features");
    }
  }
  const int np = static_cast<int>(c.playback_index.size());
  const bool augment =
      opts.train && opts.spec_augment && !opts.spec_augment->identity();
  if (augment && !opts.rng) throw ConfigError("spec augment needs an rng");

  Matrix xy = bn_y_.Forward(params_, buffers_, batch.mixture, opts.train,
                            &c.bn_y);
  if (augment) {
    c.mask_y = AugmentMasks(nb, t, f, *opts.rng, *opts.spec_augment);
    xy.array() *= c.mask_y.array();
  }
  Matrix xr_playback;
  if (np > 0) {
    xr_playback = bn_r_.Forward(params_, buffers_,
                                GatherExamples(batch.reference, t,
                                               c.playback_index),
                                opts.train, &c.bn_r);
    c.ran_bn_r = true;
    if (augment) {
      c.mask_r = AugmentMasks(np, t, f, *opts.rng, *opts.spec_augment);
      xr_playback.array() *= c.mask_r.array();
    }
  }
  Matrix xr_full;
  if (IsConcat(fusion)) {
    xr_full.resize(static_cast<Eigen::Index>(nb) * t, f);
    xr_full.rowwise() = params_[bn_r_.beta()].row(0);
    if (np > 0) ScatterExamples(xr_full, xr_playback, t, c.playback_index);
  }

  switch (fusion) {
    case Fusion::kBaseline:
      c.init_in = std::move(xy);
      c.init_batch = nb;
      break;
    case Fusion::kConcatInput:
      c.init_in = HCat(xy, xr_full);
      c.init_batch = nb;
      break;
    case Fusion::kConcatD1:
    case Fusion::kConcatD2:
    case Fusion::kConcatD3:
      c.init_in = VStack(xy, xr_full);
      c.init_batch = 2 * nb;
      break;
    case Fusion::kMaskD2:
      c.init_in = np > 0 ? VStack(xy, xr_playback) : std::move(xy);
      c.init_batch = nb + np;
      break;
  }

  Matrix z = init_.Forward(params_, c.init_in, c.init_batch, t, opts.macs);
  const int to = init_.OutFrames(t);
  c.frames_out = to;
  const Eigen::Index rows_y = static_cast<Eigen::Index>(nb) * to;
  const int depth = cfg_.fusion_depth();
  c.blocks.resize(blocks_.size());
  for (int i = 0; i < depth; ++i) {
    z = blocks_[i].Forward(params_, buffers_, z, c.init_batch, to, opts.train,
                           &c.blocks[i], opts.macs);
  }
  if (IsConcat(fusion) && fusion != Fusion::kConcatInput) {
    c.fuse_in = HCat(z.topRows(rows_y), z.bottomRows(rows_y));
    z = proj_.Forward(params_, c.fuse_in, opts.macs);
  } else if (fusion == Fusion::kMaskD2) {
    if (np > 0) {
      Matrix zy = z.topRows(rows_y);
      c.zy_playback = GatherExamples(zy, to, c.playback_index);
      c.fuse_in = HCat(c.zy_playback, z.bottomRows(z.rows() - rows_y));
      c.gate = mask_.Forward(params_, c.fuse_in, opts.macs)
                   .unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
      ScatterExamples(zy, (c.gate.array() * c.zy_playback.array()).matrix(),
                      to, c.playback_index);
      z = std::move(zy);
    }
  }
  for (int i = depth; i < cfg_.num_blocks(); ++i) {
    z = blocks_[i].Forward(params_, buffers_, z, nb, to, opts.train,
                           &c.blocks[i], opts.macs);
  }
  Matrix logits = head_.Forward(params_, z, opts.macs);
  c.head_in = std::move(z);
  return logits;
}

Matrix Tcn::Forward(const Batch& batch, const ForwardOptions& opts,
                    TcnCache* cache) const {
  TcnCache local;
  TcnCache& c = cache ? *cache : local;
  c.frame_logits = FrameLogits(batch, opts, &c);
  return MaxPoolTime(c.frame_logits, c.batch, c.frames_out, &c.argmax_rows);
}

Grads Tcn::Backward(const TcnCache& c, const Matrix& dlogits) const {
  const int nb = c.batch, t = c.frames, to = c.frames_out;
  const int f = cfg_.in_features, d = cfg_.bottleneck;
  const Fusion fusion = cfg_.fusion;
  const int np = static_cast<int>(c.playback_index.size());
  Grads g = ZeroGrads(params_);

  Matrix dframes = Matrix::Zero(c.frame_logits.rows(), c.frame_logits.cols());
  for (int b = 0; b < nb; ++b) {
    for (Eigen::Index k = 0; k < dframes.cols(); ++k) {
      dframes(c.argmax_rows[b * dframes.cols() + k], k) += dlogits(b, k);
    }
  }
  Matrix dz = head_.Backward(params_, c.head_in, dframes, g);
  const int depth = cfg_.fusion_depth();
  for (int i = cfg_.num_blocks() - 1; i >= depth; --i) {
    dz = blocks_[i].Backward(params_, c.blocks[i], nb, to, dz, g);
  }
  if (IsConcat(fusion) && fusion != Fusion::kConcatInput) {
    const Matrix dfuse = proj_.Backward(params_, c.fuse_in, dz, g);
    dz = VStack(dfuse.leftCols(d), dfuse.rightCols(d));
  } else if (fusion == Fusion::kMaskD2 && np > 0) {
    const Matrix dzg = GatherExamples(dz, to, c.playback_index);
    const Matrix dpre = (dzg.array() * c.zy_playback.array() *
                         c.gate.array() * (1.0 - c.gate.array()))
                            .matrix();
    const Matrix dfuse = mask_.Backward(params_, c.fuse_in, dpre, g);
    const Matrix dzy =
        (dzg.array() * c.gate.array()).matrix() + dfuse.leftCols(d);
    ScatterExamples(dz, dzy, to, c.playback_index);
    dz = VStack(dz, dfuse.rightCols(d));
  }
  for (int i = depth - 1; i >= 0; --i) {
    dz = blocks_[i].Backward(params_, c.blocks[i], c.init_batch, to, dz, g);
  }
  const Matrix dinit = init_.Backward(params_, c.init_in, c.init_batch, t, dz, g);

  const Eigen::Index rows_in = static_cast<Eigen::Index>(nb) * t;
  Matrix dxy, dxr_full, dxr_playback;
  switch (fusion) {
    case Fusion::kBaseline:
      dxy = dinit;
      break;
    case Fusion::kConcatInput:
      dxy = dinit.leftCols(f);
      dxr_full = dinit.rightCols(f);
      break;
    case Fusion::kConcatD1:
    case Fusion::kConcatD2:
    case Fusion::kConcatD3:
      dxy = dinit.topRows(rows_in);
      dxr_full = dinit.bottomRows(rows_in);
      break;
    case Fusion::kMaskD2:
      dxy = dinit.topRows(rows_in);
      if (np > 0) dxr_playback = dinit.bottomRows(dinit.rows() - rows_in);
      break;
  }
  if (dxr_full.size() > 0) {
    std::vector<uint8_t> is_playback(nb, 0);
    for (int b : c.playback_index) is_playback[b] = 1;
    for (int b = 0; b < nb; ++b) {
      if (is_playback[b]) continue;
      g[bn_r_.beta()] +=
          dxr_full.middleRows(static_cast<Eigen::Index>(b) * t, t)
              .colwise()
              .sum();
    }
    if (np > 0) dxr_playback = GatherExamples(dxr_full, t, c.playback_index);
  }
  if (np > 0) {
    if (c.mask_r.size() > 0) dxr_playback.array() *= c.mask_r.array();
    bn_r_.Backward(params_, c.bn_r, dxr_playback, g);
  }
  if (c.mask_y.size() > 0) dxy.array() *= c.mask_y.array();
  bn_y_.Backward(params_, c.bn_y, dxy, g);
  return g;
}

void Tcn::UpdateRunningStats(const TcnCache& c, double momentum,
                             bool unbiased) {
  if (!c.train) return;
  bn_y_.UpdateRunning(buffers_, c.bn_y, momentum, unbiased);
  if (c.ran_bn_r) bn_r_.UpdateRunning(buffers_, c.bn_r, momentum, unbiased);
  for (size_t i = 0; i < blocks_.size(); ++i) {
    if (c.blocks[i].x.size() == 0) continue;
    blocks_[i].UpdateRunning(buffers_, c.blocks[i], momentum, unbiased);
  }
}

int Tcn::CopyMatchingFrom(const Tcn& from) {
  int copied = 0;
  auto copy = [&copied](const ParamStore& src, ParamStore& dst) {
    for (int i = 0; i < dst.size(); ++i) {
      const int j = src.Find(dst.name(i));
      if (j < 0 || src[j].rows() != dst[i].rows() ||
          src[j].cols() != dst[i].cols()) {
        continue;
      }
      dst[i] = src[j];
      ++copied;
    }
  };
  copy(from.params_, params_);
  copy(from.buffers_, buffers_);
  return copied;
}

}  // namespace iaec
