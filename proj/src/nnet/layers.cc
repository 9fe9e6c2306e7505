// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/nnet/layers.h"

#include <algorithm>
#include <cmath>

#include "iaec/errors.h"

namespace iaec {

namespace {

void FillUniform(Matrix& m, double bound, Rng& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = Uniform(rng, -bound, bound);
  }
}

}  // namespace

int ParamStore::Add(const std::string& name, int rows, int cols) {
  if (Find(name) >= 0) throw ConfigError("duplicate tensor " + name);
  tensors_.push_back({name, Matrix::Zero(rows, cols)});
  return size() - 1;
}

int ParamStore::Find(const std::string& name) const {
  for (int i = 0; i < size(); ++i) {
    if (tensors_[i].name == name) return i;
  }
  return -1;
}

int64_t ParamStore::NumElements() const {
  int64_t n = 0;
  for (const auto& t : tensors_) n += t.value.size();
  return n;
}

Grads ZeroGrads(const ParamStore& p) {
  Grads g(p.size());
  for (int i = 0; i < p.size(); ++i) {
    g[i] = Matrix::Zero(p[i].rows(), p[i].cols());
  }
  return g;
}

// BatchNorm

BatchNorm::BatchNorm(ParamStore& params, ParamStore& buffers,
                     const std::string& name, int ch)
    : channels(ch) {
  gamma_ = params.Add(name + ".gamma", 1, ch);
  beta_ = params.Add(name + ".beta", 1, ch);
  params[gamma_].setOnes();
  mean_ = buffers.Add(name + ".running_mean", 1, ch);
  var_ = buffers.Add(name + ".running_var", 1, ch);
  buffers[var_].setOnes();
}

Matrix BatchNorm::Forward(const ParamStore& params, const ParamStore& buffers,
                          const Matrix& x, bool train, Cache* cache) const {
  RowVector mean, var;
  if (train) {
    if (x.rows() == 0) throw DataError("batch norm on an empty batch");
    mean = x.colwise().mean();
    var = (x.rowwise() - mean).array().square().colwise().mean();
  } else {
    mean = buffers[mean_];
    var = buffers[var_];
  }
  const RowVector inv_std = (var.array() + eps).rsqrt().matrix();
  Matrix xhat = ((x.rowwise() - mean).array().rowwise() * inv_std.array())
                    .matrix();
  Matrix y = (xhat.array().rowwise() * params[gamma_].row(0).array())
                 .matrix()
                 .rowwise() +
             params[beta_].row(0);
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->mean = mean;
    cache->var = var;
    cache->inv_std = inv_std;
    cache->train = train;
  }
  return y;
}

Matrix BatchNorm::Backward(const ParamStore& params, const Cache& c,
                           const Matrix& dy, Grads& grads) const {
  grads[gamma_] += (dy.array() * c.xhat.array()).colwise().sum().matrix();
  grads[beta_] += dy.colwise().sum();
  const Matrix dxhat =
      (dy.array().rowwise() * params[gamma_].row(0).array()).matrix();
  if (!c.train) {
    return (dxhat.array().rowwise() * c.inv_std.array()).matrix();
  }
  const double n = static_cast<double>(dy.rows());
  const RowVector sum_dxhat = dxhat.colwise().sum();
  const RowVector sum_dxhat_xhat =
      (dxhat.array() * c.xhat.array()).colwise().sum().matrix();
  Matrix dx = (dxhat.array() * n).matrix().rowwise() - sum_dxhat;
  dx.array() -= c.xhat.array().rowwise() * sum_dxhat_xhat.array();
  dx.array().rowwise() *= (c.inv_std.array() / n);
  return dx;
}

void BatchNorm::UpdateRunning(ParamStore& buffers, const Cache& c,
                              double momentum, bool unbiased) const {
  if (!c.train) return;
  const double n = static_cast<double>(c.xhat.rows());
  const double scale = unbiased && n > 1 ? n / (n - 1.0) : 1.0;
  buffers[mean_] = (1.0 - momentum) * buffers[mean_] + momentum * c.mean;
  buffers[var_] = (1.0 - momentum) * buffers[var_] + momentum * scale * c.var;
}

// Pointwise

Pointwise::Pointwise(ParamStore& params, const std::string& name, int i, int o)
    : in(i), out(o) {
  weight_ = params.Add(name + ".weight", i, o);
  bias_ = params.Add(name + ".bias", 1, o);
}

void Pointwise::Init(ParamStore& params, Rng& rng) const {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  FillUniform(params[weight_], bound, rng);
  FillUniform(params[bias_], bound, rng);
}

Matrix Pointwise::Forward(const ParamStore& params, const Matrix& x,
                          MacCounter* macs) const {
  if (macs) macs->macs += static_cast<int64_t>(x.rows()) * in * out;
  Matrix y = x * params[weight_];
  y.rowwise() += params[bias_].row(0);
  return y;
}

Matrix Pointwise::Backward(const ParamStore& params, const Matrix& x,
                           const Matrix& dy, Grads& grads) const {
  grads[weight_].noalias() += x.transpose() * dy;
  grads[bias_] += dy.colwise().sum();
  return dy * params[weight_].transpose();
}

// StridedConv

StridedConv::StridedConv(ParamStore& params, const std::string& name, int i,
                         int o, int k, int s)
    : in(i), out(o), kernel(k), stride(s) {
  weight_ = params.Add(name + ".weight", k * i, o);
  bias_ = params.Add(name + ".bias", 1, o);
}

void StridedConv::Init(ParamStore& params, Rng& rng) const {
  const double bound = 1.0 / std::sqrt(static_cast<double>(kernel * in));
  FillUniform(params[weight_], bound, rng);
  FillUniform(params[bias_], bound, rng);
}

int StridedConv::OutFrames(int frames) const {
  return frames < kernel ? 0 : (frames - kernel) / stride + 1;
}

Matrix StridedConv::Forward(const ParamStore& params, const Matrix& x,
                            int batch, int frames, MacCounter* macs) const {
  const int tout = OutFrames(frames);
  if (tout < 1) {
    throw DataError("sequence of " + std::to_string(frames) +
                    " frames is shorter than the initial kernel");
  }
  Matrix y(static_cast<Eigen::Index>(batch) * tout, out);
  using Cols = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;
  for (int b = 0; b < batch; ++b) {
    // Consecutive frames are contiguous, so the im2col view is a strided
    // map over the input rows.
    Cols cols(x.data() + static_cast<Eigen::Index>(b) * frames * in, tout,
              kernel * in, Eigen::OuterStride<>(stride * in));
    y.middleRows(static_cast<Eigen::Index>(b) * tout, tout).noalias() =
        cols * params[weight_];
  }
  y.rowwise() += params[bias_].row(0);
  if (macs) {
    macs->macs += static_cast<int64_t>(batch) * tout * kernel * in * out;
  }
  return y;
}

Matrix StridedConv::Backward(const ParamStore& params, const Matrix& x,
                             int batch, int frames, const Matrix& dy,
                             Grads& grads) const {
  const int tout = OutFrames(frames);
  Matrix dx = Matrix::Zero(x.rows(), x.cols());
  using Cols = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;
  grads[bias_] += dy.colwise().sum();
  for (int b = 0; b < batch; ++b) {
    const auto dyb = dy.middleRows(static_cast<Eigen::Index>(b) * tout, tout);
    Cols cols(x.data() + static_cast<Eigen::Index>(b) * frames * in, tout,
              kernel * in, Eigen::OuterStride<>(stride * in));
    grads[weight_].noalias() += cols.transpose() * dyb;
    const Matrix dcols = dyb * params[weight_].transpose();
    for (int t = 0; t < tout; ++t) {
      double* dst = dx.data() +
                    (static_cast<Eigen::Index>(b) * frames + t * stride) * in;
      const double* src = dcols.data() + static_cast<Eigen::Index>(t) *
                                             kernel * in;
      for (int i = 0; i < kernel * in; ++i) dst[i] += src[i];
    }
  }
  return dx;
}

// CausalDepthwise

CausalDepthwise::CausalDepthwise(ParamStore& params, const std::string& name,
                                 int c, int k, int d)
    : channels(c), kernel(k), dilation(d) {
  weight_ = params.Add(name + ".weight", k, c);
  bias_ = params.Add(name + ".bias", 1, c);
}

void CausalDepthwise::Init(ParamStore& params, Rng& rng) const {
  const double bound = 1.0 / std::sqrt(static_cast<double>(kernel));
  FillUniform(params[weight_], bound, rng);
  FillUniform(params[bias_], bound, rng);
}

Matrix CausalDepthwise::Forward(const ParamStore& params, const Matrix& x,
                                int batch, int frames, MacCounter* macs) const {
  Matrix y(x.rows(), x.cols());
  y.rowwise() = params[bias_].row(0);
  const Matrix& w = params[weight_];
  for (int b = 0; b < batch; ++b) {
    const Eigen::Index base = static_cast<Eigen::Index>(b) * frames;
    for (int j = 0; j < kernel; ++j) {
      const int lag = j * dilation;
      if (lag >= frames) break;
      y.middleRows(base + lag, frames - lag).array() +=
          x.middleRows(base, frames - lag).array().rowwise() *
          w.row(j).array();
    }
  }
  if (macs) {
    macs->macs += static_cast<int64_t>(x.rows()) * kernel * channels;
  }
  return y;
}

Matrix CausalDepthwise::Backward(const ParamStore& params, const Matrix& x,
                                 int batch, int frames, const Matrix& dy,
                                 Grads& grads) const {
  Matrix dx = Matrix::Zero(x.rows(), x.cols());
  const Matrix& w = params[weight_];
  grads[bias_] += dy.colwise().sum();
  for (int b = 0; b < batch; ++b) {
    const Eigen::Index base = static_cast<Eigen::Index>(b) * frames;
    for (int j = 0; j < kernel; ++j) {
      const int lag = j * dilation;
      if (lag >= frames) break;
      const auto dyj = dy.middleRows(base + lag, frames - lag).array();
      grads[weight_].row(j).array() +=
          (dyj * x.middleRows(base, frames - lag).array()).colwise().sum();
      dx.middleRows(base, frames - lag).array() +=
          dyj.rowwise() * w.row(j).array();
    }
  }
  return dx;
}

// PRelu

PRelu::PRelu(ParamStore& params, const std::string& name) {
  slope_ = params.Add(name + ".slope", 1, 1);
  params[slope_](0, 0) = 0.25;
}

Matrix PRelu::Forward(const ParamStore& params, const Matrix& x) const {
  const double a = params[slope_](0, 0);
  return x.unaryExpr([a](double v) { return v > 0.0 ? v : a * v; });
}

Matrix PRelu::Backward(const ParamStore& params, const Matrix& x,
                       const Matrix& dy, Grads& grads) const {
  const double a = params[slope_](0, 0);
  grads[slope_](0, 0) += (dy.array() * x.array().min(0.0)).sum();
  return (x.array() > 0.0).select(dy, a * dy);
}

// ResBlock

ResBlock::ResBlock(ParamStore& params, ParamStore& buffers,
                   const std::string& name, int d, int h, int k, int dil)
    : pw1_(params, name + ".pw1", d, h),
      pw2_(params, name + ".pw2", h, d),
      act1_(params, name + ".act1"),
      act2_(params, name + ".act2"),
      bn1_(params, buffers, name + ".bn1", h),
      bn2_(params, buffers, name + ".bn2", h),
      dw_(params, name + ".dw", h, k, dil) {}

void ResBlock::Init(ParamStore& params, Rng& rng) const {
  pw1_.Init(params, rng);
  dw_.Init(params, rng);
  pw2_.Init(params, rng);
}

Matrix ResBlock::Forward(const ParamStore& params, const ParamStore& buffers,
                         const Matrix& x, int batch, int frames, bool train,
                         Cache* c, MacCounter* macs) const {
  Matrix h1 = pw1_.Forward(params, x, macs);
  Matrix n1 = bn1_.Forward(params, buffers, act1_.Forward(params, h1), train,
                           c ? &c->bn1 : nullptr);
  Matrix d = dw_.Forward(params, n1, batch, frames, macs);
  Matrix n2 = bn2_.Forward(params, buffers, act2_.Forward(params, d), train,
                           c ? &c->bn2 : nullptr);
  Matrix y = pw2_.Forward(params, n2, macs);
  y += x;
  if (c) {
    c->x = x;
    c->h1 = std::move(h1);
    c->n1 = std::move(n1);
    c->d = std::move(d);
    c->n2 = std::move(n2);
  }
  return y;
}

Matrix ResBlock::Backward(const ParamStore& params, const Cache& c, int batch,
                          int frames, const Matrix& dy, Grads& grads) const {
  Matrix g = pw2_.Backward(params, c.n2, dy, grads);
  g = bn2_.Backward(params, c.bn2, g, grads);
  g = act2_.Backward(params, c.d, g, grads);
  g = dw_.Backward(params, c.n1, batch, frames, g, grads);
  g = bn1_.Backward(params, c.bn1, g, grads);
  g = act1_.Backward(params, c.h1, g, grads);
  Matrix dx = pw1_.Backward(params, c.x, g, grads);
  dx += dy;
  return dx;
}

void ResBlock::UpdateRunning(ParamStore& buffers, const Cache& c,
                             double momentum, bool unbiased) const {
  bn1_.UpdateRunning(buffers, c.bn1, momentum, unbiased);
  bn2_.UpdateRunning(buffers, c.bn2, momentum, unbiased);
}

// Pooling and augmentation

Matrix MaxPoolTime(const Matrix& s, int batch, int frames,
                   std::vector<int>* argmax_rows) {
  if (frames < 1) throw DataError("max pooling over zero frames");
  Matrix out(batch, s.cols());
  if (argmax_rows) argmax_rows->assign(static_cast<size_t>(batch) * s.cols(), 0);
  for (int b = 0; b < batch; ++b) {
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      Eigen::Index best = static_cast<Eigen::Index>(b) * frames;
      for (int t = 1; t < frames; ++t) {
        const Eigen::Index row = static_cast<Eigen::Index>(b) * frames + t;
        if (s(row, c) > s(best, c)) best = row;
      }
      out(b, c) = s(best, c);
      if (argmax_rows) {
        (*argmax_rows)[static_cast<size_t>(b) * s.cols() + c] =
            static_cast<int>(best);
      }
    }
  }
  return out;
}

Matrix SpecAugmentMask(int frames, int features, Rng& rng,
                       const SpecAugmentPolicy& policy) {
  Matrix mask = Matrix::Ones(frames, features);
  for (int i = 0; i < policy.freq_masks; ++i) {
    const int w = UniformInt(rng, 0, std::min(policy.max_freq_width, features));
    const int f0 = UniformInt(rng, 0, features - w);
    mask.middleCols(f0, w).setZero();
  }
  for (int i = 0; i < policy.time_masks; ++i) {
    const int w = UniformInt(rng, 0, std::min(policy.max_time_width, frames));
    const int t0 = UniformInt(rng, 0, frames - w);
    mask.middleRows(t0, w).setZero();
  }
  return mask;
}

}  // namespace iaec
