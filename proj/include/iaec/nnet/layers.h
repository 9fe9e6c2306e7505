// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_NNET_LAYERS_H_
#define IAEC_NNET_LAYERS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "iaec/rng.h"

namespace iaec {

// Activations are stacked per example: a batch of B sequences of T frames
// and C channels is a (B*T) x C row-major matrix.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

struct Tensor {
  std::string name;
  Matrix value;
};

class ParamStore {
 public:
  int Add(const std::string& name, int rows, int cols);
  Matrix& operator[](int i) { return tensors_[i].value; }
  const Matrix& operator[](int i) const { return tensors_[i].value; }
  int size() const { return static_cast<int>(tensors_.size()); }
  const std::string& name(int i) const { return tensors_[i].name; }
  int Find(const std::string& name) const;  // -1 when absent
  int64_t NumElements() const;
  std::vector<Tensor>& tensors() { return tensors_; }
  const std::vector<Tensor>& tensors() const { return tensors_; }

 private:
  std::vector<Tensor> tensors_;
};

// Same layout as a ParamStore, one matrix per tensor.
using Grads = std::vector<Matrix>;
Grads ZeroGrads(const ParamStore& p);

// Counts multiply-accumulates as layers run.
struct MacCounter {
  int64_t macs = 0;
};

// Per-channel batch norm. Training uses batch statistics over all rows;
// running statistics are updated separately.
class BatchNorm {
 public:
  struct Cache {
    Matrix xhat;
    RowVector mean, var, inv_std;
    bool train = false;
  };

  BatchNorm() = default;
  BatchNorm(ParamStore& params, ParamStore& buffers, const std::string& name,
            int channels);

  Matrix Forward(const ParamStore& params, const ParamStore& buffers,
                 const Matrix& x, bool train, Cache* cache) const;
  Matrix Backward(const ParamStore& params, const Cache& cache,
                  const Matrix& dy, Grads& grads) const;
  // momentum = 1 with unbiased = false copies the batch statistics.
  void UpdateRunning(ParamStore& buffers, const Cache& cache, double momentum,
                     bool unbiased = true) const;

  int gamma() const { return gamma_; }
  int beta() const { return beta_; }
  int channels = 0;
  double eps = 1e-5;

 private:
  int gamma_ = -1, beta_ = -1, mean_ = -1, var_ = -1;
};

// y = x W + b applied per frame. W is in x out.
class Pointwise {
 public:
  Pointwise() = default;
  Pointwise(ParamStore& params, const std::string& name, int in, int out);

  Matrix Forward(const ParamStore& params, const Matrix& x,
                 MacCounter* macs) const;
  // Accumulates into grads and returns dL/dx.
  Matrix Backward(const ParamStore& params, const Matrix& x, const Matrix& dy,
                  Grads& grads) const;
  void Init(ParamStore& params, Rng& rng) const;

  int weight() const { return weight_; }
  int bias() const { return bias_; }
  int in = 0, out = 0;

 private:
  int weight_ = -1, bias_ = -1;
};

// Valid strided convolution over time. The weight is (kernel*in) x out with
// row j*in + c holding tap j of input channel c.
class StridedConv {
 public:
  StridedConv() = default;
  StridedConv(ParamStore& params, const std::string& name, int in, int out,
              int kernel, int stride);

  int OutFrames(int frames) const;
  Matrix Forward(const ParamStore& params, const Matrix& x, int batch,
                 int frames, MacCounter* macs) const;
  Matrix Backward(const ParamStore& params, const Matrix& x, int batch,
                  int frames, const Matrix& dy, Grads& grads) const;
  void Init(ParamStore& params, Rng& rng) const;

  int weight() const { return weight_; }
  int in = 0, out = 0, kernel = 0, stride = 1;

 private:
  int weight_ = -1, bias_ = -1;
};

// Causal dilated depthwise convolution:
//   y[t, c] = sum_j w[j, c] x[t - j*dilation, c] + b[c], x zero before t = 0.
class CausalDepthwise {
 public:
  CausalDepthwise() = default;
  CausalDepthwise(ParamStore& params, const std::string& name, int channels,
                  int kernel, int dilation);

  Matrix Forward(const ParamStore& params, const Matrix& x, int batch,
                 int frames, MacCounter* macs) const;
  Matrix Backward(const ParamStore& params, const Matrix& x, int batch,
                  int frames, const Matrix& dy, Grads& grads) const;
  void Init(ParamStore& params, Rng& rng) const;

  int channels = 0, kernel = 0, dilation = 1;

 private:
  int weight_ = -1, bias_ = -1;
};

// Single shared slope.
class PRelu {
 public:
  PRelu() = default;
  PRelu(ParamStore& params, const std::string& name);

  Matrix Forward(const ParamStore& params, const Matrix& x) const;
  Matrix Backward(const ParamStore& params, const Matrix& x, const Matrix& dy,
                  Grads& grads) const;
  int slope() const { return slope_; }

 private:
  int slope_ = -1;
};

// x -> pointwise D->H -> PReLU -> BN -> causal depthwise -> PReLU -> BN ->
// pointwise H->D, plus the input.
class ResBlock {
 public:
  struct Cache {
    Matrix x, h1, n1, d, n2;
    BatchNorm::Cache bn1, bn2;
  };

  ResBlock() = default;
  ResBlock(ParamStore& params, ParamStore& buffers, const std::string& name,
           int bottleneck, int hidden, int kernel, int dilation);

  Matrix Forward(const ParamStore& params, const ParamStore& buffers,
                 const Matrix& x, int batch, int frames, bool train,
                 Cache* cache, MacCounter* macs) const;
  Matrix Backward(const ParamStore& params, const Cache& cache, int batch,
                  int frames, const Matrix& dy, Grads& grads) const;
  void UpdateRunning(ParamStore& buffers, const Cache& cache, double momentum,
                     bool unbiased) const;
  void Init(ParamStore& params, Rng& rng) const;

 private:
  Pointwise pw1_, pw2_;
  PRelu act1_, act2_;
  BatchNorm bn1_, bn2_;
  CausalDepthwise dw_;
};

// Per-example max over time of (B*T) x C frame scores. Ties go to the
// earliest frame.
Matrix MaxPoolTime(const Matrix& frames_scores, int batch, int frames,
                   std::vector<int>* argmax_rows = nullptr);

struct SpecAugmentPolicy {
  int freq_masks = 2;
  int max_freq_width = 8;
  int time_masks = 2;
  int max_time_width = 16;

  bool identity() const {
    return (freq_masks == 0 || max_freq_width == 0) &&
           (time_masks == 0 || max_time_width == 0);
  }
};

// 0/1 mask for one T x F sequence. Widths are drawn uniformly from
// {0..max}, starts uniformly over the valid range.
Matrix SpecAugmentMask(int frames, int features, Rng& rng,
                       const SpecAugmentPolicy& policy);

}  // namespace iaec

#endif  // IAEC_NNET_LAYERS_H_
