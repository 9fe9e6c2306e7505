// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_AEC_H_
#define IAEC_AEC_H_

#include <span>
#include <vector>

#include "iaec/audio.h"
#include "iaec/dsp.h"

namespace iaec {

struct NlmsConfig {
  int taps_per_bin = 32;
  double step_mu = 0.5;
  int window = 512;
  int hop = 128;
  WindowKind window_kind = WindowKind::kSqrtHann;
  double eps = 1e-10;

  void Validate() const;
};

// Subband NLMS. Each bin keeps a complex filter over the most recent
// taps_per_bin reference frames:
//   e(t) = Y(t) - w^H R(t..t-L+1)
//   w   += mu R e* / (|R|^2 + eps)
// State persists across Process calls, so a long signal may be fed in
// pieces.
class NlmsCanceller {
 public:
  explicit NlmsCanceller(const NlmsConfig& cfg = {});

  // Y and R must share framing. Returns the error spectrogram E.
  Spectrogram Process(const Spectrogram& mixture, const Spectrogram& reference);

  // Pads the front by window - hop samples and the tail to a whole frame so
  // every input sample is reconstructed from a full set of overlapping
  // frames, then trims back to the mixture length.
  AudioBuffer Run(const AudioBuffer& mixture, const AudioBuffer& reference);

  void set_adapt(bool adapt) { adapt_ = adapt; }
  bool adapt() const { return adapt_; }
  // bins x taps; row k holds w_k, newest reference frame first.
  const ComplexMatrix& weights() const { return weights_; }
  void set_weights(const ComplexMatrix& w) { weights_ = w; }
  void Reset();

  const NlmsConfig& config() const { return cfg_; }

 private:
  void EnsureState(int bins);

  NlmsConfig cfg_;
  bool adapt_ = true;
  ComplexMatrix weights_;
  ComplexMatrix history_;  // bins x taps, newest first
};

AudioBuffer NlmsCancel(const AudioBuffer& mixture, const AudioBuffer& reference,
                       const NlmsConfig& cfg = {});

struct WienerConfig {
  int min_lag = -256;
  int max_lag = 255;  // inclusive; taps = max_lag - min_lag + 1
  // Tikhonov weight as a fraction of the mean diagonal of the Gram matrix.
  double regularizer = 1e-6;

  int taps() const { return max_lag - min_lag + 1; }
  void Validate() const;
};

struct WienerResult {
  AudioBuffer output;
  std::vector<double> filter;  // filter[i] is the weight at lag min_lag + i
};

// Least-squares FIR over the lag range fitted to the oracle interferer
// y - target: minimises sum_n (nhat[n] - sum_l w_l r[n - l])^2 over the
// signal support with r zero outside it. Output is y - w * r.
WienerResult WienerOracleCancel(const AudioBuffer& mixture,
                                const AudioBuffer& reference,
                                const AudioBuffer& target,
                                const WienerConfig& cfg = {});

// sum_l w_l r[n - l] for n in [0, len(r)).
std::vector<double> ApplyLagFilter(std::span<const double> reference,
                                   std::span<const double> filter, int min_lag);

// 10 log10(P(before) / P(after)).
double ErleDb(std::span<const double> before, std::span<const double> after);

}  // namespace iaec

#endif  // IAEC_AEC_H_
