// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>

#include "iaec/aec.h"
#include "iaec/errors.h"

namespace iaec {

void NlmsConfig::Validate() const {
  if (taps_per_bin < 1) throw ConfigError("nlms taps_per_bin must be >= 1");
  if (!(step_mu > 0.0 && step_mu <= 2.0)) {
    throw ConfigError("nlms step_mu must lie in (0, 2]");
  }
  if (!(eps > 0.0)) throw ConfigError("nlms eps must be positive");
  if (!SatisfiesCola(window_kind, window, hop)) {
    throw ConfigError("nlms window/hop pair does not overlap-add");
  }
}

NlmsCanceller::NlmsCanceller(const NlmsConfig& cfg) : cfg_(cfg) {
  cfg_.Validate();
}

void NlmsCanceller::Reset() {
  weights_.resize(0, 0);
  history_.resize(0, 0);
}

void NlmsCanceller::EnsureState(int bins) {
  if (weights_.rows() == 0) {
    weights_ = ComplexMatrix::Zero(bins, cfg_.taps_per_bin);
  }
  if (history_.rows() == 0) {
    history_ = ComplexMatrix::Zero(bins, cfg_.taps_per_bin);
  }
  if (weights_.rows() != bins || weights_.cols() != cfg_.taps_per_bin) {
    throw ConfigError("nlms weights have the wrong shape");
  }
}

Spectrogram NlmsCanceller::Process(const Spectrogram& mixture,
                                   const Spectrogram& reference) {
  if (mixture.num_frames() != reference.num_frames() ||
      mixture.num_bins() != reference.num_bins()) {
    throw DataError("nlms mixture and reference framing differ");
  }
  const int bins = mixture.num_bins();
  const int taps = cfg_.taps_per_bin;
  EnsureState(bins);
  Spectrogram out = mixture;
  for (int t = 0; t < mixture.num_frames(); ++t) {
    for (int k = 0; k < bins; ++k) {
      Complex* h = &history_(k, 0);
      std::move_backward(h, h + taps - 1, h + taps);
      h[0] = reference.frames(t, k);
      Complex* w = &weights_(k, 0);
      Complex est = 0.0;
      double norm = 0.0;
      for (int i = 0; i < taps; ++i) {
        est += std::conj(w[i]) * h[i];
        norm += std::norm(h[i]);
      }
      const Complex e = mixture.frames(t, k) - est;
      out.frames(t, k) = e;
      if (adapt_) {
        const Complex step = cfg_.step_mu * std::conj(e) / (norm + cfg_.eps);
        for (int i = 0; i < taps; ++i) w[i] += h[i] * step;
      }
    }
  }
  return out;
}

AudioBuffer NlmsCanceller::Run(const AudioBuffer& mixture,
                               const AudioBuffer& reference) {
  const size_t len = std::max(mixture.size(), reference.size());
  const size_t lead = cfg_.window - cfg_.hop;
  size_t padded = lead + len + lead;
  const size_t rem = (padded - cfg_.window) % cfg_.hop;
  if (rem != 0) padded += cfg_.hop - rem;
  auto pad = [&](const AudioBuffer& x) {
    AudioBuffer p = AudioBuffer::Zeros(padded);
    std::copy(x.samples.begin(), x.samples.end(), p.samples.begin() + lead);
    return p;
  };
  const Spectrogram y = Stft(pad(mixture), cfg_.window, cfg_.hop,
                             cfg_.window_kind);
  const Spectrogram r = Stft(pad(reference), cfg_.window, cfg_.hop,
                             cfg_.window_kind);
  const AudioBuffer e = Istft(Process(y, r));
  AudioBuffer out = AudioBuffer::Zeros(mixture.size());
  std::copy_n(e.samples.begin() + lead, mixture.size(), out.samples.begin());
  return out;
}

AudioBuffer NlmsCancel(const AudioBuffer& mixture, const AudioBuffer& reference,
                       const NlmsConfig& cfg) {
  NlmsCanceller nlms(cfg);
  return nlms.Run(mixture, reference);
}

double ErleDb(std::span<const double> before, std::span<const double> after) {
  const double pb = MeanPower(before), pa = MeanPower(after);
  if (pa <= 0.0) return pb > 0.0 ? INFINITY : 0.0;
  if (pb <= 0.0) return -INFINITY;
  return 10.0 * std::log10(pb / pa);
}

}  // namespace iaec
