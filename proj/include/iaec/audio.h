// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_AUDIO_H_
#define IAEC_AUDIO_H_

#include <cstddef>
#include <span>
#include <vector>

namespace iaec {

inline constexpr int kSampleRate = 16000;

// Mono signal at the fixed 16 kHz rate. Samples are nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  AudioBuffer() = default;
  explicit AudioBuffer(std::vector<double> s, int rate = kSampleRate)
      : samples(std::move(s)), sample_rate(rate) {}
  static AudioBuffer Zeros(size_t n) {
    return AudioBuffer(std::vector<double>(n, 0.0));
  }

  size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::span<const double> view() const { return samples; }
  double seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }

  // Throws DataError on a wrong rate or non-finite samples.
  void Validate() const;
};

double Energy(std::span<const double> x);
double MeanPower(std::span<const double> x);

}  // namespace iaec

#endif  // IAEC_AUDIO_H_
