// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/audio.h"

#include <cmath>
#include <string>

#include "iaec/errors.h"

namespace iaec {

void AudioBuffer::Validate() const {
  if (sample_rate != kSampleRate) {
    throw DataError("unsupported sample rate " + std::to_string(sample_rate) +
                    " (only 16000 Hz)");
  }
  for (size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw DataError("non-finite sample at index " + std::to_string(i));
    }
  }
}

double Energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

double MeanPower(std::span<const double> x) {
  return x.empty() ? 0.0 : Energy(x) / static_cast<double>(x.size());
}

}  // namespace iaec
