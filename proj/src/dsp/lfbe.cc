// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>

#include "iaec/dsp.h"
#include "iaec/errors.h"

namespace iaec {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

RealMatrix MelFilterbank(int num_mel, int fft_len, double low_hz,
                         double high_hz, int sample_rate) {
  if (num_mel < 1 || fft_len < 2 || !(low_hz >= 0.0) || !(high_hz > low_hz) ||
      high_hz > sample_rate / 2.0) {
    throw ConfigError("invalid Mel filterbank configuration");
  }
  const int num_bins = fft_len / 2 + 1;
  const double mel_lo = HzToMel(low_hz);
  const double mel_hi = HzToMel(high_hz);
  const double step = (mel_hi - mel_lo) / (num_mel + 1);
  RealMatrix fb = RealMatrix::Zero(num_mel, num_bins);
  // Triangles are linear in the mel domain, so neighbouring filters sum to
  // one between the first and last centre frequency.
  for (int m = 0; m < num_mel; ++m) {
    const double left = mel_lo + m * step;
    const double centre = left + step;
    const double right = centre + step;
    for (int k = 0; k < num_bins; ++k) {
      const double mel =
          HzToMel(static_cast<double>(k) * sample_rate / fft_len);
      double w = 0.0;
      if (mel > left && mel <= centre) {
        w = (mel - left) / step;
      } else if (mel > centre && mel < right) {
        w = (right - mel) / step;
      }
      fb(m, k) = w;
    }
  }
  return fb;
}

FeatureSequence LfbeFromSpectrogram(const Spectrogram& spec,
                                    const LfbeOptions& opts) {
  if (spec.window_len != opts.window_len || spec.hop != opts.hop) {
    throw ConfigError("spectrogram framing does not match LFBE options");
  }
  if (!(opts.energy_floor > 0.0)) {
    throw ConfigError("LFBE energy floor must be positive");
  }
  const RealMatrix fb = MelFilterbank(opts.num_mel, opts.window_len,
                                      opts.low_hz, opts.high_hz);
  const RealMatrix power = spec.frames.cwiseAbs2();
  FeatureSequence feats;
  feats.values = power * fb.transpose();
  feats.values = feats.values.cwiseMax(opts.energy_floor).array().log();
  return feats;
}

FeatureSequence Lfbe(const AudioBuffer& audio, const LfbeOptions& opts) {
  return LfbeFromSpectrogram(
      Stft(audio, opts.window_len, opts.hop, opts.window), opts);
}

}  // namespace iaec
