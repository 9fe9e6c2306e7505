// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dsp/fft.h"
#include "iaec/dsp.h"
#include "iaec/errors.h"

namespace iaec {
namespace {

// Per-phase sums of w^2 over all overlapping frames.
std::vector<double> OverlapGain(const std::vector<double>& w, int hop) {
  std::vector<double> gain(hop, 0.0);
  for (size_t n = 0; n < w.size(); ++n) gain[n % hop] += w[n] * w[n];
  return gain;
}

}  // namespace

std::vector<double> MakeWindow(WindowKind kind, int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
    w[i] = kind == WindowKind::kSqrtHann ? std::sqrt(hann) : hann;
  }
  return w;
}

bool SatisfiesCola(WindowKind kind, int window_len, int hop) {
  if (hop <= 0 || hop > window_len) return false;
  std::vector<double> gain = OverlapGain(MakeWindow(kind, window_len), hop);
  auto [lo, hi] = std::minmax_element(gain.begin(), gain.end());
  return *hi > 0.0 && (*hi - *lo) <= 1e-10 * *hi;
}

Spectrogram Stft(const AudioBuffer& audio, int window_len, int hop,
                 WindowKind kind) {
  if (window_len <= 0 || window_len % 2 != 0) {
    throw ConfigError("STFT window length must be positive and even");
  }
  if (hop <= 0 || hop > window_len) {
    throw ConfigError("STFT hop must be in (0, window_len]");
  }
  if (audio.size() < static_cast<size_t>(window_len)) {
    throw ShortInputError("signal of " + std::to_string(audio.size()) +
                          " samples is shorter than one " +
                          std::to_string(window_len) + "-sample window");
  }
  const int num_frames =
      static_cast<int>((audio.size() - window_len) / hop) + 1;
  const int num_bins = window_len / 2 + 1;
  const std::vector<double> window = MakeWindow(kind, window_len);
  internal::RealFft fft(window_len);

  Spectrogram spec;
  spec.frames.resize(num_frames, num_bins);
  spec.window_len = window_len;
  spec.hop = hop;
  spec.window_kind = kind;
  spec.num_samples = audio.size();

  std::vector<double> frame(window_len);
  std::vector<Complex> bins(num_bins);
  for (int t = 0; t < num_frames; ++t) {
    const double* src = audio.samples.data() + static_cast<size_t>(t) * hop;
    for (int n = 0; n < window_len; ++n) frame[n] = src[n] * window[n];
    fft.Forward(frame, bins);
    for (int k = 0; k < num_bins; ++k) spec.frames(t, k) = bins[k];
  }
  return spec;
}

AudioBuffer Istft(const Spectrogram& spec) {
  const int n = spec.window_len;
  const int hop = spec.hop;
  if (n <= 0 || hop <= 0 || spec.num_bins() != n / 2 + 1) {
    throw ConfigError("inconsistent spectrogram shape");
  }
  if (!SatisfiesCola(spec.window_kind, n, hop)) {
    throw ConfigError("window/hop pair " + std::to_string(n) + "/" +
                      std::to_string(hop) +
                      " does not overlap-add to a constant");
  }
  const std::vector<double> window = MakeWindow(spec.window_kind, n);
  const std::vector<double> gain = OverlapGain(window, hop);
  double norm = 0.0;
  for (double g : gain) norm += g;
  norm /= hop;

  const size_t covered =
      spec.num_frames() > 0
          ? static_cast<size_t>(spec.num_frames() - 1) * hop + n
          : 0;
  std::vector<double> out(std::max(covered, spec.num_samples), 0.0);
  internal::RealFft fft(n);
  std::vector<Complex> bins(spec.num_bins());
  std::vector<double> frame(n);
  for (int t = 0; t < spec.num_frames(); ++t) {
    for (int k = 0; k < spec.num_bins(); ++k) bins[k] = spec.frames(t, k);
    fft.Inverse(bins, frame);
    double* dst = out.data() + static_cast<size_t>(t) * hop;
    for (int i = 0; i < n; ++i) dst[i] += frame[i] * window[i] / (n * norm);
  }
  if (spec.num_samples > 0) out.resize(spec.num_samples);
  return AudioBuffer(std::move(out));
}

}  // namespace iaec
