// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_DSP_H_
#define IAEC_DSP_H_

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "iaec/audio.h"

namespace iaec {

using Complex = std::complex<double>;
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class WindowKind { kHann, kSqrtHann };

// Periodic window of length n.
std::vector<double> MakeWindow(WindowKind kind, int n);

// T x (window_len / 2 + 1) one-sided spectra. Frames start at sample 0 with
// no centre padding, so T = floor((len - window_len) / hop) + 1.
struct Spectrogram {
  ComplexMatrix frames;
  int window_len = 0;
  int hop = 0;
  WindowKind window_kind = WindowKind::kHann;
  // Length of the analysed signal; istft reproduces this many samples.
  size_t num_samples = 0;

  int num_frames() const { return static_cast<int>(frames.rows()); }
  int num_bins() const { return static_cast<int>(frames.cols()); }
};

// T x F log Mel energies.
struct FeatureSequence {
  RealMatrix values;

  int num_frames() const { return static_cast<int>(values.rows()); }
  int num_features() const { return static_cast<int>(values.cols()); }
};

Spectrogram Stft(const AudioBuffer& audio, int window_len, int hop,
                 WindowKind kind);

// Weighted overlap-add with the analysis window reused for synthesis. Throws
// ConfigError when the squared window does not overlap-add to a constant.
AudioBuffer Istft(const Spectrogram& spec);

// Returns true when sum_k w[n + k*hop]^2 is constant in n.
bool SatisfiesCola(WindowKind kind, int window_len, int hop);

struct LfbeOptions {
  int window_len = 400;  // 25 ms
  int hop = 160;         // 10 ms
  int num_mel = 64;
  double low_hz = 0.0;
  double high_hz = 8000.0;
  double energy_floor = 1e-7;
  WindowKind window = WindowKind::kHann;
};

double HzToMel(double hz);
double MelToHz(double mel);

// num_mel x (fft_len / 2 + 1) triangular filters, HTK mel scale, unit peak.
RealMatrix MelFilterbank(int num_mel, int fft_len, double low_hz,
                         double high_hz, int sample_rate = kSampleRate);

FeatureSequence Lfbe(const AudioBuffer& audio, const LfbeOptions& opts = {});
// Same pipeline starting from an already computed STFT (used by the
// STFT-domain augmentation). The spectrogram framing must match opts.
FeatureSequence LfbeFromSpectrogram(const Spectrogram& spec,
                                    const LfbeOptions& opts = {});

// Full linear convolution, length len(signal) + len(kernel) - 1. Long inputs
// go through an FFT; short ones are computed directly.
std::vector<double> Convolve(std::span<const double> signal,
                             std::span<const double> kernel);
AudioBuffer FirConvolve(const AudioBuffer& signal,
                        std::span<const double> kernel);

}  // namespace iaec

#endif  // IAEC_DSP_H_
