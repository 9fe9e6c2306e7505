// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "dsp/fft.h"
#include "iaec/dsp.h"
#include "iaec/errors.h"
#include "iaec/wav.h"
#include "testing/test_util.h"

namespace iaec {
namespace {

using testing::Gaussian;
using testing::Noise;
constexpr double kPi = std::numbers::pi;

// O(N^2) DFT of one windowed frame.
std::vector<Complex> NaiveDft(const std::vector<double>& x) {
  const size_t n = x.size();
  std::vector<Complex> out(n / 2 + 1);
  for (size_t k = 0; k < out.size(); ++k) {
    Complex acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
      acc += x[i] * std::polar(1.0, -2.0 * kPi * static_cast<double>(k * i) / n);
    }
    out[k] = acc;
  }
  return out;
}

std::vector<double> NaiveConvolve(const std::vector<double>& x,
                                  const std::vector<double>& h) {
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (size_t n = 0; n < y.size(); ++n) {
    for (size_t k = 0; k < h.size(); ++k) {
      if (n >= k && n - k < x.size()) y[n] += h[k] * x[n - k];
    }
  }
  return y;
}

TEST(Fft, MatchesNaiveDft) {
  for (int n : {8, 30, 400, 512}) {
    const std::vector<double> x = Gaussian(n, n);
    internal::RealFft fft(n);
    std::vector<Complex> bins(n / 2 + 1);
    fft.Forward(x, bins);
    const std::vector<Complex> ref = NaiveDft(x);
    for (size_t k = 0; k < bins.size(); ++k) {
      EXPECT_NEAR(std::abs(bins[k] - ref[k]), 0.0, 1e-10) << n << " " << k;
    }
    std::vector<double> back(n);
    fft.Inverse(bins, back);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(back[i] / n, x[i], 1e-12);
  }
}

TEST(Window, PeriodicHann) {
  const auto w = MakeWindow(WindowKind::kHann, 400);
  EXPECT_EQ(w[0], 0.0);
  EXPECT_NEAR(w[200], 1.0, 1e-15);
  const auto s = MakeWindow(WindowKind::kSqrtHann, 512);
  for (int i = 0; i < 512; ++i) {
    EXPECT_NEAR(s[i] * s[i], 0.5 - 0.5 * std::cos(2 * kPi * i / 512), 1e-15);
  }
}

TEST(Window, Cola) {
  EXPECT_TRUE(SatisfiesCola(WindowKind::kSqrtHann, 512, 128));
  EXPECT_TRUE(SatisfiesCola(WindowKind::kHann, 400, 100));
  EXPECT_FALSE(SatisfiesCola(WindowKind::kHann, 400, 160));
}

TEST(Stft, ZeroInputFrameCount) {
  const Spectrogram s = Stft(AudioBuffer::Zeros(16000), 400, 160, WindowKind::kHann);
  EXPECT_EQ(s.num_frames(), 98);
  EXPECT_EQ(s.num_bins(), 201);
  EXPECT_EQ(s.frames.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Stft, FramesMatchNaiveDft) {
  const AudioBuffer x = Noise(2000, 3);
  const Spectrogram s = Stft(x, 400, 160, WindowKind::kHann);
  const auto w = MakeWindow(WindowKind::kHann, 400);
  for (int t : {0, 5, s.num_frames() - 1}) {
    std::vector<double> frame(400);
    for (int i = 0; i < 400; ++i) frame[i] = x.samples[t * 160 + i] * w[i];
    const auto ref = NaiveDft(frame);
    for (int k = 0; k < s.num_bins(); ++k) {
      EXPECT_NEAR(std::abs(s.frames(t, k) - ref[k]), 0.0, 1e-10);
    }
  }
}

TEST(Stft, SinePeakBin) {
  std::vector<double> x(16000);
  for (size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2 * kPi * 1000.0 * i / 16000.0);
  const Spectrogram s = Stft(AudioBuffer(x), 512, 128, WindowKind::kSqrtHann);
  // Oracle: argmax of the naive DFT of a windowed frame.
  const auto w = MakeWindow(WindowKind::kSqrtHann, 512);
  std::vector<double> frame(512);
  for (int i = 0; i < 512; ++i) frame[i] = x[i] * w[i];
  const auto ref = NaiveDft(frame);
  int ref_peak = 0;
  for (int k = 1; k < 257; ++k) {
    if (std::abs(ref[k]) > std::abs(ref[ref_peak])) ref_peak = k;
  }
  EXPECT_EQ(ref_peak, 32);
  for (int t = 0; t < s.num_frames(); ++t) {
    Eigen::Index peak;
    s.frames.row(t).cwiseAbs().maxCoeff(&peak);
    EXPECT_EQ(peak, ref_peak);
  }
}

TEST(Stft, ShortInputIsAnError) {
  EXPECT_THROW(Stft(AudioBuffer::Zeros(399), 400, 160, WindowKind::kHann),
               ShortInputError);
  EXPECT_THROW(Stft(AudioBuffer::Zeros(1000), 401, 160, WindowKind::kHann),
               ConfigError);
}

TEST(Stft, Linearity) {
  const AudioBuffer x = Noise(4000, 1), z = Noise(4000, 2);
  std::vector<double> mix(4000);
  for (int i = 0; i < 4000; ++i) mix[i] = 0.7 * x.samples[i] - 1.3 * z.samples[i];
  const auto sx = Stft(x, 512, 128, WindowKind::kSqrtHann);
  const auto sz = Stft(z, 512, 128, WindowKind::kSqrtHann);
  const auto sm = Stft(AudioBuffer(mix), 512, 128, WindowKind::kSqrtHann);
  EXPECT_LT((sm.frames - (0.7 * sx.frames - 1.3 * sz.frames)).cwiseAbs().maxCoeff(),
            1e-9);
}

TEST(Stft, ParsevalPerFrame) {
  const AudioBuffer x = Noise(3000, 4);
  const Spectrogram s = Stft(x, 400, 160, WindowKind::kHann);
  const auto w = MakeWindow(WindowKind::kHann, 400);
  for (int t = 0; t < s.num_frames(); ++t) {
    double time = 0.0;
    for (int i = 0; i < 400; ++i) {
      const double v = x.samples[t * 160 + i] * w[i];
      time += v * v;
    }
    // One-sided spectrum: DC and Nyquist once, the rest twice.
    double freq = std::norm(s.frames(t, 0)) + std::norm(s.frames(t, 200));
    for (int k = 1; k < 200; ++k) freq += 2.0 * std::norm(s.frames(t, k));
    EXPECT_NEAR(freq / 400.0, time, 1e-6 * time);
  }
}

TEST(Istft, RoundTripInterior) {
  const AudioBuffer x = Noise(16000, 5);
  const AudioBuffer y = Istft(Stft(x, 512, 128, WindowKind::kSqrtHann));
  ASSERT_EQ(y.size(), x.size());
  double err = 0.0, ref = 0.0;
  for (size_t i = 512; i + 512 < x.size(); ++i) {
    err += std::pow(y.samples[i] - x.samples[i], 2);
    ref += x.samples[i] * x.samples[i];
  }
  EXPECT_LT(std::sqrt(err / ref), 1e-6);
}

TEST(Istft, ZeroAndLocality) {
  Spectrogram s = Stft(AudioBuffer::Zeros(4096), 512, 128, WindowKind::kSqrtHann);
  EXPECT_EQ(Energy(Istft(s).samples), 0.0);
  s.frames.row(10).setConstant(Complex(1.0, 0.5));
  const AudioBuffer y = Istft(s);
  for (size_t i = 0; i < y.size(); ++i) {
    if (i < 1280 || i >= 1280 + 512) {
      EXPECT_EQ(y.samples[i], 0.0) << i;
    }
  }
  EXPECT_GT(Energy(y.samples), 0.0);
}

TEST(Istft, RejectsNonColaFraming) {
  const Spectrogram s = Stft(Noise(2000, 1), 400, 160, WindowKind::kHann);
  EXPECT_THROW(Istft(s), ConfigError);
}

TEST(Mel, HtkScale) {
  EXPECT_NEAR(HzToMel(700.0), 2595.0 * std::log10(2.0), 1e-12);
  for (double hz : {0.0, 123.0, 4000.0, 8000.0}) {
    EXPECT_NEAR(MelToHz(HzToMel(hz)), hz, 1e-9);
  }
}

TEST(Mel, FilterbankShape) {
  const RealMatrix fb = MelFilterbank(64, 400, 0.0, 8000.0);
  ASSERT_EQ(fb.rows(), 64);
  ASSERT_EQ(fb.cols(), 201);
  EXPECT_GE(fb.minCoeff(), 0.0);
  for (int m = 0; m < 64; ++m) EXPECT_GT(fb.row(m).sum(), 0.0) << m;
  // The lowest triangles are narrower than a 40 Hz bin; check overlap on a
  // grid fine enough to resolve them.
  const RealMatrix fine = MelFilterbank(64, 8192, 0.0, 8000.0);
  for (int m = 0; m + 1 < 64; ++m) {
    EXPECT_GT(fine.row(m).cwiseMin(fine.row(m + 1)).maxCoeff(), 0.0) << m;
  }
  // Unnormalised triangles sum to one between the outer centres.
  const RealMatrix colsum = fb.colwise().sum();
  const double c0 = MelToHz(HzToMel(8000.0) / 65.0);
  const double c63 = MelToHz(64.0 * HzToMel(8000.0) / 65.0);
  for (int k = 0; k < 201; ++k) {
    const double hz = k * 40.0;
    if (hz > c0 && hz < c63) {
      EXPECT_NEAR(colsum(0, k), 1.0, 1e-9) << k;
    }
  }
}

TEST(Lfbe, ZeroAudioIsFloor) {
  const FeatureSequence f = Lfbe(AudioBuffer::Zeros(16000));
  EXPECT_EQ(f.num_frames(), 98);
  EXPECT_EQ(f.num_features(), 64);
  EXPECT_DOUBLE_EQ(f.values.maxCoeff(), std::log(1e-7));
  EXPECT_DOUBLE_EQ(f.values.minCoeff(), std::log(1e-7));
}

TEST(Lfbe, MonotoneInGain) {
  const AudioBuffer x = Noise(16000, 6, 0.01);
  AudioBuffer y = x;
  for (double& v : y.samples) v *= 2.5;
  const FeatureSequence a = Lfbe(x), b = Lfbe(y);
  EXPECT_GE((b.values - a.values).minCoeff(), -1e-12);
  EXPECT_GE(a.values.minCoeff(), std::log(1e-7));
}

TEST(Convolve, ImpulseAndShift) {
  const AudioBuffer x = Noise(500, 7);
  const AudioBuffer y = FirConvolve(x, std::vector<double>{1.0});
  EXPECT_EQ(y.samples, x.samples);
  const AudioBuffer z = FirConvolve(x, std::vector<double>{0, 0, 0, 1.0});
  ASSERT_EQ(z.size(), 503u);
  for (size_t i = 0; i < 500; ++i) EXPECT_EQ(z.samples[i + 3], x.samples[i]);
  EXPECT_THROW(Convolve(x.samples, {}), ConfigError);
}

TEST(Convolve, MatchesBruteForceBothPaths) {
  const std::vector<double> h = Gaussian(64, 11, 0.3);
  for (size_t n : {1000u, 20000u}) {  // direct and FFT paths
    const std::vector<double> x = Gaussian(n, n);
    const std::vector<double> y = Convolve(x, h);
    const std::vector<double> ref = NaiveConvolve(x, h);
    ASSERT_EQ(y.size(), ref.size());
    double worst = 0.0;
    for (size_t i = 0; i < y.size(); ++i) worst = std::max(worst, std::abs(y[i] - ref[i]));
    EXPECT_LT(worst, 1e-9) << n;
  }
}

TEST(Wav, RoundTripAndFormatChecks) {
  testing::TempDir dir;
  std::vector<int16_t> pcm = {0, 1, -1, 32767, -32768, 1234};
  WriteWavPcm16(dir / "a.wav", pcm);
  EXPECT_EQ(ReadWavPcm16(dir / "a.wav"), pcm);
  const AudioBuffer a = ReadWav(dir / "a.wav");
  EXPECT_EQ(QuantizePcm16(a.samples), pcm);

  // Patch the sample rate field to 8 kHz.
  std::fstream f(dir / "a.wav", std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(24);
  const char rate[4] = {0x40, 0x1f, 0, 0};
  f.write(rate, 4);
  f.close();
  EXPECT_THROW(ReadWav(dir / "a.wav"), DataError);
  EXPECT_THROW(ReadWav(dir / "missing.wav"), DataError);
}

TEST(Wav, QuantizeClips) {
  const std::vector<double> x = {2.0, -2.0, 0.5};
  const auto q = QuantizePcm16(x);
  EXPECT_EQ(q[0], 32767);
  EXPECT_EQ(q[1], -32768);
  EXPECT_EQ(q[2], 16384);
}

TEST(Audio, ValidateRejectsNonFinite) {
  AudioBuffer a(std::vector<double>{0.0, NAN});
  EXPECT_THROW(a.Validate(), DataError);
  AudioBuffer b(std::vector<double>{0.0}, 8000);
  EXPECT_THROW(b.Validate(), DataError);
}

}  // namespace
}  // namespace iaec
