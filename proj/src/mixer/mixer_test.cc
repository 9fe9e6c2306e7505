// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/mixer.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "iaec/dsp.h"
#include "iaec/errors.h"
#include "iaec/manifest.h"
#include "testing/test_util.h"

namespace iaec {
namespace {

using testing::Noise;

double PowerDb(const std::vector<double>& a, const std::vector<double>& b) {
  return 10.0 * std::log10(MeanPower(a) / MeanPower(b));
}

TEST(SirGain, Analytic) {
  EXPECT_DOUBLE_EQ(SirGain(2.0, 2.0, 0.0), 1.0);
  EXPECT_NEAR(SirGain(2.0, 2.0, 6.0), std::pow(10.0, -6.0 / 20.0), 1e-15);
  EXPECT_NEAR(SirGain(2.0, 2.0, 6.0), 0.501187, 1e-6);
  EXPECT_THROW(SirGain(0.0, 1.0, 0.0), ZeroEnergyError);
  EXPECT_THROW(SirGain(1.0, 0.0, 0.0), ZeroEnergyError);
}

TEST(MixAtSir, RemeasuredSir) {
  const AudioBuffer u = Noise(16000, 1, 0.05), n = Noise(16000, 2, 0.3);
  for (double sir : {-20.0, -12.0, 0.0, 3.0, 17.5}) {
    const MixResult m = MixAtSir(u, n, sir);
    EXPECT_NEAR(PowerDb(u.samples, m.scaled_interferer.samples), sir, 1e-6);
    EXPECT_NEAR(MeasureSirDb(u.view(), m.scaled_interferer.view()), sir, 1e-9);
    for (size_t i = 0; i < u.size(); ++i) {
      ASSERT_NEAR(m.mixture.samples[i] - m.scaled_interferer.samples[i],
                  u.samples[i], 1e-15);
    }
  }
}

TEST(MixAtSir, OverlapOnlyAndPadding) {
  const AudioBuffer u = Noise(1000, 3), n = Noise(1500, 4);
  const MixResult m = MixAtSir(u, n, -3.0);
  ASSERT_EQ(m.mixture.size(), 1500u);
  // Power measured on the first 1000 samples only.
  std::vector<double> head(m.scaled_interferer.samples.begin(),
                           m.scaled_interferer.samples.begin() + 1000);
  EXPECT_NEAR(PowerDb(u.samples, head), -3.0, 1e-9);
  for (size_t i = 1000; i < 1500; ++i) {
    EXPECT_EQ(m.mixture.samples[i], m.scaled_interferer.samples[i]);
  }
}

TEST(MixAtSir, ZeroEnergyIsAnError) {
  EXPECT_THROW(MixAtSir(AudioBuffer::Zeros(100), Noise(100, 1), 0.0),
               ZeroEnergyError);
  EXPECT_THROW(MixAtSir(Noise(100, 1), AudioBuffer::Zeros(100), 0.0),
               ZeroEnergyError);
}

Spectrogram Spec(uint64_t seed, size_t samples = 16000) {
  return Stft(Noise(samples, seed), 400, 160, WindowKind::kHann);
}

TEST(ShiftFrames, Definition) {
  const Spectrogram r = Spec(1);
  const Spectrogram n = ShiftFrames(r, 15);
  for (int t = 0; t < 15; ++t) EXPECT_EQ(n.frames.row(t).cwiseAbs().maxCoeff(), 0.0);
  for (int t = 15; t < r.num_frames(); ++t) {
    EXPECT_EQ(n.frames.row(t), r.frames.row(t - 15));
  }
  EXPECT_THROW(ShiftFrames(r, -1), ConfigError);
}

TEST(AugmentTriplet, RolesShiftAndSir) {
  const Spectrogram u = Spec(1), r = Spec(2);
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const SpecTriplet t = AugmentTriplet(u, 7, r, rng);
    EXPECT_EQ(t.label, 7);
    EXPECT_GE(t.shift_frames, 15);
    EXPECT_LE(t.shift_frames, 20);
    EXPECT_GE(t.sir_db, -20.0);
    EXPECT_LE(t.sir_db, 3.0);
    EXPECT_EQ(t.reference.frames, r.frames);  // unshifted
    const Spectrogram& n = *t.interferer;
    for (int f = 0; f < t.shift_frames; ++f) {
      ASSERT_EQ(n.frames.row(f).cwiseAbs().maxCoeff(), 0.0);
    }
    // n is the shifted reference up to the SIR gain.
    const Complex ratio = n.frames(t.shift_frames, 3) / r.frames(0, 3);
    EXPECT_NEAR(ratio.imag(), 0.0, 1e-9);
    const ComplexMatrix expect =
        ShiftFrames(r, t.shift_frames).frames * ratio.real();
    EXPECT_LT((n.frames - expect).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(MeasureSirDb(*t.target, n), t.sir_db, 1e-6);
    EXPECT_LT((t.mixture.frames - t.target->frames - n.frames).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(AugmentTriplet, Deterministic) {
  const Spectrogram u = Spec(1), r = Spec(2);
  Rng a(11), b(11);
  const SpecTriplet x = AugmentTriplet(u, 0, r, a);
  const SpecTriplet y = AugmentTriplet(u, 0, r, b);
  EXPECT_EQ(x.shift_frames, y.shift_frames);
  EXPECT_EQ(x.sir_db, y.sir_db);
  EXPECT_EQ(x.mixture.frames, y.mixture.frames);
}

TEST(AugmentTriplet, Errors) {
  const Spectrogram u = Spec(1);
  const Spectrogram other = Stft(Noise(16000, 2), 512, 128, WindowKind::kSqrtHann);
  Rng rng(1);
  EXPECT_THROW(AugmentTriplet(u, 0, other, rng), ConfigError);
  Spectrogram silent = u;
  silent.frames.setZero();
  EXPECT_THROW(AugmentTriplet(u, 0, silent, rng), ZeroEnergyError);
  EXPECT_THROW(AugmentTriplet(silent, 0, u, rng), ZeroEnergyError);
}

// Kolmogorov-Smirnov distance against U(-20, 3) and frequency check of the
// integer shift over 10k draws.
TEST(AugmentTriplet, DrawDistributions) {
  const Spectrogram u = Spec(1, 4000), r = Spec(2, 4000);
  Rng rng(2024);
  constexpr int kN = 10000;
  std::vector<double> sirs;
  std::vector<int> counts(6, 0);
  for (int i = 0; i < kN; ++i) {
    const SpecTriplet t = AugmentTriplet(u, 0, r, rng);
    sirs.push_back(t.sir_db);
    ++counts[t.shift_frames - 15];
  }
  std::sort(sirs.begin(), sirs.end());
  double d = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double f = (sirs[i] + 20.0) / 23.0;
    d = std::max({d, std::abs(f - static_cast<double>(i) / kN),
                  std::abs(f - static_cast<double>(i + 1) / kN)});
  }
  EXPECT_LT(d, 1.36 / std::sqrt(kN));
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / kN, 1.0 / 6.0, 0.015);
}

TEST(TripletSampler, PartnerDiffersAndRetries) {
  std::vector<Spectrogram> pool;
  for (int i = 0; i < 4; ++i) pool.push_back(Spec(i + 1, 4000));
  pool[2].frames.setZero();  // silent clip is skipped as a partner
  TripletSampler sampler(4, {0, 1, 2, 3}, [&](int i) { return pool[i]; });
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const SpecTriplet t = sampler.SampleFor(1, rng);
    EXPECT_EQ(t.label, 1);
    EXPECT_NE(t.reference.frames, pool[1].frames);
    EXPECT_NE(t.reference.frames, pool[2].frames);
    const SpecTriplet s = sampler.Sample(rng);
    EXPECT_NE(s.label, 2);
  }
  EXPECT_THROW(sampler.SampleFor(2, rng), ZeroEnergyError);
  EXPECT_THROW(TripletSampler(1, {0}, [&](int i) { return pool[i]; }), ConfigError);
}

// Interferer labels never reach the emitted label.
TEST(TripletSampler, LabelIndependence) {
  std::vector<Spectrogram> pool;
  for (int i = 0; i < 6; ++i) pool.push_back(Spec(i + 10, 4000));
  const std::vector<int> labels = {0, 0, 0, 0, 1, 1};
  TripletSampler sampler(6, labels, [&](int i) { return pool[i]; });
  Rng rng(8);
  int ones = 0;
  constexpr int kN = 6000;
  for (int k = 0; k < kN; ++k) ones += sampler.Sample(rng).label;
  EXPECT_NEAR(static_cast<double>(ones) / kN, 2.0 / 6.0, 0.02);
}

TEST(Manifest, RoundTrip) {
  testing::TempDir dir;
  Manifest m;
  m.master_seed = 99;
  m.labels = {"no", "yes"};
  ManifestEntry a;
  a.mixture_path = "a.wav";
  a.target_path = "a.wav";
  a.label = 1;
  a.keyword = "yes";
  a.split = Split::kDev;
  m.entries.push_back(a);
  ManifestEntry b = a;
  b.condition = Condition::kPlaybackMusic;
  b.reference_path = "r.wav";
  b.sir_db = -3.25;
  b.room_seed = 123456789012345ULL;
  RoomConfig room;
  room.t60 = 0.3141592653589793;
  b.room = room;
  m.entries.push_back(b);
  WriteManifest(dir / "m.jsonl", m);
  const Manifest r = ReadManifest(dir / "m.jsonl");
  EXPECT_EQ(r.master_seed, 99u);
  EXPECT_EQ(r.labels, m.labels);
  ASSERT_EQ(r.entries.size(), 2u);
  EXPECT_EQ(r.entries[1].sir_db, -3.25);
  EXPECT_EQ(r.entries[1].room_seed, b.room_seed);
  ASSERT_TRUE(r.entries[1].room.has_value());
  EXPECT_EQ(r.entries[1].room->t60, room.t60);
  EXPECT_EQ(r.entries[1].room->mic_pos, room.mic_pos);
  EXPECT_EQ(r.entries[0].split, Split::kDev);
  EXPECT_EQ(r.base_dir, dir.path());
}

TEST(Manifest, RejectsBadInput) {
  testing::TempDir dir;
  {
    std::ofstream f(dir / "bad.jsonl");
    f << "{\"mixture_path\": \"x\"}\n";
  }
  EXPECT_THROW(ReadManifest(dir / "bad.jsonl"), DataError);
  EXPECT_THROW(ReadManifest(dir / "missing.jsonl"), DataError);
  EXPECT_THROW(ParseCondition("radio"), DataError);
  EXPECT_EQ(ParseSplit("test"), Split::kTest);
}

}  // namespace
}  // namespace iaec
