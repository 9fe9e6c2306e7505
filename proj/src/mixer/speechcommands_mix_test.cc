// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/speechcommands_mix.h"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "iaec/corpus.h"
#include "iaec/errors.h"
#include "iaec/mixer.h"
#include "iaec/wav.h"
#include "testing/test_util.h"

namespace iaec {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

double PcmPowerOf(const std::vector<int16_t>& x) {
  double s = 0.0;
  for (int16_t v : x) s += static_cast<double>(v) * v;
  return s / static_cast<double>(x.size());
}

class MixFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    CorpusOptions co;
    co.seed = 3;
    co.keywords = {"yes", "no", "up"};
    co.train_speakers = 3;
    co.dev_speakers = 1;
    co.test_speakers = 1;
    WriteKeywordCorpus(dir_ / "gsc", co);
    InterfererOptions io;
    io.seed = 4;
    io.clips = 10;
    io.seconds = 1.5;
    WriteTtsCorpus(dir_ / "tts", io);
    io.seed = 5;
    WriteMusicCorpus(dir_ / "music", io);
    opts_.seed = 11;
  }

  std::vector<InterfererCorpus> Corpora() const {
    return {{Condition::kPlaybackTts, dir_ / "tts"},
            {Condition::kPlaybackMusic, dir_ / "music"}};
  }

  testing::TempDir dir_;
  SynthOptions opts_;
};

TEST_F(MixFixture, ScanFollowsLists) {
  std::vector<std::string> labels;
  const std::vector<GscClip> clips = ScanGscv2(dir_ / "gsc", &labels);
  EXPECT_EQ(labels, (std::vector<std::string>{"no", "up", "yes"}));
  ASSERT_EQ(clips.size(), 15u);
  std::set<std::string> dev, test;
  {
    std::ifstream f(dir_ / "gsc" / "validation_list.txt");
    for (std::string l; std::getline(f, l);) dev.insert(l);
  }
  {
    std::ifstream f(dir_ / "gsc" / "testing_list.txt");
    for (std::string l; std::getline(f, l);) test.insert(l);
  }
  std::map<Split, int> n;
  for (const auto& c : clips) {
    const std::string rel = c.keyword + "/" + c.path.filename().string();
    const Split want = dev.count(rel)    ? Split::kDev
                       : test.count(rel) ? Split::kTest
                                         : Split::kTrain;
    EXPECT_EQ(c.split, want) << rel;
    EXPECT_EQ(labels[c.label], c.keyword);
    ++n[c.split];
  }
  EXPECT_EQ(n[Split::kTrain], 9);
  EXPECT_EQ(n[Split::kDev], 3);
  EXPECT_EQ(n[Split::kTest], 3);
}

TEST_F(MixFixture, ManifestContents) {
  const Manifest m = BuildSpeechCommandsMix(dir_ / "gsc", Corpora(),
                                            dir_ / "out", opts_);
  ASSERT_EQ(m.entries.size(), 45u);  // one variant per clip and condition
  std::map<Condition, int> per_condition;
  for (const auto& e : m.entries) {
    ++per_condition[e.condition];
    if (!e.playback()) {
      EXPECT_EQ(e.mixture_path, e.target_path);
      EXPECT_TRUE(e.reference_path.empty());
      continue;
    }
    const auto y = ReadWavPcm16(m.Resolve(e.mixture_path));
    const auto u = ReadWavPcm16(m.Resolve(e.target_path));
    const auto n = ReadWavPcm16(m.Resolve(e.interferer_path));
    const auto r = ReadWavPcm16(m.Resolve(e.reference_path));
    ASSERT_EQ(y.size(), u.size());
    ASSERT_EQ(r.size(), u.size());
    for (size_t i = 0; i < y.size(); ++i) {
      ASSERT_EQ(y[i] - u[i], n[i]);
    }
    const double sir = 10.0 * std::log10(PcmPowerOf(u) / PcmPowerOf(n));
    EXPECT_NEAR(sir, e.sir_db, 1e-9);
    EXPECT_GE(sir, -12.0);
    EXPECT_LE(sir, 3.0);
    // Interferer files are split 8:1:1 by index, never shared across splits.
    const std::string src = fs::path(e.interferer_source).stem().string();
    const size_t index = std::stoul(src.substr(src.find('_') + 1));
    EXPECT_EQ(InterfererSplit(index), e.split) << src;
    ASSERT_TRUE(e.room.has_value());
    EXPECT_EQ(m.labels[e.label], e.keyword);
  }
  for (const auto& [cond, n] : per_condition) EXPECT_EQ(n, 15) << ToString(cond);

  const Manifest back = ReadManifest(dir_ / "out" / "manifest.jsonl");
  EXPECT_EQ(back.entries.size(), m.entries.size());
}

TEST_F(MixFixture, DeterministicAcrossJobs) {
  opts_.jobs = 1;
  BuildSpeechCommandsMix(dir_ / "gsc", Corpora(), dir_ / "a", opts_);
  opts_.jobs = 2;
  BuildSpeechCommandsMix(dir_ / "gsc", Corpora(), dir_ / "b", opts_);
  EXPECT_EQ(Slurp(dir_ / "a" / "manifest.jsonl"),
            Slurp(dir_ / "b" / "manifest.jsonl"));
  for (const auto& p : fs::recursive_directory_iterator(dir_ / "a")) {
    if (!p.is_regular_file()) continue;
    const fs::path rel = fs::relative(p.path(), dir_ / "a");
    ASSERT_EQ(Slurp(p.path()), Slurp(dir_ / "b" / rel)) << rel;
  }
}

TEST_F(MixFixture, MissingInputs) {
  EXPECT_THROW(BuildSpeechCommandsMix(dir_ / "nope", Corpora(), dir_ / "o", opts_),
               DataError);
  const std::vector<InterfererCorpus> bad = {
      {Condition::kPlaybackTts, dir_ / "nope"}};
  EXPECT_THROW(BuildSpeechCommandsMix(dir_ / "gsc", bad, dir_ / "o", opts_),
               DataError);
}

// The stored interferer is the reverberated reference up to a gain; refit
// the gain by least squares with the RIR rebuilt from the stored room.
TEST(SynthesizePlayback, InterfererIsScaledPlaybackOfReference) {
  std::vector<std::vector<int16_t>> pool;
  for (int i = 0; i < 3; ++i) {
    pool.push_back(QuantizePcm16(testing::Gaussian(40000, 100 + i, 0.1)));
  }
  const std::vector<int16_t> target =
      QuantizePcm16(testing::Gaussian(16000, 7, 0.05));
  SynthOptions opts;
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    const PlaybackExample ex = SynthesizePlayback(target, pool, seed, opts);
    const auto& src = pool[ex.interferer_index];
    for (size_t i = 0; i < target.size(); ++i) {
      ASSERT_EQ(ex.reference[i], src[ex.interferer_offset + i]);
      ASSERT_EQ(ex.mixture[i], ex.target[i] + ex.interferer[i]);
    }
    const ImpulseResponse rir = ImageSourceRir(ex.room, opts.rir);
    AudioBuffer g = ApplyPlaybackPath(FromPcm16(ex.reference), rir, opts.playback);
    g.samples.resize(target.size());
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
      num += g.samples[i] * ex.interferer[i];
      den += g.samples[i] * g.samples[i];
    }
    const double k = num / den;
    double res = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
      const double d = ex.interferer[i] - k * g.samples[i];
      res += d * d;
    }
    EXPECT_LE(std::sqrt(res / g.size()), 0.6) << "seed " << seed;

    const PlaybackExample again = SynthesizePlayback(target, pool, seed, opts);
    EXPECT_EQ(again.mixture, ex.mixture);
  }
}

TEST(SynthesizePlayback, SilentInputs) {
  const std::vector<int16_t> silent(16000, 0);
  const std::vector<std::vector<int16_t>> pool = {
      QuantizePcm16(testing::Gaussian(20000, 1))};
  const SynthOptions opts;
  const std::vector<std::vector<int16_t>> silent_pool = {silent}, empty;
  EXPECT_THROW(SynthesizePlayback(silent, pool, 1, opts), ZeroEnergyError);
  EXPECT_THROW(SynthesizePlayback(pool[0], silent_pool, 1, opts), ZeroEnergyError);
  EXPECT_THROW(SynthesizePlayback(pool[0], empty, 1, opts), DataError);
}

}  // namespace
}  // namespace iaec
