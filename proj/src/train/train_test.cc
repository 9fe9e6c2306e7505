// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/train.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "iaec/errors.h"
#include "iaec/wav.h"
#include "testing/test_util.h"

namespace iaec {
namespace {

TcnConfig TinyModel(Fusion f = Fusion::kBaseline, int classes = 3) {
  TcnConfig c;
  c.bottleneck = 8;
  c.hidden = 8;
  c.blocks_per_repeat = 1;
  c.repeats = 2;
  c.dilations = {1};
  c.num_classes = classes;
  c.fusion = f;
  return c;
}

TrainConfig TinyTrain(const TcnConfig& m) {
  TrainConfig t;
  t.segment_frames = ReceptiveField(m);
  t.batch_size = 8;
  t.max_epochs = 6;
  t.patience = 2;
  t.lr = 3e-3;
  t.seed = 17;
  return t;
}

// Label k is a tone at 400 (k + 1) Hz in noise; playback items add an
// unrelated noise burst that is also given as the reference.
std::vector<TrainItem> ToyItems(int per_class, int classes, uint64_t seed,
                                bool playback) {
  std::vector<TrainItem> items;
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const size_t n = 8000;
  for (int k = 0; k < classes; ++k) {
    for (int i = 0; i < per_class; ++i) {
      std::vector<double> u(n), r(n), y(n);
      const double f = 400.0 * (k + 1), ph = Uniform(rng, 0.0, 6.28);
      for (size_t t = 0; t < n; ++t) {
        u[t] = 0.2 * std::sin(2 * std::numbers::pi * f * t / 16000.0 + ph) +
               0.01 * g(rng);
        r[t] = 0.1 * g(rng);
        y[t] = u[t] + r[t];
      }
      TrainItem it;
      it.label = k;
      it.target = QuantizePcm16(u);
      if (playback && i % 2 == 1) {
        it.condition = Condition::kPlaybackTts;
        it.mixture = QuantizePcm16(y);
        it.reference = QuantizePcm16(r);
      }
      items.push_back(std::move(it));
    }
  }
  return items;
}

TEST(Losses, CrossEntropyExamplesAndGradient) {
  RowVector z(2);
  z << 0.0, 0.0;
  RowVector g;
  EXPECT_NEAR(CrossEntropy(z, 0, &g), std::log(2.0), 1e-15);
  EXPECT_NEAR(g(0), -0.5, 1e-15);
  EXPECT_NEAR(g(1), 0.5, 1e-15);
  RowVector big(3);
  big << 1000.0, 0.0, -1000.0;
  EXPECT_NEAR(CrossEntropy(big, 1), 1000.0, 1e-9);
  EXPECT_THROW(CrossEntropy(big, 3), DataError);

  RowVector x(4);
  x << 0.3, -1.2, 2.0, 0.1;
  CrossEntropy(x, 2, &g);
  for (int i = 0; i < 4; ++i) {
    RowVector a = x, b = x;
    a(i) += 1e-6;
    b(i) -= 1e-6;
    EXPECT_NEAR((CrossEntropy(a, 2) - CrossEntropy(b, 2)) / 2e-6, g(i), 1e-8);
  }
}

TEST(Losses, BinaryCrossEntropy) {
  double g = 0.0;
  EXPECT_NEAR(BinaryCrossEntropy(0.0, 1, &g), std::log(2.0), 1e-15);
  EXPECT_NEAR(g, -0.5, 1e-15);
  EXPECT_NEAR(BinaryCrossEntropy(1000.0, 0), 1000.0, 1e-9);
  EXPECT_NEAR(BinaryCrossEntropy(-1000.0, 0), 0.0, 1e-12);
  EXPECT_TRUE(std::isfinite(BinaryCrossEntropy(-1000.0, 1, &g)));
  for (double z : {-3.0, 0.4, 2.5}) {
    BinaryCrossEntropy(z, 1, &g);
    const double fd =
        (BinaryCrossEntropy(z + 1e-6, 1) - BinaryCrossEntropy(z - 1e-6, 1)) / 2e-6;
    EXPECT_NEAR(fd, g, 1e-8);
  }
  EXPECT_THROW(BinaryCrossEntropy(0.0, 2), DataError);
}

TEST(Losses, BatchLossIsMeanWithMatchingGradient) {
  Matrix z(3, 4);
  z << 0.1, 0.2, -0.3, 1.0,  //
      2.0, -1.0, 0.0, 0.5,   //
      -0.2, 0.3, 0.8, 0.1;
  const std::vector<int> labels = {3, 0, 2};
  Matrix dz;
  const double loss = BatchLoss(z, labels, &dz);
  double want = 0.0;
  for (int b = 0; b < 3; ++b) want += CrossEntropy(z.row(b), labels[b]) / 3.0;
  EXPECT_NEAR(loss, want, 1e-15);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Matrix a = z, b = z;
    a.data()[i] += 1e-6;
    b.data()[i] -= 1e-6;
    const double fd = (BatchLoss(a, labels) - BatchLoss(b, labels)) / 2e-6;
    EXPECT_NEAR(fd, dz.data()[i], 1e-8);
  }
  EXPECT_THROW(BatchLoss(z, {0, 1}), DataError);
}

TEST(Adam, FirstStepAndDecay) {
  ParamStore p;
  const int w = p.Add("w", 1, 3);
  p[w] << 1.0, -2.0, 0.5;
  Grads g = ZeroGrads(p);
  g[0] << 0.3, -4.0, 0.0;
  AdamState s;
  AdamOptions o;
  o.lr = 0.01;
  o.weight_decay = 0.1;
  AdamStep(p, g, s, o);
  // Bias-corrected first step moves by lr * g / (|g| + eps) after decay.
  const double decay = 1.0 - 0.01 * 0.1;
  EXPECT_NEAR(p[w](0, 0), 1.0 * decay - 0.01 * 0.3 / (0.3 + 1e-8), 1e-12);
  EXPECT_NEAR(p[w](0, 1), -2.0 * decay + 0.01 * 4.0 / (4.0 + 1e-8), 1e-12);
  EXPECT_NEAR(p[w](0, 2), 0.5 * decay, 1e-12);
  EXPECT_EQ(s.step, 1);
  Grads bad;
  EXPECT_THROW(AdamStep(p, bad, s, o), ConfigError);
}

TEST(Adam, MinimisesQuadratic) {
  ParamStore p;
  p.Add("w", 2, 2);
  p[0] << 3.0, -1.0, 0.5, 2.0;
  AdamState s;
  AdamOptions o;
  o.lr = 0.05;
  for (int i = 0; i < 2000; ++i) {
    Grads g = {2.0 * (p[0].array() - 1.0).matrix()};
    AdamStep(p, g, s, o);
  }
  EXPECT_LT((p[0].array() - 1.0).abs().maxCoeff(), 1e-3);
}

TEST(Strategies, Parse) {
  for (Strategy s : {Strategy::kOff, Strategy::kAugm, Strategy::kOrcl,
                     Strategy::kBoth}) {
    EXPECT_EQ(ParseStrategy(ToString(s)), s);
  }
  EXPECT_THROW(ParseStrategy("sometimes"), ConfigError);
}

TEST(Strategies, BothFlipsAFairCoin) {
  TrainConfig c;
  c.strategy = Strategy::kBoth;
  c.seed = 5;
  int orcl = 0;
  constexpr int kN = 10000;
  for (int i = 0; i < kN; ++i) orcl += DrawOrcl(c, 1, i);
  EXPECT_GE(orcl, 0.48 * kN);
  EXPECT_LE(orcl, 0.52 * kN);
  // Per (epoch, item), so a new epoch redraws independently.
  int same = 0;
  for (int i = 0; i < kN; ++i) same += DrawOrcl(c, 1, i) == DrawOrcl(c, 2, i);
  EXPECT_NEAR(static_cast<double>(same) / kN, 0.5, 0.02);
  EXPECT_EQ(DrawOrcl(c, 3, 7), DrawOrcl(c, 3, 7));
  c.strategy = Strategy::kOrcl;
  EXPECT_TRUE(DrawOrcl(c, 1, 1));
  c.strategy = Strategy::kAugm;
  EXPECT_FALSE(DrawOrcl(c, 1, 1));
}

TEST(AssembleBatch, StrategiesChooseTheRightInputs) {
  const TcnConfig m = TinyModel(Fusion::kMaskD2);
  TrainConfig t = TinyTrain(m);
  const std::vector<TrainItem> items = ToyItems(2, 3, 1, true);
  std::vector<int> order(items.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  t.batch_size = static_cast<int>(items.size());

  t.strategy = Strategy::kOrcl;
  const Batch orcl = AssembleBatch(m, t, items, order, 1, 0);
  t.strategy = Strategy::kAugm;
  const Batch augm = AssembleBatch(m, t, items, order, 1, 0);
  const int tf = t.segment_frames;
  for (size_t i = 0; i < items.size(); ++i) {
    const int s = static_cast<int>(i);
    EXPECT_EQ(orcl.labels[s], items[i].label);
    EXPECT_EQ(orcl.playback[s], items[i].playback());
    EXPECT_EQ(augm.playback[s], items[i].playback());
    if (!items[i].playback()) {
      EXPECT_EQ(orcl.mixture.middleRows(s * tf, tf), augm.mixture.middleRows(s * tf, tf));
      continue;
    }
    // Stored mixture and reference, cropped at the same offset.
    const Matrix y = ClipFeatures(items[i].mixture);
    const Matrix r = ClipFeatures(items[i].reference);
    bool found = false;
    for (int start = 0; start + tf <= y.rows() && !found; ++start) {
      found = FitFrames(y, tf, start) == orcl.mixture.middleRows(s * tf, tf) &&
              FitFrames(r, tf, start) == orcl.reference.middleRows(s * tf, tf);
    }
    EXPECT_TRUE(found) << "item " << i;
    EXPECT_NE(augm.mixture.middleRows(s * tf, tf), orcl.mixture.middleRows(s * tf, tf));
  }
  // Same indices, same batch.
  const Batch again = AssembleBatch(m, t, items, order, 1, 0);
  EXPECT_EQ(again.mixture, augm.mixture);
  EXPECT_EQ(again.reference, augm.reference);
  EXPECT_THROW(AssembleBatch(m, t, items, order, 1, 1), DataError);
}

TEST(AssembleBatch, BaselineCarriesNoReference) {
  const TcnConfig m = TinyModel(Fusion::kBaseline);
  const TrainConfig t = TinyTrain(m);
  const std::vector<TrainItem> items = ToyItems(2, 3, 1, true);
  const std::vector<int> order = {0, 1, 2, 3};
  const Batch b = AssembleBatch(m, t, items, order, 1, 0);
  EXPECT_EQ(b.reference.size(), 0);
  EXPECT_EQ(b.size, 4);
  EXPECT_EQ(b.mixture.rows(), 4 * t.segment_frames);
}

TEST(Training, LossFallsOverFirstSteps) {
  const TcnConfig m = TinyModel();
  TrainConfig t = TinyTrain(m);
  t.spec_augment = false;
  const std::vector<TrainItem> items = ToyItems(4, 3, 2, false);
  std::vector<int> order(items.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  t.batch_size = static_cast<int>(items.size());
  const Batch batch = AssembleBatch(m, t, items, order, 1, 0);
  Tcn model(m, 3);
  AdamState s;
  AdamOptions o;
  o.lr = t.lr;
  std::vector<double> losses;
  ForwardOptions fo;
  fo.train = true;
  for (int step = 0; step <= 5; ++step) {
    TcnCache cache;
    Matrix d;
    losses.push_back(BatchLoss(model.Forward(batch, fo, &cache), batch.labels, &d));
    AdamStep(model.params(), model.Backward(cache, d), s, o);
  }
  for (int i = 1; i <= 5; ++i) EXPECT_LT(losses[i], losses[i - 1]) << i;
}

TEST(Training, FitKeepsBestEpochAndIsDeterministic) {
  const TcnConfig m = TinyModel(Fusion::kMaskD2);
  TrainConfig t = TinyTrain(m);
  t.strategy = Strategy::kBoth;
  DataSources data;
  data.train = ToyItems(6, 3, 3, true);
  data.dev = ToyItems(2, 3, 4, true);
  data.labels = {"a", "b", "c"};
  const FitResult r = Fit(m, t, data);
  ASSERT_FALSE(r.log.empty());
  double best = -1.0;
  int best_epoch = 0, wait = 0;
  bool stopped = false;
  for (const auto& e : r.log) {
    if (e.dev_metric > best) {
      best = e.dev_metric;
      best_epoch = e.epoch;
      wait = 0;
    } else if (++wait >= t.patience) {
      stopped = true;
    }
  }
  EXPECT_EQ(r.meta.epoch, best_epoch);
  EXPECT_EQ(r.meta.dev_metric, best);
  EXPECT_EQ(r.early_stopped, stopped);
  EXPECT_EQ(r.meta.labels, data.labels);
  // The returned weights reproduce the best dev score.
  const Matrix scores = ScoreItems(r.model, data.dev, t.segment_frames);
  std::vector<int> labels;
  for (const auto& it : data.dev) labels.push_back(it.label);
  const std::vector<int> pred = ArgmaxRows(scores);
  int correct = 0;
  for (size_t i = 0; i < pred.size(); ++i) correct += pred[i] == labels[i];
  EXPECT_DOUBLE_EQ(static_cast<double>(correct) / pred.size(), best);

  const FitResult again = Fit(m, t, data);
  ASSERT_EQ(again.log.size(), r.log.size());
  for (size_t i = 0; i < r.log.size(); ++i) {
    EXPECT_EQ(again.log[i].train_loss, r.log[i].train_loss);
  }
  for (int p = 0; p < r.model.params().size(); ++p) {
    EXPECT_EQ(again.model.params()[p], r.model.params()[p]);
  }
}

TEST(Training, ConfigValidation) {
  const TcnConfig m = TinyModel();
  TrainConfig t = TinyTrain(m);
  EXPECT_NO_THROW(t.Validate(m));
  t.patience = t.max_epochs;
  EXPECT_THROW(t.Validate(m), ConfigError);
  t = TinyTrain(m);
  t.segment_frames += 1;
  EXPECT_THROW(t.Validate(m), ConfigError);
  t = TinyTrain(m);
  t.orcl_probability = 1.5;
  EXPECT_THROW(t.Validate(m), ConfigError);
  t = TinyTrain(m);
  EXPECT_EQ(TrainConfig::FromJson(t.ToJson()).ToJson(), t.ToJson());
  EXPECT_THROW(TrainConfig::FromJson({{"lr", "fast"}}), ConfigError);
}

TEST(Features, FitFramesPadsAndCrops) {
  Matrix x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  const Matrix a = FitFrames(x, 5);
  EXPECT_EQ(a.topRows(3), x);
  EXPECT_EQ(a.bottomRows(2), Matrix::Zero(2, 2));
  EXPECT_EQ(FitFrames(x, 2, 1), x.bottomRows(2));
  const std::vector<int16_t> pcm(16000, 100);
  EXPECT_EQ(ClipFeatures(pcm).rows(), 98);
  EXPECT_EQ(ClipFeatures(pcm).cols(), 64);
}

}  // namespace
}  // namespace iaec
