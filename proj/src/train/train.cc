// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/train.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "iaec/errors.h"
#include "iaec/eval.h"
#include "iaec/wav.h"

namespace iaec {

namespace {

constexpr int kLfbeWindow = 400;
constexpr int kLfbeHop = 160;

// Seed domains for DeriveSeed.
enum SeedTag : uint64_t {
  kTagInit = 1,
  kTagItem = 2,
  kTagCoin = 3,
  kTagBatch = 4,
};

std::vector<int> Permutation(int n, Rng& rng) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[UniformInt(rng, 0, i)]);
  return p;
}

bool UseItem(const TrainItem& item, Strategy s) {
  return !item.playback() || s != Strategy::kOff;
}

Spectrogram ClipStft(const std::vector<int16_t>& pcm) {
  return Stft(FromPcm16(pcm), kLfbeWindow, kLfbeHop, WindowKind::kHann);
}

}  // namespace

std::string ToString(Strategy s) {
  switch (s) {
    case Strategy::kOff: return "off";
    case Strategy::kAugm: return "augm";
    case Strategy::kOrcl: return "orcl";
    case Strategy::kBoth: return "both";
  }
  return "unknown";
}

Strategy ParseStrategy(const std::string& s) {
  for (Strategy v : {Strategy::kOff, Strategy::kAugm, Strategy::kOrcl,
                     Strategy::kBoth}) {
    if (s == ToString(v)) return v;
  }
  throw ConfigError("unknown augmentation strategy '" + s + "'");
}

void TrainConfig::Validate(const TcnConfig& model) const {
  if (!(lr > 0.0)) throw ConfigError("train.lr must be positive");
  if (weight_decay < 0.0) throw ConfigError("train.weight_decay must be >= 0");
  if (max_epochs < 1) throw ConfigError("train.max_epochs must be >= 1");
  if (patience < 0 || patience >= max_epochs) {
    throw ConfigError("train.patience must lie in [0, max_epochs)");
  }
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (segment_frames != ReceptiveField(model)) {
    throw ConfigError("train.segment_frames (" +
                      std::to_string(segment_frames) +
                      ") must equal the receptive field (" +
                      std::to_string(ReceptiveField(model)) + ")");
  }
  if (!(orcl_probability >= 0.0 && orcl_probability <= 1.0)) {
    throw ConfigError("train.orcl_probability must lie in [0, 1]");
  }
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"lr", lr},
          {"weight_decay", weight_decay},
          {"max_epochs", max_epochs},
          {"patience", patience},
          {"batch_size", batch_size},
          {"segment_frames", segment_frames},
          {"strategy", ToString(strategy)},
          {"seed", seed},
          {"orcl_probability", orcl_probability},
          {"spec_augment", spec_augment},
          {"freq_masks", spec_augment_policy.freq_masks},
          {"max_freq_width", spec_augment_policy.max_freq_width},
          {"time_masks", spec_augment_policy.time_masks},
          {"max_time_width", spec_augment_policy.max_time_width},
          {"min_shift_frames", augment.min_shift_frames},
          {"max_shift_frames", augment.max_shift_frames},
          {"min_sir_db", augment.min_sir_db},
          {"max_sir_db", augment.max_sir_db},
          {"bn_momentum", bn_momentum}};
}

TrainConfig TrainConfig::FromJson(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.lr = j.value("lr", c.lr);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.patience = j.value("patience", c.patience);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.segment_frames = j.value("segment_frames", c.segment_frames);
    c.strategy = ParseStrategy(j.value("strategy", ToString(c.strategy)));
    c.seed = j.value("seed", c.seed);
    c.orcl_probability = j.value("orcl_probability", c.orcl_probability);
    c.spec_augment = j.value("spec_augment", c.spec_augment);
    auto& p = c.spec_augment_policy;
    p.freq_masks = j.value("freq_masks", p.freq_masks);
    p.max_freq_width = j.value("max_freq_width", p.max_freq_width);
    p.time_masks = j.value("time_masks", p.time_masks);
    p.max_time_width = j.value("max_time_width", p.max_time_width);
    auto& a = c.augment;
    a.min_shift_frames = j.value("min_shift_frames", a.min_shift_frames);
    a.max_shift_frames = j.value("max_shift_frames", a.max_shift_frames);
    a.min_sir_db = j.value("min_sir_db", a.min_sir_db);
    a.max_sir_db = j.value("max_sir_db", a.max_sir_db);
    c.bn_momentum = j.value("bn_momentum", c.bn_momentum);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad train config: ") + e.what());
  }
  return c;
}

// Losses

double CrossEntropy(const RowVector& logits, int label, RowVector* grad) {
  if (label < 0 || label >= logits.size()) {
    throw DataError("label " + std::to_string(label) + " out of range");
  }
  const double m = logits.maxCoeff();
  const RowVector e = (logits.array() - m).exp().matrix();
  const double sum = e.sum();
  const double lse = m + std::log(sum);
  if (grad) {
    *grad = e / sum;
    (*grad)(label) -= 1.0;
  }
  return lse - logits(label);
}

double BinaryCrossEntropy(double z, int label, double* grad) {
  if (label != 0 && label != 1) throw DataError("binary label must be 0 or 1");
  // log(1 + exp(-|z|)) + max(z, 0) - z*label
  const double loss = std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) -
                      z * label;
  if (grad) {
    const double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z))
                            : std::exp(z) / (1.0 + std::exp(z));
    *grad = p - label;
  }
  return loss;
}

double BatchLoss(const Matrix& logits, const std::vector<int>& labels,
                 Matrix* dlogits) {
  const Eigen::Index n = logits.rows();
  if (n == 0 || static_cast<Eigen::Index>(labels.size()) != n) {
    throw DataError("logits and labels disagree in batch size");
  }
  if (dlogits) dlogits->resize(n, logits.cols());
  double total = 0.0;
  for (Eigen::Index b = 0; b < n; ++b) {
    if (logits.cols() == 1) {
      double g = 0.0;
      total += BinaryCrossEntropy(logits(b, 0), labels[b], &g);
      if (dlogits) (*dlogits)(b, 0) = g / n;
    } else {
      RowVector g;
      total += CrossEntropy(logits.row(b), labels[b], dlogits ? &g : nullptr);
      if (dlogits) dlogits->row(b) = g / static_cast<double>(n);
    }
  }
  return total / n;
}

// Optimiser

void AdamStep(ParamStore& params, const Grads& grads, AdamState& s,
              const AdamOptions& o) {
  if (static_cast<int>(grads.size()) != params.size()) {
    throw ConfigError("gradient layout does not match the parameters");
  }
  if (s.m.empty()) {
    s.m = ZeroGrads(params);
    s.v = ZeroGrads(params);
  }
  ++s.step;
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(s.step));
  for (int i = 0; i < params.size(); ++i) {
    Matrix& p = params[i];
    const Matrix& g = grads[i];
    s.m[i] = o.beta1 * s.m[i] + (1.0 - o.beta1) * g;
    s.v[i] = o.beta2 * s.v[i] + (1.0 - o.beta2) * g.cwiseAbs2();
    if (o.weight_decay > 0.0) p *= 1.0 - o.lr * o.weight_decay;
    p.array() -= o.lr * (s.m[i].array() / c1) /
                 ((s.v[i].array() / c2).sqrt() + o.eps);
  }
}

// Data

std::vector<TrainItem> LoadItems(const Manifest& manifest, Split split,
                                 const std::vector<Condition>& conditions) {
  std::vector<TrainItem> items;
  for (const ManifestEntry& e : manifest.entries) {
    if (e.split != split) continue;
    if (std::find(conditions.begin(), conditions.end(), e.condition) ==
        conditions.end()) {
      continue;
    }
    TrainItem item;
    item.label = e.label;
    item.condition = e.condition;
    item.target = ReadWavPcm16(manifest.Resolve(e.target_path));
    if (e.playback()) {
      item.mixture = ReadWavPcm16(manifest.Resolve(e.mixture_path));
      item.reference = ReadWavPcm16(manifest.Resolve(e.reference_path));
    }
    items.push_back(std::move(item));
  }
  return items;
}

Matrix ClipFeatures(const std::vector<int16_t>& pcm) {
  AudioBuffer audio = FromPcm16(pcm);
  if (audio.size() < static_cast<size_t>(kLfbeWindow)) {
    audio.samples.resize(kLfbeWindow, 0.0);
  }
  return Lfbe(audio).values;
}

Matrix FitFrames(const Matrix& x, int frames, int start) {
  Matrix out = Matrix::Zero(frames, x.cols());
  const int n = std::min<int>(frames, static_cast<int>(x.rows()) - start);
  if (n > 0) out.topRows(n) = x.middleRows(start, n);
  return out;
}

std::vector<int> ArgmaxRows(const Matrix& scores) {
  std::vector<int> out(scores.rows());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    if (scores.cols() == 1) {
      out[i] = scores(i, 0) >= 0.0 ? 1 : 0;
    } else {
      Eigen::Index k;
      scores.row(i).maxCoeff(&k);
      out[i] = static_cast<int>(k);
    }
  }
  return out;
}

Matrix ScoreItems(const Tcn& model, const std::vector<TrainItem>& items,
                  int min_frames, int batch_size) {
  const TcnConfig& cfg = model.config();
  std::vector<Matrix> ys(items.size()), rs(items.size());
  std::map<int, std::vector<int>> by_length;
  for (size_t i = 0; i < items.size(); ++i) {
    const TrainItem& it = items[i];
    ys[i] = ClipFeatures(it.playback() ? it.mixture : it.target);
    const int frames = std::max<int>(min_frames, ys[i].rows());
    ys[i] = FitFrames(ys[i], frames);
    if (it.playback() && cfg.uses_reference()) {
      rs[i] = FitFrames(ClipFeatures(it.reference), frames);
    }
    by_length[frames].push_back(static_cast<int>(i));
  }
  Matrix scores(items.size(), cfg.num_classes);
  ForwardOptions opts;
  for (const auto& [frames, idx] : by_length) {
    for (size_t begin = 0; begin < idx.size(); begin += batch_size) {
      const size_t end = std::min(idx.size(), begin + batch_size);
      Batch b;
      b.size = static_cast<int>(end - begin);
      b.frames = frames;
      b.mixture.resize(static_cast<Eigen::Index>(b.size) * frames,
                       cfg.in_features);
      b.playback.assign(b.size, 0);
      b.labels.assign(b.size, 0);
      for (size_t k = begin; k < end; ++k) {
        const int s = static_cast<int>(k - begin);
        b.mixture.middleRows(static_cast<Eigen::Index>(s) * frames, frames) =
            ys[idx[k]];
        if (rs[idx[k]].size() > 0) {
          if (b.reference.size() == 0) {
            b.reference = Matrix::Zero(b.mixture.rows(), b.mixture.cols());
          }
          b.reference.middleRows(static_cast<Eigen::Index>(s) * frames,
                                 frames) = rs[idx[k]];
          b.playback[s] = 1;
        }
      }
      const Matrix logits = model.Forward(b, opts);
      for (size_t k = begin; k < end; ++k) {
        scores.row(idx[k]) = logits.row(static_cast<Eigen::Index>(k - begin));
      }
    }
  }
  return scores;
}

bool DrawOrcl(const TrainConfig& cfg, int epoch, int item) {
  switch (cfg.strategy) {
    case Strategy::kOrcl: return true;
    case Strategy::kAugm: return false;
    case Strategy::kOff: return true;
    case Strategy::kBoth: {
      Rng rng(DeriveSeed(cfg.seed, {kTagCoin, static_cast<uint64_t>(epoch),
                                    static_cast<uint64_t>(item)}));
      return Bernoulli(rng, cfg.orcl_probability);
    }
  }
  return true;
}

Batch AssembleBatch(const TcnConfig& model_cfg, const TrainConfig& cfg,
                    const std::vector<TrainItem>& items,
                    const std::vector<int>& order, int epoch, int index) {
  const int t = cfg.segment_frames, f = model_cfg.in_features;
  const size_t begin = static_cast<size_t>(index) * cfg.batch_size;
  const size_t end = std::min(order.size(), begin + cfg.batch_size);
  if (begin >= end) throw DataError("batch index out of range");
  Batch b;
  b.size = static_cast<int>(end - begin);
  b.frames = t;
  b.mixture = Matrix::Zero(static_cast<Eigen::Index>(b.size) * t, f);
  b.playback.assign(b.size, 0);
  b.labels.assign(b.size, 0);
  const bool with_reference = model_cfg.uses_reference();
  if (with_reference) b.reference = Matrix::Zero(b.mixture.rows(), f);

  std::vector<int> pool_labels(items.size());
  for (size_t i = 0; i < items.size(); ++i) pool_labels[i] = items[i].label;

  for (size_t k = begin; k < end; ++k) {
    const int s = static_cast<int>(k - begin);
    const int i = order[k];
    const TrainItem& it = items[i];
    Rng rng(DeriveSeed(cfg.seed, {kTagItem, static_cast<uint64_t>(epoch),
                                  static_cast<uint64_t>(i)}));
    Matrix y, r;
    if (!it.playback()) {
      y = ClipFeatures(it.target);
    } else if (DrawOrcl(cfg, epoch, i)) {
      y = ClipFeatures(it.mixture);
      if (with_reference) r = ClipFeatures(it.reference);
    } else {
      if (items.size() < 2) throw DataError("augmentation needs >= 2 clips");
      TripletSampler sampler(
          static_cast<int>(items.size()), pool_labels,
          [&items](int j) { return ClipStft(items[j].target); }, cfg.augment);
      const SpecTriplet tri = sampler.SampleFor(i, rng);
      y = LfbeFromSpectrogram(tri.mixture).values;
      if (with_reference) r = LfbeFromSpectrogram(tri.reference).values;
    }
    const int frames = static_cast<int>(y.rows());
    const int start = frames > t ? UniformInt(rng, 0, frames - t) : 0;
    b.mixture.middleRows(static_cast<Eigen::Index>(s) * t, t) =
        FitFrames(y, t, start);
    if (r.size() > 0) {
      b.reference.middleRows(static_cast<Eigen::Index>(s) * t, t) =
          FitFrames(r, t, start);
      b.playback[s] = 1;
    }
    b.labels[s] = it.label;
  }
  return b;
}

FitResult Fit(const TcnConfig& model_cfg, const TrainConfig& cfg,
              const DataSources& data, std::ostream* log) {
  model_cfg.Validate();
  cfg.Validate(model_cfg);
  std::vector<TrainItem> train, dev;
  for (const auto& it : data.train) {
    if (UseItem(it, cfg.strategy)) train.push_back(it);
  }
  const bool dev_playback =
      cfg.strategy == Strategy::kOrcl || cfg.strategy == Strategy::kBoth;
  for (const auto& it : data.dev) {
    if (!it.playback() || dev_playback) dev.push_back(it);
  }
  if (train.empty()) throw DataError("no training examples");

  FitResult result{Tcn(model_cfg, DeriveSeed(cfg.seed, {kTagInit})), {}, {},
                   false};
  Tcn model = result.model;
  AdamState adam;
  AdamOptions adam_opts;
  adam_opts.lr = cfg.lr;
  adam_opts.weight_decay = cfg.weight_decay;
  Rng shuffle(cfg.seed);
  double best = -std::numeric_limits<double>::infinity();
  int wait = 0;
  const int num_batches =
      (static_cast<int>(train.size()) + cfg.batch_size - 1) / cfg.batch_size;
  if (log) *log << "epoch\ttrain_loss\ttrain_acc\tdev_metric\twall_s\n";

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> order =
        Permutation(static_cast<int>(train.size()), shuffle);
    double loss_sum = 0.0;
    int correct = 0;
    for (int bi = 0; bi < num_batches; ++bi) {
      const Batch batch = AssembleBatch(model_cfg, cfg, train, order, epoch, bi);
      Rng aug_rng(DeriveSeed(cfg.seed, {kTagBatch, static_cast<uint64_t>(epoch),
                                        static_cast<uint64_t>(bi)}));
      ForwardOptions fo;
      fo.train = true;
      fo.spec_augment = cfg.spec_augment ? &cfg.spec_augment_policy : nullptr;
      fo.rng = &aug_rng;
      TcnCache cache;
      const Matrix logits = model.Forward(batch, fo, &cache);
      Matrix dlogits;
      const double loss = BatchLoss(logits, batch.labels, &dlogits);
      if (!std::isfinite(loss)) {
        throw NumericalError("non-finite training loss at epoch " +
                             std::to_string(epoch) + ", batch " +
                             std::to_string(bi));
      }
      const Grads grads = model.Backward(cache, dlogits);
      AdamStep(model.params(), grads, adam, adam_opts);
      model.UpdateRunningStats(cache, cfg.bn_momentum);
      loss_sum += loss * batch.size;
      const std::vector<int> pred = ArgmaxRows(logits);
      for (int s = 0; s < batch.size; ++s) correct += pred[s] == batch.labels[s];
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / train.size();
    entry.train_accuracy = static_cast<double>(correct) / train.size();
    if (dev.empty()) {
      entry.dev_metric = entry.train_accuracy;
    } else {
      const Matrix scores = ScoreItems(model, dev, cfg.segment_frames);
      std::vector<int> labels(dev.size());
      for (size_t i = 0; i < dev.size(); ++i) labels[i] = dev[i].label;
      if (model_cfg.num_classes == 1) {
        std::vector<double> s(scores.data(), scores.data() + scores.size());
        entry.dev_metric = 1.0 - FrrAtFar(s, labels, 0.01).frr;
      } else {
        entry.dev_metric = Accuracy(ArgmaxRows(scores), labels);
      }
    }
    entry.wall_seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    result.log.push_back(entry);
    if (log) {
      *log << entry.epoch << '\t' << entry.train_loss << '\t'
           << entry.train_accuracy << '\t' << entry.dev_metric << '\t'
           << entry.wall_seconds << '\n';
      log->flush();
    }
    if (entry.dev_metric > best) {
      best = entry.dev_metric;
      wait = 0;
      result.model = model;
      result.meta.epoch = epoch;
      result.meta.dev_metric = entry.dev_metric;
      std::ostringstream state;
      state << shuffle;
      result.meta.rng_state = state.str();
    } else if (++wait >= cfg.patience) {
      result.early_stopped = true;
      break;
    }
  }
  result.meta.master_seed = cfg.seed;
  result.meta.labels = data.labels;
  result.meta.train_config = cfg.ToJson();
  return result;
}

}  // namespace iaec
