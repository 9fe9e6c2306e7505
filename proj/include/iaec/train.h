// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_TRAIN_H_
#define IAEC_TRAIN_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "iaec/manifest.h"
#include "iaec/mixer.h"
#include "iaec/nnet/checkpoint.h"
#include "iaec/nnet/tcn.h"

namespace iaec {

// off:  clean clips only
// orcl: clean clips plus the stored playback triplets
// augm: clean clips plus on-the-fly triplets in place of the stored ones
// both: each playback slot is orcl or augm with probability 1/2
enum class Strategy { kOff, kAugm, kOrcl, kBoth };

std::string ToString(Strategy s);
Strategy ParseStrategy(const std::string& s);

struct TrainConfig {
  double lr = 1e-3;
  double weight_decay = 1e-4;
  int max_epochs = 200;
  int patience = 10;
  int batch_size = 256;
  int segment_frames = 117;
  Strategy strategy = Strategy::kOrcl;
  uint64_t seed = 0;
  double orcl_probability = 0.5;  // for `both`
  bool spec_augment = true;
  SpecAugmentPolicy spec_augment_policy;
  AugmentOptions augment;
  double bn_momentum = 0.1;

  void Validate(const TcnConfig& model) const;
  nlohmann::json ToJson() const;
  static TrainConfig FromJson(const nlohmann::json& j);
};

// -log softmax(logits)[label]; grad receives softmax - onehot.
double CrossEntropy(const RowVector& logits, int label,
                    RowVector* grad = nullptr);
// Sigmoid cross-entropy for a single logit and a 0/1 label.
double BinaryCrossEntropy(double logit, int label, double* grad = nullptr);
// Mean loss over the rows of B x C logits (binary when C == 1).
double BatchLoss(const Matrix& logits, const std::vector<int>& labels,
                 Matrix* dlogits = nullptr);

struct AdamOptions {
  double lr = 1e-3;
  double weight_decay = 0.0;  // decoupled
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Grads m, v;
  int64_t step = 0;
};

void AdamStep(ParamStore& params, const Grads& grads, AdamState& state,
              const AdamOptions& opts);

// One labelled clip. Playback items also carry the stored mixture and the
// reference; `target` is always the clean clip.
struct TrainItem {
  int label = -1;
  Condition condition = Condition::kNonPlayback;
  std::vector<int16_t> target;
  std::vector<int16_t> mixture;
  std::vector<int16_t> reference;

  bool playback() const { return condition != Condition::kNonPlayback; }
};

struct DataSources {
  std::vector<TrainItem> train;
  std::vector<TrainItem> dev;
  std::vector<std::string> labels;
};

// Reads the given split(s) of a manifest. Conditions not listed are skipped.
std::vector<TrainItem> LoadItems(const Manifest& manifest, Split split,
                                 const std::vector<Condition>& conditions);

// LFBEs of a PCM clip, zero-padded at the tail or cropped to `frames`
// starting at `start`.
Matrix ClipFeatures(const std::vector<int16_t>& pcm);
Matrix FitFrames(const Matrix& features, int frames, int start = 0);

// Class scores for each item, evaluated in inference mode on whole clips
// padded to at least `min_frames`. Returns N x C pooled logits.
Matrix ScoreItems(const Tcn& model, const std::vector<TrainItem>& items,
                  int min_frames, int batch_size = 64);
std::vector<int> ArgmaxRows(const Matrix& scores);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double dev_metric = 0.0;
  double wall_seconds = 0.0;
};

struct FitResult {
  Tcn model;
  CheckpointMeta meta;
  std::vector<EpochLog> log;
  bool early_stopped = false;
};

// Epoch loop with early stopping on the dev metric (accuracy for C > 1,
// 1 - FRR at 1% FAR for C == 1). Returns the best epoch's weights. Writes one
// tab-separated line per epoch to `log` when given.
FitResult Fit(const TcnConfig& model_cfg, const TrainConfig& cfg,
              const DataSources& data, std::ostream* log = nullptr);

// Assembles training batch `index` of `epoch` from `order`. Outcome depends
// only on the seeds and indices.
Batch AssembleBatch(const TcnConfig& model_cfg, const TrainConfig& cfg,
                    const std::vector<TrainItem>& items,
                    const std::vector<int>& order, int epoch, int index);

// True when the playback slot of (epoch, item) draws the stored triplet.
bool DrawOrcl(const TrainConfig& cfg, int epoch, int item);

}  // namespace iaec

#endif  // IAEC_TRAIN_H_
