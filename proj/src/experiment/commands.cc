// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "iaec/aec.h"
#include "iaec/corpus.h"
#include "iaec/errors.h"
#include "iaec/eval.h"
#include "iaec/experiment.h"
#include "iaec/nnet/checkpoint.h"
#include "iaec/speechcommands_mix.h"
#include "iaec/wav.h"

namespace iaec {

namespace fs = std::filesystem;

namespace {

void RequireDir(const fs::path& p, const std::string& what) {
  if (!fs::is_directory(p)) {
    throw DataError(what + " directory not found: " + p.string());
  }
}

void WriteText(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw DataError("cannot write " + p.string());
  f << text;
}

const std::vector<Condition>& AllConditions() {
  static const std::vector<Condition> c = {Condition::kNonPlayback,
                                           Condition::kPlaybackTts,
                                           Condition::kPlaybackMusic};
  return c;
}

}  // namespace

void RunSynth(const SynthCommand& cmd, std::ostream& out) {
  RequireDir(cmd.gscv2_dir, "GSCv2");
  std::vector<InterfererCorpus> corpora;
  if (!cmd.tts_dir.empty()) {
    RequireDir(cmd.tts_dir, "TTS corpus");
    corpora.push_back({Condition::kPlaybackTts, cmd.tts_dir});
  }
  if (!cmd.music_dir.empty()) {
    RequireDir(cmd.music_dir, "music corpus");
    corpora.push_back({Condition::kPlaybackMusic, cmd.music_dir});
  }
  if (cmd.out.empty()) throw ConfigError("synth needs an output directory");
  SynthOptions opts;
  opts.seed = cmd.seed;
  opts.jobs = cmd.jobs;
  opts.variants_per_clip = cmd.variants_per_clip;
  opts.keywords = cmd.keywords;
  const Manifest m = BuildSpeechCommandsMix(cmd.gscv2_dir, corpora, cmd.out, opts);

  std::map<std::pair<Condition, Split>, int> counts;
  for (const auto& e : m.entries) ++counts[{e.condition, e.split}];
  out << "manifest\t" << (cmd.out / "manifest.jsonl").string() << '\n';
  out << "labels\t" << m.labels.size() << '\n';
  for (const auto& [key, n] : counts) {
    out << ToString(key.first) << '\t' << ToString(key.second) << '\t' << n
        << '\n';
  }
}

void RunTrain(const TrainCommand& cmd, std::ostream& out) {
  ExperimentConfig cfg = LoadExperimentConfig(cmd.config);
  if (cmd.seed) {
    cfg.seed = *cmd.seed;
    cfg.train.seed = *cmd.seed;
  }
  if (cmd.out) cfg.output_dir = *cmd.out;
  const Manifest manifest = ReadManifest(cfg.manifest);
  const int classes = cfg.model.num_classes;
  const int labels = static_cast<int>(manifest.labels.size());
  if (!(classes == labels || (classes == 1 && labels == 2))) {
    throw ConfigError("model.num_classes is " + std::to_string(classes) +
                      " but the manifest has " + std::to_string(labels) +
                      " labels");
  }

  if (cmd.dry_run) {
    out << cfg.ToJson().dump(2) << '\n';
    out << FormatCostTable(cfg.model);
    return;
  }

  const std::vector<Condition>& conds =
      cfg.conditions.empty() ? AllConditions() : cfg.conditions;
  DataSources data;
  data.labels = manifest.labels;
  data.train = LoadItems(manifest, Split::kTrain, conds);
  data.dev = LoadItems(manifest, Split::kDev, conds);
  if (data.train.empty()) throw DataError("manifest has no training entries");
  if (data.dev.empty()) throw DataError("manifest has no dev entries");

  fs::create_directories(cfg.output_dir);
  WriteText(cfg.output_dir / "config.json", cfg.ToJson().dump(2) + "\n");
  FitResult r = Fit(cfg.model, cfg.train, data, &out);

  std::ostringstream log;
  log << "epoch\ttrain_loss\ttrain_acc\tdev_metric\twall_s\n";
  for (const auto& e : r.log) {
    log << e.epoch << '\t' << e.train_loss << '\t' << e.train_accuracy << '\t'
        << e.dev_metric << '\t' << e.wall_seconds << '\n';
  }
  WriteText(cfg.output_dir / "train_log.tsv", log.str());
  r.meta.master_seed = cfg.seed;
  SaveCheckpoint(cfg.output_dir / "checkpoint.bin", r.model, r.meta);
  out << "best_epoch\t" << r.meta.epoch << "\tdev_metric\t" << r.meta.dev_metric
      << (r.early_stopped ? "\tearly_stopped" : "") << '\n';
  out << "checkpoint\t" << (cfg.output_dir / "checkpoint.bin").string() << '\n';
}

void RunEval(const EvalCommand& cmd, std::ostream& out) {
  CheckpointMeta meta;
  Tcn model = LoadCheckpoint(cmd.checkpoint, &meta);
  if (cmd.fusion && *cmd.fusion != model.config().fusion) {
    TcnConfig c = model.config();
    c.fusion = *cmd.fusion;
    Tcn other(c, 0);
    other.CopyMatchingFrom(model);
    model = std::move(other);
  }
  const Manifest manifest = ReadManifest(cmd.manifest);
  if (!meta.labels.empty() && manifest.labels != meta.labels) {
    throw DataError("manifest labels do not match the checkpoint");
  }
  const int classes = model.config().num_classes;
  const int labels = static_cast<int>(manifest.labels.size());
  if (!(classes == labels || (classes == 1 && labels == 2))) {
    throw DataError("checkpoint has " + std::to_string(classes) +
                    " outputs but the manifest has " + std::to_string(labels) +
                    " labels");
  }
  const std::vector<TrainItem> items =
      LoadItems(manifest, cmd.split, AllConditions());
  if (items.empty()) {
    throw DataError("no " + ToString(cmd.split) + " entries in the manifest");
  }
  const Matrix scores = ScoreItems(model, items, ReceptiveField(model.config()));
  std::vector<ScoredUtterance> scored(items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    scored[i].scores.assign(scores.row(i).data(),
                            scores.row(i).data() + scores.cols());
    scored[i].label = items[i].label;
    scored[i].condition = items[i].condition;
  }
  const TcnConfig& mc = model.config();
  const Report report =
      ReportByCondition(scored, cmd.target_fars, &mc, ToString(mc.fusion));
  const std::string table = FormatReportTable(report);
  out << table;
  if (!cmd.out.empty()) {
    fs::create_directories(cmd.out);
    WriteText(cmd.out / "report.txt", table);
    WriteText(cmd.out / "report.jsonl", FormatReportJsonl(report));
  }
}

double RunAec(const AecCommand& cmd, std::ostream& out) {
  if (cmd.kind != "nlms" && cmd.kind != "wiener") {
    throw ConfigError("unknown canceller '" + cmd.kind + "' (nlms|wiener)");
  }
  if (cmd.kind == "wiener" && cmd.target.empty()) {
    throw ConfigError("the wiener canceller needs the oracle target (--target)");
  }
  if (cmd.out.empty()) throw ConfigError("aec needs an output path");
  const AudioBuffer y = ReadWav(cmd.mixture);
  const AudioBuffer r = ReadWav(cmd.reference);
  if (y.size() != r.size()) {
    throw DataError("mixture and reference lengths differ");
  }
  std::optional<AudioBuffer> u;
  if (!cmd.target.empty()) {
    u = ReadWav(cmd.target);
    if (u->size() != y.size()) throw DataError("target length differs");
  }
  const AudioBuffer e = cmd.kind == "nlms"
                            ? NlmsCancel(y, r)
                            : WienerOracleCancel(y, r, *u).output;
  if (fs::path dir = cmd.out.parent_path(); !dir.empty()) {
    fs::create_directories(dir);
  }
  WriteWav(cmd.out, e);

  double erle = 0.0;
  if (u) {
    std::vector<double> before(y.size()), after(y.size());
    for (size_t i = 0; i < y.size(); ++i) {
      before[i] = y.samples[i] - u->samples[i];
      after[i] = e.samples[i] - u->samples[i];
    }
    erle = ErleDb(before, after);
  } else {
    erle = ErleDb(y.samples, e.samples);
  }
  char line[64];
  std::snprintf(line, sizeof(line), "erle_db\t%.3f\n", erle);
  out << line;
  return erle;
}

std::string FormatCostTable(const TcnConfig& base) {
  std::ostringstream s;
  s << "fusion\tplayback\tparams\tflops_per_frame\n";
  for (Fusion f : AllFusions()) {
    TcnConfig c = base;
    c.fusion = f;
    for (bool playback : {false, true}) {
      const CostReport r = CountCost(c, playback);
      s << ToString(f) << '\t' << (playback ? "yes" : "no") << '\t' << r.params
        << '\t' << r.flops_per_frame << '\n';
    }
  }
  return s.str();
}

void RunCost(const CostCommand& cmd, std::ostream& out) {
  TcnConfig model;
  if (!cmd.config.empty()) model = LoadExperimentConfig(cmd.config).model;
  if (cmd.num_classes) model.num_classes = *cmd.num_classes;
  model.Validate();
  out << FormatCostTable(model);
}

void RunFixture(const FixtureCommand& cmd, std::ostream& out) {
  if (cmd.out.empty()) throw ConfigError("fixture needs an output directory");
  CorpusOptions co;
  co.seed = DeriveSeed(cmd.seed, {1});
  co.train_speakers = cmd.train_speakers;
  co.dev_speakers = cmd.dev_speakers;
  co.test_speakers = cmd.test_speakers;
  co.repetitions = cmd.repetitions;
  WriteKeywordCorpus(cmd.out / "gscv2", co);
  InterfererOptions io;
  io.clips = cmd.interferer_clips;
  io.seconds = cmd.interferer_seconds;
  io.seed = DeriveSeed(cmd.seed, {2});
  WriteTtsCorpus(cmd.out / "tts", io);
  io.seed = DeriveSeed(cmd.seed, {3});
  WriteMusicCorpus(cmd.out / "music", io);
  out << "gscv2\t" << (cmd.out / "gscv2").string() << '\n'
      << "tts\t" << (cmd.out / "tts").string() << '\n'
      << "music\t" << (cmd.out / "music").string() << '\n';
}

}  // namespace iaec
