// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Experiment configuration and the subcommands of the `iaec` tool. The
// command functions take already-parsed options so they can be driven from
// tests as well as from the command line.

#ifndef IAEC_EXPERIMENT_H_
#define IAEC_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "iaec/manifest.h"
#include "iaec/nnet/config.h"
#include "iaec/train.h"

namespace iaec {

struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;
  int schema_version = kSchemaVersion;
  uint64_t seed = 0;
  std::filesystem::path manifest;
  std::vector<Condition> conditions;  // empty means every condition
  std::filesystem::path output_dir;
  TcnConfig model;
  TrainConfig train;
  std::vector<double> target_fars{0.01, 0.05};

  nlohmann::json ToJson() const;
};

// Parses a YAML experiment file. Relative paths are resolved against the
// file's directory. Schema problems raise ConfigError carrying
// "<file>:<line>:<col>"; a missing manifest raises DataError.
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);
ExperimentConfig ParseExperimentConfig(const std::string& yaml,
                                       const std::filesystem::path& base_dir,
                                       const std::string& source_name);

// Options shared by the file-producing commands.
struct SynthCommand {
  std::filesystem::path gscv2_dir;
  std::filesystem::path tts_dir;    // empty skips the condition
  std::filesystem::path music_dir;  // empty skips the condition
  std::filesystem::path out;
  uint64_t seed = 0;
  int jobs = 1;
  int variants_per_clip = 1;
  std::vector<std::string> keywords;
};
void RunSynth(const SynthCommand& cmd, std::ostream& out);

struct TrainCommand {
  std::filesystem::path config;
  std::optional<uint64_t> seed;
  std::optional<std::filesystem::path> out;
  bool dry_run = false;
};
// Writes checkpoint.bin, train_log.tsv and config.json under the output
// directory.
void RunTrain(const TrainCommand& cmd, std::ostream& out);

struct EvalCommand {
  std::filesystem::path checkpoint;
  std::filesystem::path manifest;
  Split split = Split::kTest;
  std::vector<double> target_fars{0.01, 0.05};
  std::optional<Fusion> fusion;  // evaluate the weights under another fusion
  std::filesystem::path out;     // empty prints only
};
void RunEval(const EvalCommand& cmd, std::ostream& out);

struct AecCommand {
  std::string kind = "nlms";  // nlms | wiener
  std::filesystem::path mixture;
  std::filesystem::path reference;
  std::filesystem::path target;  // required for wiener
  std::filesystem::path out;
};
// Returns the ERLE in dB. With a target the echo component is isolated as
// mixture - target; otherwise the full signals are compared.
double RunAec(const AecCommand& cmd, std::ostream& out);

struct CostCommand {
  std::filesystem::path config;  // optional; its model section is used
  std::optional<int> num_classes;
};
void RunCost(const CostCommand& cmd, std::ostream& out);
std::string FormatCostTable(const TcnConfig& base);

struct FixtureCommand {
  std::filesystem::path out;
  uint64_t seed = 0;
  int train_speakers = 20;
  int dev_speakers = 4;
  int test_speakers = 4;
  int repetitions = 1;
  int interferer_clips = 20;  // per condition
  double interferer_seconds = 3.0;
};
// Synthetic stand-in corpora: <out>/gscv2, <out>/tts, <out>/music.
void RunFixture(const FixtureCommand& cmd, std::ostream& out);

}  // namespace iaec

#endif  // IAEC_EXPERIMENT_H_
