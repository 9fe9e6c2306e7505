// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// iaec: command line front-end. See README.md for usage.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "iaec/errors.h"
#include "iaec/experiment.h"

namespace {

std::vector<std::string> SplitCommas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace iaec;
  CLI::App app{"Keyword spotting with implicit acoustic echo cancellation"};
  app.require_subcommand(1);

  SynthCommand synth;
  std::string keywords;
  auto* s = app.add_subcommand("synth", "build the playback mixtures and manifest");
  s->add_option("--gscv2", synth.gscv2_dir, "speech commands root")->required();
  s->add_option("--tts", synth.tts_dir, "TTS interferer clips");
  s->add_option("--music", synth.music_dir, "music interferer clips");
  s->add_option("--out", synth.out, "output directory")->required();
  s->add_option("--seed", synth.seed, "master seed");
  s->add_option("--jobs", synth.jobs, "worker threads")->check(CLI::PositiveNumber);
  s->add_option("--variants", synth.variants_per_clip,
                "playback variants per clip and condition")
      ->check(CLI::PositiveNumber);
  s->add_option("--keywords", keywords, "comma separated keyword subset");

  TrainCommand train;
  uint64_t train_seed = 0;
  std::string train_out;
  auto* t = app.add_subcommand("train", "train a model from an experiment file");
  t->add_option("--config", train.config, "experiment YAML")->required();
  auto* t_seed = t->add_option("--seed", train_seed, "override the master seed");
  auto* t_out = t->add_option("--out", train_out, "override the output directory");
  t->add_flag("--dry-run", train.dry_run,
              "print the resolved config and cost, then exit");

  EvalCommand eval;
  std::string split = "test", fusion;
  auto* e = app.add_subcommand("eval", "score a checkpoint on a manifest split");
  e->add_option("--checkpoint", eval.checkpoint)->required();
  e->add_option("--manifest", eval.manifest)->required();
  e->add_option("--split", split, "train|dev|test");
  e->add_option("--far", eval.target_fars, "target FARs for binary heads");
  e->add_option("--fusion", fusion, "evaluate the weights under another fusion");
  e->add_option("--out", eval.out, "write report.txt and report.jsonl here");

  AecCommand aec;
  auto* a = app.add_subcommand("aec", "run a classic echo canceller");
  a->add_option("--kind", aec.kind, "nlms|wiener");
  a->add_option("--mixture", aec.mixture)->required();
  a->add_option("--reference", aec.reference)->required();
  a->add_option("--target", aec.target, "oracle target (wiener; optional ERLE)");
  a->add_option("--out", aec.out, "filtered WAV")->required();

  CostCommand cost;
  int classes = 0;
  auto* c = app.add_subcommand("cost", "parameter and FLOPs table for every fusion");
  c->add_option("--config", cost.config, "experiment YAML for the model shape");
  auto* c_classes = c->add_option("--num-classes", classes);

  FixtureCommand fixture;
  auto* f = app.add_subcommand("fixture", "write synthetic stand-in corpora");
  f->add_option("--out", fixture.out)->required();
  f->add_option("--seed", fixture.seed);
  f->add_option("--train-speakers", fixture.train_speakers);
  f->add_option("--dev-speakers", fixture.dev_speakers);
  f->add_option("--test-speakers", fixture.test_speakers);
  f->add_option("--repetitions", fixture.repetitions);
  f->add_option("--interferers", fixture.interferer_clips, "clips per condition");
  f->add_option("--interferer-seconds", fixture.interferer_seconds);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (s->parsed()) {
      synth.keywords = SplitCommas(keywords);
      RunSynth(synth, std::cout);
    } else if (t->parsed()) {
      if (t_seed->count()) train.seed = train_seed;
      if (t_out->count()) train.out = train_out;
      RunTrain(train, std::cout);
    } else if (e->parsed()) {
      eval.split = ParseSplit(split);
      if (!fusion.empty()) eval.fusion = ParseFusion(fusion);
      RunEval(eval, std::cout);
    } else if (a->parsed()) {
      RunAec(aec, std::cout);
    } else if (c->parsed()) {
      if (c_classes->count()) cost.num_classes = classes;
      RunCost(cost, std::cout);
    } else if (f->parsed()) {
      RunFixture(fixture, std::cout);
    }
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return static_cast<int>(err.code());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return static_cast<int>(ExitCode::kData);
  }
  return 0;
}
