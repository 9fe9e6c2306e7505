// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// End-to-end runs of the `iaec` binary on a small synthetic corpus.

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "iaec/audio.h"
#include "iaec/manifest.h"
#include "iaec/wav.h"
#include "json.hpp"
#include "testing/test_util.h"

namespace iaec {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string Quote(const std::string& s) { return "'" + s + "'"; }

RunResult RunCli(const std::string& args) {
  static int counter = 0;
  const fs::path base = fs::temp_directory_path() /
                        ("iaec_cli_" + std::to_string(::getpid()) + "_" +
                         std::to_string(counter++));
  const std::string cmd = Quote(IAEC_CLI) + " " + args + " > " +
                          Quote(base.string() + ".out") + " 2> " +
                          Quote(base.string() + ".err");
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = Slurp(base.string() + ".out");
  r.err = Slurp(base.string() + ".err");
  fs::remove(base.string() + ".out");
  fs::remove(base.string() + ".err");
  return r;
}

std::string ExperimentYaml(const std::string& fusion, const std::string& strategy,
                           const std::string& out_dir) {
  return "schema_version: 1\n"
         "seed: 5\n"
         "output_dir: " + out_dir + "\n"
         "data:\n"
         "  manifest: mix/manifest.jsonl\n"
         "model:\n"
         "  fusion: " + fusion + "\n"
         "  bottleneck: 8\n"
         "  hidden: 12\n"
         "  blocks_per_repeat: 2\n"
         "  dilations: [1, 2]\n"
         "  num_classes: 3\n"
         "train:\n"
         "  strategy: " + strategy + "\n"
         "  max_epochs: 2\n"
         "  patience: 1\n"
         "  batch_size: 16\n"
         "eval:\n"
         "  target_fars: [0.05]\n";
}

// One corpus shared by every test: three keywords, one playback condition
// per interferer corpus.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / ("iaec_cli_suite_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    const RunResult f = RunCli("fixture --out " + Quote((root_ / "data").string()) +
                            " --seed 3 --train-speakers 3 --dev-speakers 1"
                            " --test-speakers 1 --interferers 10"
                            " --interferer-seconds 1.5");
    ASSERT_EQ(f.code, 0) << f.err;
    const RunResult s = RunCli(
        "synth --gscv2 " + Quote((root_ / "data" / "gscv2").string()) +
        " --tts " + Quote((root_ / "data" / "tts").string()) + " --music " +
        Quote((root_ / "data" / "music").string()) + " --out " +
        Quote((root_ / "mix").string()) +
        " --seed 11 --jobs 2 --keywords yes,no,up");
    ASSERT_EQ(s.code, 0) << s.err;
    synth_out_ = s.out;
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static fs::path WriteConfig(const std::string& name, const std::string& yaml) {
    const fs::path p = root_ / name;
    std::ofstream(p) << yaml;
    return p;
  }

  static fs::path root_;
  static std::string synth_out_;
};

fs::path CliTest::root_;
std::string CliTest::synth_out_;

TEST_F(CliTest, SynthReportsEveryConditionAndSplit) {
  EXPECT_NE(synth_out_.find("labels\t3"), std::string::npos) << synth_out_;
  for (const char* c : {"non_playback", "playback_tts", "playback_music"}) {
    for (const char* s : {"train", "dev", "test"}) {
      EXPECT_NE(synth_out_.find(std::string(c) + "\t" + s + "\t"),
                std::string::npos)
          << c << " " << s;
    }
  }
  const Manifest m = ReadManifest(root_ / "mix" / "manifest.jsonl");
  EXPECT_EQ(m.labels.size(), 3u);
  // 5 speakers x 3 keywords, three conditions.
  EXPECT_EQ(m.entries.size(), 45u);
}

TEST_F(CliTest, TrainThenEvalIsReproducible) {
  const fs::path cfg =
      WriteConfig("mask.yaml", ExperimentYaml("mask_d2", "both", "run_mask"));
  const RunResult dry = RunCli("train --dry-run --config " + Quote(cfg.string()));
  ASSERT_EQ(dry.code, 0) << dry.err;
  EXPECT_NE(dry.out.find("\"fusion\": \"mask_d2\""), std::string::npos);
  EXPECT_FALSE(fs::exists(root_ / "run_mask"));

  const RunResult t = RunCli("train --config " + Quote(cfg.string()));
  ASSERT_EQ(t.code, 0) << t.err;
  const fs::path run = root_ / "run_mask";
  for (const char* f : {"checkpoint.bin", "train_log.tsv", "config.json"}) {
    EXPECT_TRUE(fs::exists(run / f)) << f;
  }
  const std::string ckpt = Quote((run / "checkpoint.bin").string());
  const std::string manifest = Quote((root_ / "mix" / "manifest.jsonl").string());
  const std::string eval = "eval --checkpoint " + ckpt + " --manifest " + manifest;

  const RunResult a = RunCli(eval + " --out " + Quote((root_ / "ea").string()));
  const RunResult b = RunCli(eval + " --out " + Quote((root_ / "eb").string()));
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  const std::string ja = Slurp(root_ / "ea" / "report.jsonl");
  EXPECT_EQ(ja, Slurp(root_ / "eb" / "report.jsonl"));

  std::map<std::string, nlohmann::json> rows;
  std::istringstream in(ja);
  for (std::string line; std::getline(in, line);) {
    const auto j = nlohmann::json::parse(line);
    rows[j.at("condition").get<std::string>()] = j;
  }
  ASSERT_EQ(rows.size(), 4u) << ja;
  EXPECT_EQ(rows.at("non_playback").at("count"), 3);
  EXPECT_EQ(rows.at("all").at("count"), 9);

  // The FLOPs column is the cost table of the same model.
  const RunResult cost = RunCli("cost --config " + Quote(cfg.string()));
  ASSERT_EQ(cost.code, 0) << cost.err;
  for (const auto& [cond, playback] :
       {std::pair{"non_playback", "no"}, std::pair{"playback_tts", "yes"}}) {
    const std::string row = "mask_d2\t" + std::string(playback) + "\t" +
                            std::to_string(rows.at(cond).at("params").get<int64_t>()) +
                            "\t" +
                            std::to_string(rows.at(cond).at("flops_per_frame").get<int64_t>());
    EXPECT_NE(cost.out.find(row), std::string::npos) << row << "\n" << cost.out;
  }

  // The same weights under Baseline give the same non-playback row.
  const RunResult base = RunCli(eval + " --fusion baseline --out " +
                             Quote((root_ / "ec").string()));
  ASSERT_EQ(base.code, 0) << base.err;
  std::istringstream in2(Slurp(root_ / "ec" / "report.jsonl"));
  std::string first;
  std::getline(in2, first);
  const auto j = nlohmann::json::parse(first);
  EXPECT_EQ(j.at("condition"), "non_playback");
  EXPECT_EQ(j.at("accuracy"), rows.at("non_playback").at("accuracy"));

  // Same seed, same checkpoint.
  const RunResult again =
      RunCli("train --config " + Quote(cfg.string()) + " --out " +
          Quote((root_ / "run_mask2").string()));
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(Slurp(run / "checkpoint.bin"),
            Slurp(root_ / "run_mask2" / "checkpoint.bin"));
}

TEST_F(CliTest, CostTable) {
  const RunResult r = RunCli("cost --num-classes 35");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("baseline\tno\t130095\t249728"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("mask_d2\tno\t138479\t249728"), std::string::npos);
  EXPECT_NE(r.out.find("mask_d2\tyes\t138479\t375168"), std::string::npos);
}

TEST_F(CliTest, AecOnEchoAndNoEcho) {
  // Echo: a delayed, attenuated copy of the reference.
  const auto ref = testing::Gaussian(4 * 16000, 21, 0.1);
  std::vector<double> echo(ref.size(), 0.0), speech = testing::Gaussian(ref.size(), 22, 0.05);
  for (size_t i = 200; i < ref.size(); ++i) echo[i] = 0.5 * ref[i - 200];
  WriteWav(root_ / "ref.wav", AudioBuffer(ref));
  WriteWav(root_ / "echo.wav", AudioBuffer(echo));
  WriteWav(root_ / "speech.wav", AudioBuffer(speech));

  const std::string r = " --reference " + Quote((root_ / "ref.wav").string());
  const RunResult e = RunCli("aec --kind nlms --mixture " +
                          Quote((root_ / "echo.wav").string()) + r + " --out " +
                          Quote((root_ / "aec" / "e.wav").string()));
  ASSERT_EQ(e.code, 0) << e.err;
  ASSERT_EQ(e.out.rfind("erle_db\t", 0), 0u) << e.out;
  EXPECT_GT(std::stod(e.out.substr(8)), 10.0);
  EXPECT_EQ(ReadWav(root_ / "aec" / "e.wav").size(), ref.size());

  // No echo: the canceller has nothing to remove.
  const RunResult n = RunCli("aec --kind nlms --mixture " +
                          Quote((root_ / "speech.wav").string()) + r +
                          " --out " + Quote((root_ / "aec" / "n.wav").string()));
  ASSERT_EQ(n.code, 0) << n.err;
  EXPECT_LT(std::abs(std::stod(n.out.substr(8))), 3.0);

  // A silent reference leaves the mixture untouched.
  WriteWav(root_ / "silent.wav", AudioBuffer(std::vector<double>(ref.size(), 0.0)));
  const RunResult z = RunCli("aec --kind nlms --mixture " +
                             Quote((root_ / "speech.wav").string()) + " --reference " +
                             Quote((root_ / "silent.wav").string()) + " --out " +
                             Quote((root_ / "aec" / "z.wav").string()));
  ASSERT_EQ(z.code, 0) << z.err;
  EXPECT_EQ(ReadWavPcm16(root_ / "aec" / "z.wav"), ReadWavPcm16(root_ / "speech.wav"));

  // Oracle Wiener with no echo to remove: output stays at the input.
  const RunResult wn = RunCli("aec --kind wiener --mixture " +
                              Quote((root_ / "speech.wav").string()) + r + " --target " +
                              Quote((root_ / "speech.wav").string()) + " --out " +
                              Quote((root_ / "aec" / "wn.wav").string()));
  ASSERT_EQ(wn.code, 0) << wn.err;
  const AudioBuffer in = ReadWav(root_ / "speech.wav");
  const AudioBuffer got = ReadWav(root_ / "aec" / "wn.wav");
  double diff = 0.0;
  for (size_t i = 0; i < in.size(); ++i) diff = std::max(diff, std::abs(in.samples[i] - got.samples[i]));
  EXPECT_LE(diff, 1.0 / 32768.0);

  const RunResult w = RunCli("aec --kind wiener --mixture " +
                          Quote((root_ / "echo.wav").string()) + r +
                          " --target " + Quote((root_ / "aec" / "zero.wav").string()) +
                          " --out " + Quote((root_ / "aec" / "w.wav").string()));
  EXPECT_EQ(w.code, 2);  // target file missing
  WriteWav(root_ / "aec" / "zero.wav", AudioBuffer(std::vector<double>(ref.size(), 0.0)));
  const RunResult w2 = RunCli("aec --kind wiener --mixture " +
                           Quote((root_ / "echo.wav").string()) + r +
                           " --target " + Quote((root_ / "aec" / "zero.wav").string()) +
                           " --out " + Quote((root_ / "aec" / "w.wav").string()));
  ASSERT_EQ(w2.code, 0) << w2.err;
  EXPECT_GT(std::stod(w2.out.substr(8)), 40.0);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(RunCli("").code, 1);
  EXPECT_EQ(RunCli("frobnicate").code, 1);
  EXPECT_EQ(RunCli("cost --num-classes 0").code, 1);
  EXPECT_EQ(RunCli("train --config " + Quote((root_ / "none.yaml").string())).code, 2);

  const fs::path bad = WriteConfig(
      "bad.yaml", ExperimentYaml("mask_d2", "sometimes", "run_bad"));
  const RunResult b = RunCli("train --config " + Quote(bad.string()));
  EXPECT_EQ(b.code, 1);
  EXPECT_NE(b.err.find("train.strategy"), std::string::npos) << b.err;
  EXPECT_NE(b.err.find("bad.yaml:"), std::string::npos) << b.err;

  std::ofstream(root_ / "junk.bin") << "not a checkpoint";
  EXPECT_EQ(RunCli("eval --checkpoint " + Quote((root_ / "junk.bin").string()) +
                " --manifest " + Quote((root_ / "mix" / "manifest.jsonl").string()))
                .code,
            2);
  EXPECT_EQ(RunCli("synth --gscv2 " + Quote((root_ / "nowhere").string()) +
                " --out " + Quote((root_ / "x").string()))
                .code,
            2);
  EXPECT_EQ(RunCli("aec --kind lms --mixture a.wav --reference b.wav --out c.wav").code,
            1);
  EXPECT_EQ(RunCli("cost").code, 0);
}

}  // namespace
}  // namespace iaec
