// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/speechcommands_mix.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "iaec/mixer.h"
#include "iaec/rng.h"
#include "iaec/wav.h"

namespace iaec {
namespace fs = std::filesystem;

namespace {

std::set<std::string> ReadList(const fs::path& path) {
  std::set<std::string> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (!line.empty()) out.insert(line);
  }
  return out;
}

double PcmPower(const std::vector<int16_t>& x) {
  double e = 0.0;
  for (int16_t v : x) e += static_cast<double>(v) * v;
  return x.empty() ? 0.0 : e / x.size();
}

std::string Rel(const fs::path& p, const fs::path& base) {
  return fs::proximate(p, base).generic_string();
}

}  // namespace

std::vector<fs::path> ListWavs(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw DataError("missing directory " + dir.string());
  }
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".wav") {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<GscClip> ScanGscv2(const fs::path& dir,
                               std::vector<std::string>* labels,
                               const std::vector<std::string>& keywords) {
  if (!fs::is_directory(dir)) {
    throw DataError("missing GSCv2 directory " + dir.string());
  }
  std::vector<std::string> names = keywords;
  if (names.empty()) {
    for (const auto& e : fs::directory_iterator(dir)) {
      const std::string n = e.path().filename().string();
      if (e.is_directory() && !n.empty() && n[0] != '_') names.push_back(n);
    }
    std::sort(names.begin(), names.end());
  }
  if (names.empty()) throw DataError("no keyword directories in " + dir.string());
  const auto dev = ReadList(dir / "validation_list.txt");
  const auto test = ReadList(dir / "testing_list.txt");
  std::vector<GscClip> clips;
  for (size_t label = 0; label < names.size(); ++label) {
    for (const fs::path& p : ListWavs(dir / names[label])) {
      GscClip c;
      c.path = p;
      c.keyword = names[label];
      c.label = static_cast<int>(label);
      const std::string key = names[label] + "/" + p.filename().string();
      c.split = test.count(key) ? Split::kTest
                                : (dev.count(key) ? Split::kDev : Split::kTrain);
      clips.push_back(std::move(c));
    }
  }
  if (labels) *labels = names;
  return clips;
}

Split InterfererSplit(size_t index) {
  switch (index % 10) {
    case 8: return Split::kDev;
    case 9: return Split::kTest;
    default: return Split::kTrain;
  }
}

PlaybackExample SynthesizePlayback(
    const std::vector<int16_t>& target,
    const std::vector<std::vector<int16_t>>& pool, uint64_t seed,
    const SynthOptions& opts) {
  if (pool.empty()) throw DataError("empty interferer pool");
  if (PcmPower(target) <= 0.0) {
    throw ZeroEnergyError("target clip is silent");
  }
  Rng rng(seed);
  const size_t len = target.size();
  PlaybackExample ex;

  std::vector<double> reference;
  for (int attempt = 0;; ++attempt) {
    if (attempt > opts.max_retries) {
      throw ZeroEnergyError("no non-silent interferer segment found");
    }
    ex.interferer_index =
        UniformInt(rng, 0, static_cast<int>(pool.size()) - 1);
    const auto& src = pool[ex.interferer_index];
    ex.interferer_offset =
        src.size() > len
            ? UniformInt(rng, 0, static_cast<int>(src.size() - len))
            : 0;
    reference.assign(len, 0.0);
    for (size_t i = 0; i < len && ex.interferer_offset + i < src.size(); ++i) {
      reference[i] = src[ex.interferer_offset + i] / 32768.0;
    }
    if (Energy(reference) > 0.0) break;
  }

  ex.room = SampleRoomConfig(rng, opts.room);
  const ImpulseResponse rir = ImageSourceRir(ex.room, opts.rir);
  AudioBuffer n = ApplyPlaybackPath(AudioBuffer(reference), rir, opts.playback);
  n.samples.resize(len, 0.0);
  if (Energy(n.samples) <= 0.0) {
    throw ZeroEnergyError("reverberated interferer is silent");
  }

  std::vector<double> u(len);
  for (size_t i = 0; i < len; ++i) u[i] = target[i] / 32768.0;
  const double pu = MeanPower(u);
  const double pn = MeanPower(n.samples);

  for (int attempt = 0;; ++attempt) {
    if (attempt > opts.max_retries) {
      throw NumericalError("could not realise an in-range SIR");
    }
    ex.requested_sir_db = Uniform(rng, opts.min_sir_db, opts.max_sir_db);
    const double g = SirGain(pu, pn, ex.requested_sir_db);
    double peak = 0.0;
    for (size_t i = 0; i < len; ++i) {
      peak = std::max(peak, std::abs(u[i] + g * n.samples[i]));
    }
    const double scale = peak > opts.headroom ? opts.headroom / peak : 1.0;
    std::vector<double> us(len), ns(len);
    for (size_t i = 0; i < len; ++i) {
      us[i] = u[i] * scale;
      ns[i] = g * n.samples[i] * scale;
    }
    ex.target = scale == 1.0 ? target : QuantizePcm16(us);
    ex.interferer = QuantizePcm16(ns);
    const double pt = PcmPower(ex.target), pi = PcmPower(ex.interferer);
    if (!(pt > 0.0 && pi > 0.0)) continue;
    ex.sir_db = 10.0 * std::log10(pt / pi);
    // Quantisation moves the realised SIR slightly; keep it inside the range.
    if (ex.sir_db < opts.min_sir_db || ex.sir_db > opts.max_sir_db) continue;
    break;
  }
  ex.mixture.resize(len);
  for (size_t i = 0; i < len; ++i) {
    ex.mixture[i] = static_cast<int16_t>(ex.target[i] + ex.interferer[i]);
  }
  ex.reference = QuantizePcm16(reference);
  return ex;
}

Manifest BuildSpeechCommandsMix(const fs::path& gscv2_dir,
                                const std::vector<InterfererCorpus>& corpora,
                                const fs::path& out_dir,
                                const SynthOptions& opts) {
  Manifest manifest;
  manifest.master_seed = opts.seed;
  manifest.base_dir = out_dir;
  const std::vector<GscClip> clips =
      ScanGscv2(gscv2_dir, &manifest.labels, opts.keywords);
  fs::create_directories(out_dir);

  for (const GscClip& c : clips) {
    ManifestEntry e;
    e.mixture_path = Rel(c.path, out_dir);
    e.target_path = e.mixture_path;
    e.label = c.label;
    e.keyword = c.keyword;
    e.split = c.split;
    e.condition = Condition::kNonPlayback;
    manifest.entries.push_back(std::move(e));
  }

  struct Job {
    size_t clip;
    int variant;
  };
  for (const InterfererCorpus& corpus : corpora) {
    const std::vector<fs::path> files = ListWavs(corpus.dir);
    if (files.empty()) throw DataError("no WAVs in " + corpus.dir.string());
    std::map<Split, std::vector<int>> split_files;
    std::vector<std::vector<int16_t>> audio(files.size());
    for (size_t i = 0; i < files.size(); ++i) {
      audio[i] = ReadWavPcm16(files[i]);
      split_files[opts.disjoint_interferer_splits ? InterfererSplit(i)
                                                  : Split::kTrain]
          .push_back(static_cast<int>(i));
    }
    auto pool_for = [&](Split s) -> const std::vector<int>& {
      if (!opts.disjoint_interferer_splits) return split_files[Split::kTrain];
      auto it = split_files.find(s);
      if (it == split_files.end() || it->second.empty()) {
        throw DataError(corpus.dir.string() + " has no interferers for the " +
                        ToString(s) + " split");
      }
      return it->second;
    };
    std::map<Split, std::vector<std::vector<int16_t>>> pools;
    for (Split s : {Split::kTrain, Split::kDev, Split::kTest}) {
      for (int idx : pool_for(s)) pools[s].push_back(audio[idx]);
    }

    std::vector<Job> jobs;
    for (size_t i = 0; i < clips.size(); ++i) {
      for (int v = 0; v < opts.variants_per_clip; ++v) jobs.push_back({i, v});
    }
    std::vector<ManifestEntry> entries(jobs.size());
    const std::string cond = ToString(corpus.condition);
    auto run = [&](size_t begin, size_t step) {
      for (size_t j = begin; j < jobs.size(); j += step) {
        const GscClip& c = clips[jobs[j].clip];
        const uint64_t seed = DeriveSeed(
            opts.seed, {static_cast<uint64_t>(corpus.condition),
                        jobs[j].clip, static_cast<uint64_t>(jobs[j].variant)});
        const auto& pool_idx = pool_for(c.split);
        PlaybackExample ex =
            SynthesizePlayback(ReadWavPcm16(c.path), pools.at(c.split), seed,
                               opts);
        const fs::path dir = out_dir / cond / ToString(c.split) / c.keyword;
        fs::create_directories(dir);
        const std::string stem = c.path.stem().string() + "_v" +
                                 std::to_string(jobs[j].variant);
        const fs::path mix = dir / (stem + "_mix.wav");
        const fs::path ref = dir / (stem + "_ref.wav");
        const fs::path tgt = dir / (stem + "_tgt.wav");
        const fs::path itf = dir / (stem + "_int.wav");
        WriteWavPcm16(mix, ex.mixture);
        WriteWavPcm16(ref, ex.reference);
        WriteWavPcm16(tgt, ex.target);
        WriteWavPcm16(itf, ex.interferer);
        ManifestEntry& e = entries[j];
        e.mixture_path = Rel(mix, out_dir);
        e.reference_path = Rel(ref, out_dir);
        e.target_path = Rel(tgt, out_dir);
        e.interferer_path = Rel(itf, out_dir);
        e.label = c.label;
        e.keyword = c.keyword;
        e.sir_db = ex.sir_db;
        e.requested_sir_db = ex.requested_sir_db;
        e.room_seed = seed;
        e.split = c.split;
        e.condition = corpus.condition;
        e.room = ex.room;
        e.interferer_source =
            Rel(files[pool_idx[ex.interferer_index]], out_dir);
        e.interferer_offset = ex.interferer_offset;
      }
    };
    const size_t workers = static_cast<size_t>(std::max(1, opts.jobs));
    if (workers == 1) {
      run(0, 1);
    } else {
      std::vector<std::thread> threads;
      for (size_t w = 0; w < workers; ++w) threads.emplace_back(run, w, workers);
      for (auto& t : threads) t.join();
    }
    for (auto& e : entries) manifest.entries.push_back(std::move(e));
  }
  WriteManifest(out_dir / "manifest.jsonl", manifest);
  return manifest;
}

}  // namespace iaec
