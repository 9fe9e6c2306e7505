// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_SPEECHCOMMANDS_MIX_H_
#define IAEC_SPEECHCOMMANDS_MIX_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "iaec/manifest.h"
#include "iaec/roomsim.h"

namespace iaec {

// A Speech Commands style corpus: one directory per keyword plus
// validation_list.txt / testing_list.txt naming dev and test clips as
// "keyword/file.wav". Directories starting with '_' are ignored.
struct GscClip {
  std::filesystem::path path;
  std::string keyword;
  int label = -1;
  Split split = Split::kTrain;
};

// Labels are the sorted keyword directory names, or `keywords` in the given
// order when non-empty.
std::vector<GscClip> ScanGscv2(const std::filesystem::path& dir,
                               std::vector<std::string>* labels,
                               const std::vector<std::string>& keywords = {});

struct InterfererCorpus {
  Condition condition = Condition::kPlaybackTts;
  std::filesystem::path dir;  // pre-segmented mono 16 kHz WAVs
};

struct SynthOptions {
  uint64_t seed = 0;
  int variants_per_clip = 1;
  double min_sir_db = -12.0;
  double max_sir_db = 3.0;
  // Peak limit for the stored mixture; target and interferer are scaled
  // together when the mix would exceed it.
  double headroom = 0.99;
  // Interferer files are assigned to train/dev/test by index (8:1:1) so test
  // mixtures never reuse training playback.
  bool disjoint_interferer_splits = true;
  int jobs = 1;
  int max_retries = 16;
  std::vector<std::string> keywords;
  RoomSamplerOptions room;
  ImageSourceOptions rir;
  PlaybackPathOptions playback;
};

// Result of synthesising one playback example, all as 16-bit PCM.
// mixture == target + interferer exactly.
struct PlaybackExample {
  std::vector<int16_t> mixture;
  std::vector<int16_t> reference;
  std::vector<int16_t> target;
  std::vector<int16_t> interferer;
  double sir_db = 0.0;
  double requested_sir_db = 0.0;
  RoomConfig room;
  int interferer_index = -1;
  int64_t interferer_offset = 0;
};

// Deterministic in (target, pool, seed, opts).
PlaybackExample SynthesizePlayback(const std::vector<int16_t>& target,
                                   const std::vector<std::vector<int16_t>>& pool,
                                   uint64_t seed, const SynthOptions& opts);

Split InterfererSplit(size_t index);

// Writes mixture/reference/target/interferer WAVs under out_dir and
// out_dir/manifest.jsonl. Non-playback entries point at the original clips.
Manifest BuildSpeechCommandsMix(const std::filesystem::path& gscv2_dir,
                                const std::vector<InterfererCorpus>& corpora,
                                const std::filesystem::path& out_dir,
                                const SynthOptions& opts);

std::vector<std::filesystem::path> ListWavs(const std::filesystem::path& dir);

}  // namespace iaec

#endif  // IAEC_SPEECHCOMMANDS_MIX_H_
