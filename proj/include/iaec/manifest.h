// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_MANIFEST_H_
#define IAEC_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "iaec/roomsim.h"

namespace iaec {

enum class Split { kTrain, kDev, kTest };
enum class Condition { kNonPlayback, kPlaybackTts, kPlaybackMusic };

std::string ToString(Split s);
std::string ToString(Condition c);
Split ParseSplit(const std::string& s);
Condition ParseCondition(const std::string& s);

// One line of a dataset manifest. Paths are stored relative to the manifest
// file; readers resolve them against Manifest::base_dir. Non-playback entries
// have empty reference/interferer paths.
struct ManifestEntry {
  std::string mixture_path;
  std::string reference_path;
  std::string target_path;
  std::string interferer_path;
  int label = -1;
  std::string keyword;
  double sir_db = 0.0;            // realised on the stored PCM
  double requested_sir_db = 0.0;  // drawn value
  uint64_t room_seed = 0;
  Split split = Split::kTrain;
  Condition condition = Condition::kNonPlayback;
  std::optional<RoomConfig> room;
  std::string interferer_source;  // corpus file the reference was cut from
  int64_t interferer_offset = 0;  // samples

  bool playback() const { return condition != Condition::kNonPlayback; }
};

// Line-delimited JSON: a header object carrying the schema version, master
// seed and label names, then one object per entry.
struct Manifest {
  static constexpr int kSchemaVersion = 1;

  uint64_t master_seed = 0;
  std::vector<std::string> labels;
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  std::filesystem::path Resolve(const std::string& rel) const {
    return base_dir / rel;
  }
};

void WriteManifest(const std::filesystem::path& path, const Manifest& m);
Manifest ReadManifest(const std::filesystem::path& path);

}  // namespace iaec

#endif  // IAEC_MANIFEST_H_
