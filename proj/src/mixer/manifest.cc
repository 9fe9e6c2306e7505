// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/manifest.h"

#include <fstream>

#include "iaec/errors.h"
#include "json.hpp"

namespace iaec {
namespace {

using nlohmann::json;

json ToJson(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Vec3 Vec3FromJson(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json ToJson(const RoomConfig& c) {
  return json{{"length", c.length},
              {"width", c.width},
              {"height", c.height},
              {"t60", c.t60},
              {"source_pos", ToJson(c.source_pos)},
              {"mic_pos", ToJson(c.mic_pos)},
              {"mic_orientation", ToJson(c.mic_orientation)},
              {"mic_pattern",
               c.mic_pattern == MicPattern::kCardioid ? "cardioid" : "omni"}};
}

RoomConfig RoomFromJson(const json& j) {
  RoomConfig c;
  c.length = j.at("length").get<double>();
  c.width = j.at("width").get<double>();
  c.height = j.at("height").get<double>();
  c.t60 = j.at("t60").get<double>();
  c.source_pos = Vec3FromJson(j.at("source_pos"));
  c.mic_pos = Vec3FromJson(j.at("mic_pos"));
  c.mic_orientation = Vec3FromJson(j.at("mic_orientation"));
  const std::string pattern = j.at("mic_pattern").get<std::string>();
  if (pattern != "cardioid" && pattern != "omni") {
    throw DataError("unknown mic pattern " + pattern);
  }
  c.mic_pattern =
      pattern == "cardioid" ? MicPattern::kCardioid : MicPattern::kOmni;
  return c;
}

}  // namespace

std::string ToString(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "?";
}

std::string ToString(Condition c) {
  switch (c) {
    case Condition::kNonPlayback: return "non_playback";
    case Condition::kPlaybackTts: return "playback_tts";
    case Condition::kPlaybackMusic: return "playback_music";
  }
  return "?";
}

Split ParseSplit(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "dev") return Split::kDev;
  if (s == "test") return Split::kTest;
  throw DataError("unknown split '" + s + "'");
}

Condition ParseCondition(const std::string& s) {
  if (s == "non_playback") return Condition::kNonPlayback;
  if (s == "playback_tts") return Condition::kPlaybackTts;
  if (s == "playback_music") return Condition::kPlaybackMusic;
  throw DataError("unknown condition '" + s + "'");
}

void WriteManifest(const std::filesystem::path& path, const Manifest& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write manifest " + path.string());
  json header{{"type", "header"},
              {"schema_version", Manifest::kSchemaVersion},
              {"master_seed", m.master_seed},
              {"labels", m.labels}};
  out << header.dump() << '\n';
  for (const ManifestEntry& e : m.entries) {
    json j{{"mixture_path", e.mixture_path},
           {"reference_path", e.reference_path},
           {"target_path", e.target_path},
           {"interferer_path", e.interferer_path},
           {"label", e.label},
           {"keyword", e.keyword},
           {"sir_db", e.sir_db},
           {"requested_sir_db", e.requested_sir_db},
           {"room_seed", e.room_seed},
           {"split", ToString(e.split)},
           {"condition", ToString(e.condition)},
           {"interferer_source", e.interferer_source},
           {"interferer_offset", e.interferer_offset}};
    if (e.room) j["room"] = ToJson(*e.room);
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

Manifest ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  Manifest m;
  m.base_dir = path.parent_path();
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      json j = json::parse(line);
      if (!have_header) {
        if (j.value("type", "") != "header") {
          throw DataError("first line must be the manifest header");
        }
        if (j.at("schema_version").get<int>() != Manifest::kSchemaVersion) {
          throw DataError("unsupported manifest schema version");
        }
        m.master_seed = j.at("master_seed").get<uint64_t>();
        m.labels = j.at("labels").get<std::vector<std::string>>();
        have_header = true;
        continue;
      }
      ManifestEntry e;
      e.mixture_path = j.at("mixture_path").get<std::string>();
      e.reference_path = j.at("reference_path").get<std::string>();
      e.target_path = j.at("target_path").get<std::string>();
      e.interferer_path = j.value("interferer_path", "");
      e.label = j.at("label").get<int>();
      e.keyword = j.value("keyword", "");
      e.sir_db = j.at("sir_db").get<double>();
      e.requested_sir_db = j.value("requested_sir_db", e.sir_db);
      e.room_seed = j.at("room_seed").get<uint64_t>();
      e.split = ParseSplit(j.at("split").get<std::string>());
      e.condition = ParseCondition(j.at("condition").get<std::string>());
      e.interferer_source = j.value("interferer_source", "");
      e.interferer_offset = j.value("interferer_offset", int64_t{0});
      if (j.contains("room")) e.room = RoomFromJson(j.at("room"));
      if (e.label < 0 || e.label >= static_cast<int>(m.labels.size())) {
        throw DataError("label out of range");
      }
      if (e.playback() && e.reference_path.empty()) {
        throw DataError("playback entry without reference");
      }
      m.entries.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw DataError(where + ": " + ex.what());
    } catch (const DataError& ex) {
      throw DataError(where + ": " + ex.what());
    }
  }
  if (!have_header) throw DataError(path.string() + ": empty manifest");
  return m;
}

}  // namespace iaec
