// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "iaec/errors.h"
#include "iaec/experiment.h"

namespace iaec {

namespace fs = std::filesystem;

namespace {

enum class Kind {
  kInt,
  kUint,
  kDouble,
  kBool,
  kString,
  kIntList,
  kDoubleList,
  kStringList,
  kMap,
};

struct Field {
  const char* key;
  Kind kind;
  bool required = false;
};

const std::vector<Field>& TopFields() {
  static const std::vector<Field> f = {
      {"schema_version", Kind::kInt, true}, {"seed", Kind::kUint},
      {"output_dir", Kind::kString},        {"data", Kind::kMap, true},
      {"model", Kind::kMap, true},          {"train", Kind::kMap, true},
      {"eval", Kind::kMap},
  };
  return f;
}

const std::vector<Field>& DataFields() {
  static const std::vector<Field> f = {
      {"manifest", Kind::kString, true},
      {"conditions", Kind::kStringList},
  };
  return f;
}

const std::vector<Field>& ModelFields() {
  static const std::vector<Field> f = {
      {"fusion", Kind::kString, true},   {"in_features", Kind::kInt},
      {"bottleneck", Kind::kInt},        {"hidden", Kind::kInt},
      {"init_kernel", Kind::kInt},       {"init_stride", Kind::kInt},
      {"blocks_per_repeat", Kind::kInt}, {"repeats", Kind::kInt},
      {"dilations", Kind::kIntList},     {"dw_kernel", Kind::kInt},
      {"num_classes", Kind::kInt},
  };
  return f;
}

const std::vector<Field>& TrainFields() {
  static const std::vector<Field> f = {
      {"strategy", Kind::kString, true},
      {"lr", Kind::kDouble},
      {"weight_decay", Kind::kDouble},
      {"max_epochs", Kind::kInt},
      {"patience", Kind::kInt},
      {"batch_size", Kind::kInt},
      {"segment_frames", Kind::kInt},
      {"seed", Kind::kUint},
      {"orcl_probability", Kind::kDouble},
      {"spec_augment", Kind::kBool},
      {"freq_masks", Kind::kInt},
      {"max_freq_width", Kind::kInt},
      {"time_masks", Kind::kInt},
      {"max_time_width", Kind::kInt},
      {"min_shift_frames", Kind::kInt},
      {"max_shift_frames", Kind::kInt},
      {"min_sir_db", Kind::kDouble},
      {"max_sir_db", Kind::kDouble},
      {"bn_momentum", Kind::kDouble},
  };
  return f;
}

const std::vector<Field>& EvalFields() {
  static const std::vector<Field> f = {{"target_fars", Kind::kDoubleList}};
  return f;
}

const char* KindName(Kind k) {
  switch (k) {
    case Kind::kInt:
      return "an integer";
    case Kind::kUint:
      return "a non-negative integer";
    case Kind::kDouble:
      return "a number";
    case Kind::kBool:
      return "a boolean";
    case Kind::kString:
      return "a string";
    case Kind::kIntList:
      return "a list of integers";
    case Kind::kDoubleList:
      return "a list of numbers";
    case Kind::kStringList:
      return "a list of strings";
    case Kind::kMap:
      return "a mapping";
  }
  return "?";
}

class Loader {
 public:
  explicit Loader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void Fail(const YAML::Node& at, const std::string& msg) const {
    throw ConfigError(Where(at.Mark()) + ": " + msg);
  }

  std::string Where(const YAML::Mark& m) const {
    std::ostringstream s;
    s << source_;
    if (!m.is_null()) s << ':' << m.line + 1 << ':' << m.column + 1;
    return s.str();
  }

  // Checks keys and types of one mapping and converts it to JSON.
  nlohmann::json Section(const YAML::Node& node, const std::string& name,
                         const std::vector<Field>& fields) const {
    if (!node.IsMap()) Fail(node, name + " must be a mapping");
    std::set<std::string> seen;
    nlohmann::json out = nlohmann::json::object();
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      const auto it = std::find_if(fields.begin(), fields.end(),
                                   [&](const Field& f) { return key == f.key; });
      const std::string path = name.empty() ? key : name + "." + key;
      if (it == fields.end()) Fail(kv.first, "unknown field '" + path + "'");
      if (!seen.insert(key).second) Fail(kv.first, "duplicate field '" + path + "'");
      if (it->kind != Kind::kMap) out[key] = Value(kv.second, path, it->kind);
    }
    for (const auto& f : fields) {
      if (f.required && !seen.count(f.key)) {
        const std::string path = name.empty() ? f.key : name + "." + f.key;
        Fail(node, "missing required field '" + path + "'");
      }
    }
    return out;
  }

  nlohmann::json Value(const YAML::Node& v, const std::string& path,
                       Kind kind) const {
    auto bad = [&]() {
      Fail(v, "field '" + path + "' must be " + KindName(kind));
    };
    try {
      switch (kind) {
        case Kind::kInt:
          if (!v.IsScalar()) bad();
          return v.as<int>();
        case Kind::kUint:
          if (!v.IsScalar()) bad();
          return v.as<uint64_t>();
        case Kind::kDouble:
          if (!v.IsScalar()) bad();
          return v.as<double>();
        case Kind::kBool:
          if (!v.IsScalar()) bad();
          return v.as<bool>();
        case Kind::kString:
          if (!v.IsScalar()) bad();
          return v.as<std::string>();
        case Kind::kIntList:
        case Kind::kDoubleList:
        case Kind::kStringList: {
          if (!v.IsSequence()) bad();
          nlohmann::json arr = nlohmann::json::array();
          for (const auto& e : v) {
            if (!e.IsScalar()) bad();
            if (kind == Kind::kIntList) arr.push_back(e.as<int>());
            if (kind == Kind::kDoubleList) arr.push_back(e.as<double>());
            if (kind == Kind::kStringList) arr.push_back(e.as<std::string>());
          }
          return arr;
        }
        case Kind::kMap:
          break;
      }
    } catch (const YAML::BadConversion&) {
      bad();
    }
    return nullptr;
  }

  // Reruns a parse/validate step, attaching the node's location to errors.
  template <typename Fn>
  auto At(const YAML::Node& node, const std::string& section, Fn&& fn) const {
    try {
      return fn();
    } catch (const Error& e) {
      Fail(node, section + ": " + e.what());
    }
  }

 private:
  std::string source_;
};

}  // namespace

nlohmann::json ExperimentConfig::ToJson() const {
  nlohmann::json conds = nlohmann::json::array();
  for (Condition c : conditions) conds.push_back(ToString(c));
  return {{"schema_version", schema_version},
          {"seed", seed},
          {"output_dir", output_dir.string()},
          {"data", {{"manifest", manifest.string()}, {"conditions", conds}}},
          {"model", model.ToJson()},
          {"train", train.ToJson()},
          {"eval", {{"target_fars", target_fars}}}};
}

ExperimentConfig ParseExperimentConfig(const std::string& yaml,
                                       const fs::path& base_dir,
                                       const std::string& source_name) {
  const Loader L(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(L.Where(e.mark) + ": " + e.msg);
  }
  if (!root.IsMap()) {
    throw ConfigError(source_name + ": top level must be a mapping");
  }
  const nlohmann::json top = L.Section(root, "", TopFields());

  ExperimentConfig cfg;
  cfg.schema_version = top.at("schema_version").get<int>();
  if (cfg.schema_version != ExperimentConfig::kSchemaVersion) {
    L.Fail(root["schema_version"],
           "unsupported schema_version " + std::to_string(cfg.schema_version) +
               " (expected " +
               std::to_string(ExperimentConfig::kSchemaVersion) + ")");
  }
  cfg.seed = top.value("seed", uint64_t{0});

  const YAML::Node data_node = root["data"];
  const nlohmann::json data = L.Section(data_node, "data", DataFields());
  cfg.manifest = base_dir / data.at("manifest").get<std::string>();
  if (data.contains("conditions")) {
    const YAML::Node list = data_node["conditions"];
    for (size_t i = 0; i < list.size(); ++i) {
      cfg.conditions.push_back(L.At(list[i], "data.conditions", [&] {
        return ParseCondition(list[i].as<std::string>());
      }));
    }
  }

  const YAML::Node model_node = root["model"];
  const nlohmann::json model = L.Section(model_node, "model", ModelFields());
  L.At(model_node["fusion"], "model.fusion",
       [&] { return ParseFusion(model.at("fusion").get<std::string>()); });
  cfg.model = TcnConfig::FromJson(model);
  L.At(model_node, "model", [&] {
    cfg.model.Validate();
    return 0;
  });

  const YAML::Node train_node = root["train"];
  nlohmann::json train = L.Section(train_node, "train", TrainFields());
  L.At(train_node["strategy"], "train.strategy",
       [&] { return ParseStrategy(train.at("strategy").get<std::string>()); });
  if (!train.contains("segment_frames")) {
    train["segment_frames"] = ReceptiveField(cfg.model);
  }
  if (!train.contains("seed")) train["seed"] = cfg.seed;
  cfg.train = TrainConfig::FromJson(train);
  L.At(train_node, "train", [&] {
    cfg.train.Validate(cfg.model);
    return 0;
  });

  if (root["eval"]) {
    const nlohmann::json ev = L.Section(root["eval"], "eval", EvalFields());
    if (ev.contains("target_fars")) {
      cfg.target_fars = ev.at("target_fars").get<std::vector<double>>();
      for (double f : cfg.target_fars) {
        if (!(f > 0.0 && f < 1.0)) {
          L.Fail(root["eval"]["target_fars"], "eval.target_fars must lie in (0, 1)");
        }
      }
    }
  }

  cfg.output_dir = top.contains("output_dir")
                       ? base_dir / top.at("output_dir").get<std::string>()
                       : base_dir / "run";
  if (!fs::exists(cfg.manifest)) {
    throw DataError(L.Where(data_node["manifest"].Mark()) +
                    ": manifest not found: " + cfg.manifest.string());
  }
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return ParseExperimentConfig(text.str(), path.parent_path(), path.string());
}

}  // namespace iaec
