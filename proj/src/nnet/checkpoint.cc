// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/nnet/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "iaec/errors.h"

namespace iaec {

namespace {

constexpr char kMagic[8] = {'I', 'A', 'E', 'C', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void U32(uint32_t v) { Bytes(v, 4); }
  void U64(uint64_t v) { Bytes(v, 8); }
  void F64(double v) { U64(std::bit_cast<uint64_t>(v)); }
  void Str(const std::string& s) { out_.write(s.data(), s.size()); }

 private:
  void Bytes(uint64_t v, int n) {
    char b[8];
    for (int i = 0; i < n; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out_.write(b, n);
  }
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}
  uint32_t U32() { return static_cast<uint32_t>(Bytes(4)); }
  uint64_t U64() { return Bytes(8); }
  double F64() { return std::bit_cast<double>(U64()); }
  std::string Str(size_t n) {
    if (n > (1u << 30)) Fail("implausible string length");
    std::string s(n, '\0');
    in_.read(s.data(), n);
    if (!in_) Fail("truncated file");
    return s;
  }
  [[noreturn]] void Fail(const std::string& what) {
    throw DataError(path_ + ": " + what);
  }

 private:
  uint64_t Bytes(int n) {
    unsigned char b[8];
    in_.read(reinterpret_cast<char*>(b), n);
    if (!in_) Fail("truncated file");
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::istream& in_;
  std::string path_;
};

void WriteStore(Writer& w, const ParamStore& store) {
  w.U32(store.size());
  for (const auto& t : store.tensors()) {
    w.U32(t.name.size());
    w.Str(t.name);
    w.U32(t.value.rows());
    w.U32(t.value.cols());
    for (Eigen::Index i = 0; i < t.value.size(); ++i) w.F64(t.value.data()[i]);
  }
}

void ReadStore(Reader& r, ParamStore& store, const char* what) {
  const uint32_t count = r.U32();
  if (count != static_cast<uint32_t>(store.size())) {
    r.Fail(std::string(what) + " count " + std::to_string(count) +
           " does not match the model (" + std::to_string(store.size()) + ")");
  }
  for (uint32_t k = 0; k < count; ++k) {
    const std::string name = r.Str(r.U32());
    const uint32_t rows = r.U32(), cols = r.U32();
    const int i = store.Find(name);
    if (i < 0) r.Fail("unexpected tensor " + name);
    if (store[i].rows() != rows || store[i].cols() != cols) {
      r.Fail("shape mismatch for " + name);
    }
    for (Eigen::Index j = 0; j < store[i].size(); ++j) {
      store[i].data()[j] = r.F64();
    }
  }
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path, const Tcn& model,
                    const CheckpointMeta& meta) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    Writer w(out);
    out.write(kMagic, sizeof(kMagic));
    w.U32(kVersion);
    const nlohmann::json header = {{"model", model.config().ToJson()},
                                   {"rng_state", meta.rng_state},
                                   {"master_seed", meta.master_seed},
                                   {"labels", meta.labels},
                                   {"train", meta.train_config}};
    const std::string text = header.dump();
    w.U64(text.size());
    w.Str(text);
    WriteStore(w, model.params());
    WriteStore(w, model.buffers());
    w.U32(static_cast<uint32_t>(meta.epoch));
    w.F64(meta.dev_metric);
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Tcn LoadCheckpoint(const std::filesystem::path& path, CheckpointMeta* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  Reader r(in, path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    r.Fail("not a checkpoint");
  }
  const uint32_t version = r.U32();
  if (version != kVersion) {
    r.Fail("unsupported checkpoint version " + std::to_string(version));
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.Str(r.U64()));
  } catch (const nlohmann::json::exception& e) {
    r.Fail(std::string("bad header: ") + e.what());
  }
  Tcn model(TcnConfig::FromJson(header.at("model")));
  ReadStore(r, model.params(), "parameter");
  ReadStore(r, model.buffers(), "buffer");
  CheckpointMeta m;
  m.epoch = static_cast<int>(r.U32());
  m.dev_metric = r.F64();
  m.rng_state = header.value("rng_state", std::string());
  m.master_seed = header.value("master_seed", uint64_t{0});
  m.labels = header.value("labels", std::vector<std::string>{});
  m.train_config = header.value("train", nlohmann::json::object());
  if (meta) *meta = std::move(m);
  return model;
}

}  // namespace iaec
