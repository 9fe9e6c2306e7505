// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/wav.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "iaec/errors.h"

namespace iaec {
namespace {

uint32_t ReadLe32(const uint8_t* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t ReadLe16(const uint8_t* p) { return p[0] | (p[1] << 8); }

void PutLe32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void PutLe16(std::string* out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>(v >> 8));
}

}  // namespace

std::vector<int16_t> ReadWavPcm16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  const std::string where = path.string() + ": ";
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw DataError(where + "not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    uint32_t size = ReadLe32(chunk + 4);
    size_t body = pos + 8;
    if (body + size > bytes.size()) throw DataError(where + "truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw DataError(where + "short fmt chunk");
      const uint8_t* f = bytes.data() + body;
      uint16_t format = ReadLe16(f);
      uint16_t channels = ReadLe16(f + 2);
      uint32_t rate = ReadLe32(f + 4);
      uint16_t bits = ReadLe16(f + 14);
      if (format != 1) throw DataError(where + "not PCM");
      if (channels != 1) throw DataError(where + "not mono");
      if (rate != kSampleRate) {
        throw DataError(where + "sample rate " + std::to_string(rate) +
                        " != 16000");
      }
      if (bits != 16) throw DataError(where + "not 16-bit");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw DataError(where + "data before fmt");
      std::vector<int16_t> pcm(size / 2);
      for (size_t i = 0; i < pcm.size(); ++i) {
        pcm[i] = static_cast<int16_t>(ReadLe16(bytes.data() + body + 2 * i));
      }
      return pcm;
    }
    pos = body + size + (size & 1);
  }
  throw DataError(where + "no data chunk");
}

void WriteWavPcm16(const std::filesystem::path& path,
                   const std::vector<int16_t>& pcm) {
  std::string out;
  const uint32_t data_bytes = static_cast<uint32_t>(pcm.size() * 2);
  out.reserve(44 + data_bytes);
  out.append("RIFF");
  PutLe32(&out, 36 + data_bytes);
  out.append("WAVEfmt ");
  PutLe32(&out, 16);
  PutLe16(&out, 1);
  PutLe16(&out, 1);
  PutLe32(&out, kSampleRate);
  PutLe32(&out, kSampleRate * 2);
  PutLe16(&out, 2);
  PutLe16(&out, 16);
  out.append("data");
  PutLe32(&out, data_bytes);
  for (int16_t s : pcm) PutLe16(&out, static_cast<uint16_t>(s));
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("write failed for " + path.string());
}

std::vector<int16_t> QuantizePcm16(std::span<const double> x) {
  std::vector<int16_t> pcm(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double v = std::nearbyint(x[i] * 32768.0);
    v = std::min(32767.0, std::max(-32768.0, v));
    pcm[i] = static_cast<int16_t>(v);
  }
  return pcm;
}

AudioBuffer FromPcm16(const std::vector<int16_t>& pcm) {
  std::vector<double> s(pcm.size());
  for (size_t i = 0; i < pcm.size(); ++i) s[i] = pcm[i] / 32768.0;
  return AudioBuffer(std::move(s));
}

AudioBuffer ReadWav(const std::filesystem::path& path) {
  return FromPcm16(ReadWavPcm16(path));
}

void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio) {
  audio.Validate();
  WriteWavPcm16(path, QuantizePcm16(audio.samples));
}

}  // namespace iaec
