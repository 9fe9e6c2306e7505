// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_WAV_H_
#define IAEC_WAV_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "iaec/audio.h"

namespace iaec {

// Only mono 16-bit PCM at 16 kHz is accepted; anything else is a DataError.
// There is no resampling or channel mixing.
std::vector<int16_t> ReadWavPcm16(const std::filesystem::path& path);
void WriteWavPcm16(const std::filesystem::path& path,
                   const std::vector<int16_t>& pcm);

// Float views scale by 1/32768. Writing rounds to nearest and saturates.
AudioBuffer ReadWav(const std::filesystem::path& path);
void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio);

std::vector<int16_t> QuantizePcm16(std::span<const double> x);
AudioBuffer FromPcm16(const std::vector<int16_t>& pcm);

}  // namespace iaec

#endif  // IAEC_WAV_H_
