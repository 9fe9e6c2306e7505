// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_ROOMSIM_H_
#define IAEC_ROOMSIM_H_

#include <array>
#include <optional>
#include <vector>

#include "iaec/audio.h"
#include "iaec/rng.h"

namespace iaec {

using Vec3 = std::array<double, 3>;

enum class MicPattern { kOmni, kCardioid };

// Shoebox room holding a loudspeaker (source) and a device microphone.
struct RoomConfig {
  double length = 5.0;  // x, metres
  double width = 4.0;   // y
  double height = 2.7;  // z
  double t60 = 0.4;     // seconds
  Vec3 source_pos{1.0, 1.0, 1.0};
  Vec3 mic_pos{1.03, 1.0, 1.0};
  Vec3 mic_orientation{1.0, 0.0, 0.0};  // unit vector
  MicPattern mic_pattern = MicPattern::kCardioid;

  double area() const { return length * width; }
  double volume() const { return length * width * height; }
  double surface() const {
    return 2.0 * (length * width + length * height + width * height);
  }
};

struct RoomSamplerOptions {
  double min_area = 10.0;
  double max_area = 50.0;
  double min_t60 = 0.2;
  double max_t60 = 0.6;
  double min_aspect = 0.5;
  double max_aspect = 2.0;
  double min_height = 2.4;
  double max_height = 3.5;
  double wall_margin = 0.3;
  double mic_radius = 0.05;
};

// Draws a room in the device-playback configuration: the microphone sits
// within mic_radius of the loudspeaker and points away from it.
RoomConfig SampleRoomConfig(Rng& rng, const RoomSamplerOptions& opts = {});

// Throws ConfigError when positions are outside the room, the orientation is
// not a unit vector, or source and mic coincide.
void ValidateRoomConfig(const RoomConfig& config);

struct ImpulseResponse {
  std::vector<double> taps;
  double direct_path_delay = 0.0;  // samples, fractional
};

enum class AbsorptionModel {
  kSabine,  // alpha = 0.161 V / (S T60)
  kEyring,  // alpha = 1 - exp(-0.161 V / (S T60))
  // Matches the decay of the image-source energy envelope itself: the
  // envelope is averaged over arrival directions (reflections per metre
  // travelled depend on direction in a shoebox) and the reflection
  // coefficient is solved so its Schroeder T60 equals the target.
  kImageDecay,
};

struct ImageSourceOptions {
  double speed_of_sound = 343.0;
  // RIR length as a multiple of T60.
  double duration_factor = 1.0;
  int interp_taps = 81;  // windowed-sinc fractional delay, odd
  AbsorptionModel absorption_model = AbsorptionModel::kImageDecay;
  // DC-removal high-pass applied to the finished RIR; 0 disables it.
  double highpass_hz = 100.0;
  // Overrides the T60-derived energy absorption coefficient when set.
  std::optional<double> absorption;
};

// Uniform wall energy absorption reproducing config.t60 under the model.
double WallAbsorption(const RoomConfig& config, AbsorptionModel model,
                      double duration_factor = 1.0,
                      double speed_of_sound = 343.0);

// Gain of the microphone for a wave arriving from `direction` (mic to image).
double MicGain(const RoomConfig& config, const Vec3& direction);

ImpulseResponse ImageSourceRir(const RoomConfig& config,
                               const ImageSourceOptions& opts = {});

// Reverberation time from Schroeder backward integration, fitting a line to
// the energy decay curve between -5 and -35 dB and extrapolating to -60 dB.
// Returns nullopt when the curve never reaches the lower fit limit.
std::optional<double> SchroederT60(const std::vector<double>& taps,
                                   int sample_rate = kSampleRate,
                                   double fit_hi_db = -5.0,
                                   double fit_lo_db = -35.0);

struct PlaybackPathOptions {
  double tail_seconds = 0.5;
};

// n = r * h, keeping len(r) plus the configured reverberation tail.
AudioBuffer ApplyPlaybackPath(const AudioBuffer& reference,
                              const ImpulseResponse& rir,
                              const PlaybackPathOptions& opts = {});

}  // namespace iaec

#endif  // IAEC_ROOMSIM_H_
