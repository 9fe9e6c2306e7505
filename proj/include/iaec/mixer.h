// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_MIXER_H_
#define IAEC_MIXER_H_

#include <functional>
#include <optional>

#include "iaec/audio.h"
#include "iaec/dsp.h"
#include "iaec/errors.h"
#include "iaec/rng.h"

namespace iaec {

// y = u + n with the reference r that produced n. Interferer and target are
// oracle-only parts and are kept for synthetic data. When both are present,
// mixture == target + interferer element-wise, bit for bit.
template <typename Signal>
struct MixtureTriplet {
  Signal mixture;
  Signal reference;
  std::optional<Signal> interferer;
  std::optional<Signal> target;
  int label = -1;
  double sir_db = 0.0;
  int shift_frames = 0;
};

using WaveTriplet = MixtureTriplet<AudioBuffer>;
using SpecTriplet = MixtureTriplet<Spectrogram>;

class ZeroEnergyError : public DataError {
 public:
  using DataError::DataError;
};

struct MixResult {
  AudioBuffer mixture;
  AudioBuffer scaled_interferer;
  double gain = 1.0;
};

// Interferer gain g so that 10 log10(P_target / (g^2 P_interferer)) equals
// sir_db, with powers averaged over the overlap of the two signals.
double SirGain(double target_power, double interferer_power, double sir_db);

// Mixes at the requested SIR. The shorter input is zero-padded at the tail.
// Throws ZeroEnergyError when either signal is silent over the overlap.
MixResult MixAtSir(const AudioBuffer& target, const AudioBuffer& interferer,
                   double sir_db);

// SIR in dB over the overlap region.
double MeasureSirDb(std::span<const double> target,
                    std::span<const double> interferer);
// Mean per-frame power sum_k |X(t, k)|^2 over the first `frames` frames.
double SpectralPower(const Spectrogram& spec, int frames);
double MeasureSirDb(const Spectrogram& target, const Spectrogram& interferer);

struct AugmentOptions {
  int min_shift_frames = 15;
  int max_shift_frames = 20;  // inclusive
  double min_sir_db = -20.0;
  double max_sir_db = 3.0;
};

// Delays every frame by `shift` frames; leading frames become zero. The
// frame count is unchanged.
Spectrogram ShiftFrames(const Spectrogram& spec, int shift);

// Builds an on-the-fly playback example from two training clips. The first
// clip is the target and keeps its label, the second plays the reference and
// its label is dropped. The interferer is the reference delayed by a whole
// number of STFT frames; the emitted reference is unshifted. Mixing happens
// on complex STFT frames.
SpecTriplet AugmentTriplet(const Spectrogram& target, int target_label,
                           const Spectrogram& reference, Rng& rng,
                           const AugmentOptions& opts = {});

// Pair sampler over a pool of clips, resampling the partner when a draw has
// no energy. `spectrogram(i)` returns the STFT of clip i.
class TripletSampler {
 public:
  using SpecFn = std::function<Spectrogram(int)>;

  TripletSampler(int pool_size, std::vector<int> labels, SpecFn spectrogram,
                 AugmentOptions opts = {}, int max_retries = 16);

  // Random target and partner.
  SpecTriplet Sample(Rng& rng) const;
  // Fixed target, random partner.
  SpecTriplet SampleFor(int target_index, Rng& rng) const;

 private:
  int pool_size_;
  std::vector<int> labels_;
  SpecFn spectrogram_;
  AugmentOptions opts_;
  int max_retries_;
};

}  // namespace iaec

#endif  // IAEC_MIXER_H_
