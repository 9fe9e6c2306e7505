// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/mixer.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace iaec {

double SirGain(double target_power, double interferer_power, double sir_db) {
  if (!(target_power > 0.0) || !(interferer_power > 0.0)) {
    throw ZeroEnergyError("SIR is undefined for a zero-energy signal");
  }
  if (!std::isfinite(sir_db)) throw ConfigError("SIR must be finite");
  return std::sqrt(target_power /
                   (interferer_power * std::pow(10.0, sir_db / 10.0)));
}

double MeasureSirDb(std::span<const double> target,
                    std::span<const double> interferer) {
  const size_t n = std::min(target.size(), interferer.size());
  return 10.0 * std::log10(MeanPower(target.first(n)) /
                           MeanPower(interferer.first(n)));
}

MixResult MixAtSir(const AudioBuffer& target, const AudioBuffer& interferer,
                   double sir_db) {
  target.Validate();
  interferer.Validate();
  const size_t overlap = std::min(target.size(), interferer.size());
  const double pu = MeanPower(target.view().first(overlap));
  const double pn = MeanPower(interferer.view().first(overlap));
  MixResult out;
  out.gain = SirGain(pu, pn, sir_db);
  const size_t len = std::max(target.size(), interferer.size());
  out.scaled_interferer = AudioBuffer::Zeros(len);
  out.mixture = AudioBuffer::Zeros(len);
  for (size_t i = 0; i < interferer.size(); ++i) {
    out.scaled_interferer.samples[i] = out.gain * interferer.samples[i];
  }
  for (size_t i = 0; i < len; ++i) {
    const double u = i < target.size() ? target.samples[i] : 0.0;
    out.mixture.samples[i] = u + out.scaled_interferer.samples[i];
  }
  return out;
}

double SpectralPower(const Spectrogram& spec, int frames) {
  if (frames <= 0) return 0.0;
  return spec.frames.topRows(frames).cwiseAbs2().sum() / frames;
}

double MeasureSirDb(const Spectrogram& target, const Spectrogram& interferer) {
  const int t = std::min(target.num_frames(), interferer.num_frames());
  return 10.0 *
         std::log10(SpectralPower(target, t) / SpectralPower(interferer, t));
}

Spectrogram ShiftFrames(const Spectrogram& spec, int shift) {
  if (shift < 0) throw ConfigError("frame shift must be non-negative");
  Spectrogram out = spec;
  out.frames.setZero();
  const int t = spec.num_frames();
  if (shift < t) {
    out.frames.bottomRows(t - shift) = spec.frames.topRows(t - shift);
  }
  return out;
}

SpecTriplet AugmentTriplet(const Spectrogram& target, int target_label,
                           const Spectrogram& reference, Rng& rng,
                           const AugmentOptions& opts) {
  if (target.window_len != reference.window_len ||
      target.hop != reference.hop ||
      target.window_kind != reference.window_kind ||
      target.num_bins() != reference.num_bins()) {
    throw ConfigError("augmentation inputs use different STFT framing");
  }
  if (opts.min_shift_frames < 0 ||
      opts.max_shift_frames < opts.min_shift_frames ||
      opts.max_sir_db < opts.min_sir_db) {
    throw ConfigError("invalid augmentation ranges");
  }
  SpecTriplet tri;
  tri.label = target_label;
  tri.shift_frames =
      UniformInt(rng, opts.min_shift_frames, opts.max_shift_frames);
  tri.sir_db = Uniform(rng, opts.min_sir_db, opts.max_sir_db);

  // Interferer on the target's frame grid.
  const int frames = target.num_frames();
  Spectrogram n = target;
  n.frames.setZero();
  const int copy = std::min(frames - std::min(frames, tri.shift_frames),
                            reference.num_frames());
  if (copy > 0) {
    n.frames.middleRows(tri.shift_frames, copy) =
        reference.frames.topRows(copy);
  }
  const int overlap = std::min(frames, reference.num_frames());
  const double pu = SpectralPower(target, overlap);
  const double pn = SpectralPower(n, overlap);
  if (!(pu > 0.0) || !(pn > 0.0)) {
    throw ZeroEnergyError("augmentation pair has no energy in the overlap");
  }
  const double g = SirGain(pu, pn, tri.sir_db);
  n.frames *= g;
  tri.mixture = target;
  tri.mixture.frames = target.frames + n.frames;
  tri.reference = reference;
  tri.interferer = std::move(n);
  tri.target = target;
  return tri;
}

TripletSampler::TripletSampler(int pool_size, std::vector<int> labels,
                               SpecFn spectrogram, AugmentOptions opts,
                               int max_retries)
    : pool_size_(pool_size),
      labels_(std::move(labels)),
      spectrogram_(std::move(spectrogram)),
      opts_(opts),
      max_retries_(max_retries) {
  if (pool_size_ < 2) throw ConfigError("triplet sampling needs >= 2 clips");
  if (static_cast<int>(labels_.size()) != pool_size_) {
    throw ConfigError("label count does not match pool size");
  }
}

SpecTriplet TripletSampler::Sample(Rng& rng) const {
  for (int attempt = 0; attempt <= max_retries_; ++attempt) {
    const int i = UniformInt(rng, 0, pool_size_ - 1);
    int j = UniformInt(rng, 0, pool_size_ - 2);
    if (j >= i) ++j;
    try {
      return AugmentTriplet(spectrogram_(i), labels_[i], spectrogram_(j), rng,
                            opts_);
    } catch (const ZeroEnergyError&) {
    }
  }
  throw ZeroEnergyError("no usable augmentation pair after " +
                        std::to_string(max_retries_ + 1) + " draws");
}

SpecTriplet TripletSampler::SampleFor(int i, Rng& rng) const {
  const Spectrogram target = spectrogram_(i);
  for (int attempt = 0; attempt <= max_retries_; ++attempt) {
    int j = UniformInt(rng, 0, pool_size_ - 2);
    if (j >= i) ++j;
    try {
      return AugmentTriplet(target, labels_[i], spectrogram_(j), rng, opts_);
    } catch (const ZeroEnergyError&) {
    }
  }
  throw ZeroEnergyError("clip " + std::to_string(i) +
                        " has no usable augmentation partner");
}

}  // namespace iaec
