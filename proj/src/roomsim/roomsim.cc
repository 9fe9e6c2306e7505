// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/roomsim.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <numbers>

#include "iaec/dsp.h"
#include "iaec/errors.h"

namespace iaec {
namespace {

double Norm(const Vec3& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

Vec3 Sub(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

bool Inside(const RoomConfig& c, const Vec3& p) {
  return p[0] > 0.0 && p[0] < c.length && p[1] > 0.0 && p[1] < c.width &&
         p[2] > 0.0 && p[2] < c.height;
}

}  // namespace

RoomConfig SampleRoomConfig(Rng& rng, const RoomSamplerOptions& opts) {
  RoomConfig c;
  const double area = Uniform(rng, opts.min_area, opts.max_area);
  const double aspect = Uniform(rng, opts.min_aspect, opts.max_aspect);
  c.length = std::sqrt(area * aspect);
  c.width = area / c.length;
  c.height = Uniform(rng, opts.min_height, opts.max_height);
  c.t60 = Uniform(rng, opts.min_t60, opts.max_t60);
  const double dims[3] = {c.length, c.width, c.height};
  for (int i = 0; i < 3; ++i) {
    c.source_pos[i] =
        Uniform(rng, opts.wall_margin, dims[i] - opts.wall_margin);
  }
  // Uniform in the ball of radius mic_radius around the source.
  Vec3 offset;
  double r = 0.0;
  do {
    for (double& o : offset) o = Uniform(rng, -1.0, 1.0);
    r = Norm(offset);
  } while (r > 1.0 || r < 1e-3);
  for (int i = 0; i < 3; ++i) {
    c.mic_pos[i] = c.source_pos[i] + opts.mic_radius * offset[i];
    c.mic_orientation[i] = offset[i] / r;
  }
  c.mic_pattern = MicPattern::kCardioid;
  return c;
}

void ValidateRoomConfig(const RoomConfig& c) {
  if (!(c.length > 0.0 && c.width > 0.0 && c.height > 0.0)) {
    throw ConfigError("room dimensions must be positive");
  }
  if (!(c.t60 > 0.0)) throw ConfigError("t60 must be positive");
  if (!Inside(c, c.source_pos)) throw ConfigError("source outside the room");
  if (!Inside(c, c.mic_pos)) throw ConfigError("microphone outside the room");
  if (Norm(Sub(c.mic_pos, c.source_pos)) < 1e-6) {
    throw ConfigError("source and microphone coincide");
  }
  if (std::abs(Norm(c.mic_orientation) - 1.0) > 1e-9) {
    throw ConfigError("microphone orientation must be a unit vector");
  }
}

namespace {

// Calls fn(dx, dy, dz, order) for every image within max_dist of the mic,
// where (dx, dy, dz) is the mic-to-image vector and order the number of wall
// reflections. Along each axis the image coordinate is (1 - 2p) s + 2 n L
// with |n - p| + |n| hits.
template <typename Fn>
void ForEachImage(const RoomConfig& c, double max_dist, Fn&& fn) {
  const double dims[3] = {c.length, c.width, c.height};
  std::vector<std::pair<double, int>> axes[3];
  for (int a = 0; a < 3; ++a) {
    const int max_n = static_cast<int>(std::ceil(max_dist / (2.0 * dims[a]))) + 1;
    for (int n = -max_n; n <= max_n; ++n) {
      for (int p = 0; p <= 1; ++p) {
        const double pos = (1 - 2 * p) * c.source_pos[a] + 2.0 * n * dims[a];
        axes[a].emplace_back(pos - c.mic_pos[a], std::abs(n - p) + std::abs(n));
      }
    }
  }
  const double max_dist2 = max_dist * max_dist;
  for (const auto& [dx, rx] : axes[0]) {
    if (dx * dx > max_dist2) continue;
    for (const auto& [dy, ry] : axes[1]) {
      const double dxy2 = dx * dx + dy * dy;
      if (dxy2 > max_dist2) continue;
      for (const auto& [dz, rz] : axes[2]) {
        if (dxy2 + dz * dz > max_dist2) continue;
        fn(dx, dy, dz, rx + ry + rz);
      }
    }
  }
}

// Energy arriving per time bin, split by reflection order: for a reflection
// coefficient beta the binned RIR energy is sum_o hist[bin][o] beta^(2 o).
struct OrderHistogram {
  int num_bins = 0;
  int num_orders = 0;
  std::vector<double> energy;  // num_bins x num_orders
};

OrderHistogram BuildOrderHistogram(const RoomConfig& c, double duration,
                                   double c_sound, double bin_seconds) {
  OrderHistogram h;
  h.num_bins = std::max(2, static_cast<int>(std::ceil(duration / bin_seconds)));
  std::vector<std::tuple<int, int, double>> hits;
  ForEachImage(c, c_sound * duration, [&](double dx, double dy, double dz,
                                          int order) {
    const double d2 = dx * dx + dy * dy + dz * dz;
    const double g = MicGain(c, {dx, dy, dz});
    if (g == 0.0) return;
    const int bin = static_cast<int>(std::sqrt(d2) / c_sound / bin_seconds);
    if (bin >= h.num_bins) return;
    hits.emplace_back(bin, order, g * g / d2);
    h.num_orders = std::max(h.num_orders, order + 1);
  });
  h.energy.assign(static_cast<size_t>(h.num_bins) * h.num_orders, 0.0);
  for (const auto& [bin, order, e] : hits) {
    h.energy[static_cast<size_t>(bin) * h.num_orders + order] += e;
  }
  return h;
}

double HistogramT60(const OrderHistogram& h, double beta2,
                    double bin_seconds) {
  std::vector<double> pow_table(h.num_orders);
  double p = 1.0;
  for (int o = 0; o < h.num_orders; ++o, p *= beta2) pow_table[o] = p;
  std::vector<double> taps(h.num_bins);
  for (int b = 0; b < h.num_bins; ++b) {
    const double* row = h.energy.data() + static_cast<size_t>(b) * h.num_orders;
    double e = 0.0;
    for (int o = 0; o < h.num_orders; ++o) e += row[o] * pow_table[o];
    taps[b] = std::sqrt(e);
  }
  auto t60 = SchroederT60(taps, static_cast<int>(std::lround(1.0 / bin_seconds)));
  return t60.value_or(std::numeric_limits<double>::infinity());
}

// Allen & Berkley DC-removal high-pass. All image amplitudes are positive, so
// without it late taps accumulate a coherent low-frequency component.
void HighPass(double cutoff_hz, std::vector<double>* taps) {
  const double w = 2.0 * std::numbers::pi * cutoff_hz / kSampleRate;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w);
  const double b2 = -r1 * r1;
  const double a1 = -(1.0 + r1);
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& x : *taps) {
    y2 = y1;
    y1 = y0;
    y0 = b1 * y1 + b2 * y2 + x;
    x = y0 + a1 * y1 + r1 * y2;
  }
}

double ImageDecayAbsorption(const RoomConfig& c, double duration_factor,
                            double c_sound) {
  constexpr double kBin = 1e-3;
  const OrderHistogram h =
      BuildOrderHistogram(c, duration_factor * c.t60, c_sound, kBin);
  // Larger beta^2 means slower decay; bisect on beta^2 in (0, 1).
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (HistogramT60(h, mid, kBin) > c.t60) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 1.0 - 0.5 * (lo + hi);
}

}  // namespace

double WallAbsorption(const RoomConfig& c, AbsorptionModel model,
                      double duration_factor, double speed_of_sound) {
  const double sabine = 0.161 * c.volume() / (c.surface() * c.t60);
  double alpha = 0.0;
  switch (model) {
    case AbsorptionModel::kSabine:
      alpha = sabine;
      break;
    case AbsorptionModel::kEyring:
      alpha = 1.0 - std::exp(-sabine);
      break;
    case AbsorptionModel::kImageDecay:
      alpha = ImageDecayAbsorption(c, duration_factor, speed_of_sound);
      break;
  }
  return std::clamp(alpha, 0.0, 1.0);
}

double MicGain(const RoomConfig& c, const Vec3& direction) {
  if (c.mic_pattern == MicPattern::kOmni) return 1.0;
  const double n = Norm(direction);
  double cos_theta = 0.0;
  for (int i = 0; i < 3; ++i) cos_theta += c.mic_orientation[i] * direction[i];
  cos_theta = std::clamp(cos_theta / n, -1.0, 1.0);
  // Arrivals from straight behind land in the null even when the direction
  // was rebuilt from rounded positions.
  if (cos_theta < -1.0 + 1e-12) return 0.0;
  return 0.5 * (1.0 + cos_theta);
}

ImpulseResponse ImageSourceRir(const RoomConfig& c,
                               const ImageSourceOptions& opts) {
  ValidateRoomConfig(c);
  if (opts.interp_taps < 1 || opts.interp_taps % 2 == 0) {
    throw ConfigError("interpolation length must be odd");
  }
  const double fs = kSampleRate;
  const double alpha = opts.absorption ? *opts.absorption
                                       : WallAbsorption(c, opts.absorption_model,
                                                        opts.duration_factor,
                                                        opts.speed_of_sound);
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("absorption must lie in [0, 1]");
  }
  const double beta = std::sqrt(1.0 - alpha);  // pressure reflection
  const int len = static_cast<int>(std::ceil(opts.duration_factor * c.t60 * fs));
  const int half = opts.interp_taps / 2;
  const double max_dist = opts.speed_of_sound * (len + half) / fs;

  ImpulseResponse rir;
  rir.taps.assign(len, 0.0);
  rir.direct_path_delay =
      Norm(Sub(c.mic_pos, c.source_pos)) / opts.speed_of_sound * fs;

  const double pi = std::numbers::pi;
  const double win_w = 2.0 * pi / (opts.interp_taps + 1);
  const double rot_c = std::cos(win_w), rot_s = std::sin(win_w);
  ForEachImage(c, max_dist, [&](double dx, double dy, double dz, int order) {
    double gain = order == 0 ? 1.0 : std::pow(beta, order);
    if (gain == 0.0) return;
    const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
    gain *= MicGain(c, {dx, dy, dz}) / (4.0 * pi * dist);
    if (gain == 0.0) return;
    const double tau = dist / opts.speed_of_sound * fs;
    const int centre = static_cast<int>(std::lround(tau));
    const int lo = std::max(0, centre - half);
    const int hi = std::min(len - 1, centre + half);
    if (lo > hi) return;
    // sin(pi (n - tau)) alternates sign in n; evaluate it once. The window
    // phase advances by a fixed rotation per tap.
    const double s0 = std::sin(pi * (lo - tau));
    double wc = std::cos(win_w * (lo - tau)), ws = std::sin(win_w * (lo - tau));
    double sign = 1.0;
    for (int n = lo; n <= hi; ++n, sign = -sign) {
      const double x = n - tau;
      const double sinc = std::abs(x) < 1e-12 ? 1.0 : sign * s0 / (pi * x);
      rir.taps[n] += gain * 0.5 * (1.0 + wc) * sinc;
      const double next = wc * rot_c - ws * rot_s;
      ws = ws * rot_c + wc * rot_s;
      wc = next;
    }
  });
  if (opts.highpass_hz > 0.0) HighPass(opts.highpass_hz, &rir.taps);
  return rir;
}

std::optional<double> SchroederT60(const std::vector<double>& taps,
                                   int sample_rate, double fit_hi_db,
                                   double fit_lo_db) {
  const size_t n = taps.size();
  std::vector<double> edc(n);
  double acc = 0.0;
  for (size_t i = n; i-- > 0;) {
    acc += taps[i] * taps[i];
    edc[i] = acc;
  }
  if (acc <= 0.0) return std::nullopt;
  const double total = acc;
  // Least squares fit of dB vs time over the samples inside the window.
  double st = 0.0, sd = 0.0, stt = 0.0, std_ = 0.0;
  size_t count = 0;
  bool reached = false;
  for (size_t i = 0; i < n; ++i) {
    if (edc[i] <= 0.0) break;
    const double db = 10.0 * std::log10(edc[i] / total);
    if (db < fit_lo_db) {
      reached = true;
      break;
    }
    if (db <= fit_hi_db) {
      const double t = static_cast<double>(i) / sample_rate;
      st += t;
      sd += db;
      stt += t * t;
      std_ += t * db;
      ++count;
    }
  }
  if (!reached || count < 2) return std::nullopt;
  const double k = static_cast<double>(count);
  const double slope = (k * std_ - st * sd) / (k * stt - st * st);
  if (!(slope < 0.0)) return std::nullopt;
  return -60.0 / slope;
}

AudioBuffer ApplyPlaybackPath(const AudioBuffer& reference,
                              const ImpulseResponse& rir,
                              const PlaybackPathOptions& opts) {
  reference.Validate();
  if (rir.taps.empty()) throw ConfigError("empty impulse response");
  std::vector<double> n = Convolve(reference.samples, rir.taps);
  const size_t keep = reference.size() + static_cast<size_t>(std::lround(
                                             opts.tail_seconds * kSampleRate));
  if (n.size() > keep) n.resize(keep);
  return AudioBuffer(std::move(n));
}

}  // namespace iaec
