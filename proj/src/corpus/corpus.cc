// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "iaec/dsp.h"
#include "iaec/errors.h"
#include "iaec/roomsim.h"
#include "iaec/wav.h"

namespace iaec {

namespace fs = std::filesystem;

namespace {

constexpr double kFs = kSampleRate;
constexpr double kPi = std::numbers::pi;

enum class Kind {
  kVowel,
  kGlide,
  kNasal,
  kFricative,
  kVoicedFricative,
  kStop,
  kVoicedStop,
  kAspirate,
};

struct Phone {
  Kind kind;
  double f1, f2, f3;
  double ms;
  double noise_center = 0.0, noise_bw = 0.0, noise_gain = 0.0;
};

const std::map<std::string, Phone>& PhoneTable() {
  static const std::map<std::string, Phone> table = {
      {"iy", {Kind::kVowel, 270, 2290, 3010, 110}},
      {"ih", {Kind::kVowel, 390, 1990, 2550, 85}},
      {"eh", {Kind::kVowel, 530, 1840, 2480, 95}},
      {"ae", {Kind::kVowel, 660, 1720, 2410, 120}},
      {"aa", {Kind::kVowel, 730, 1090, 2440, 120}},
      {"ao", {Kind::kVowel, 570, 840, 2410, 120}},
      {"uh", {Kind::kVowel, 440, 1020, 2240, 85}},
      {"uw", {Kind::kVowel, 300, 870, 2240, 110}},
      {"ah", {Kind::kVowel, 640, 1190, 2390, 90}},
      {"er", {Kind::kVowel, 490, 1350, 1690, 110}},
      {"y", {Kind::kGlide, 280, 2250, 2900, 55}},
      {"w", {Kind::kGlide, 300, 610, 2200, 60}},
      {"l", {Kind::kGlide, 360, 1300, 2700, 60}},
      {"r", {Kind::kGlide, 420, 1300, 1600, 65}},
      {"m", {Kind::kNasal, 280, 1000, 2200, 70}},
      {"n", {Kind::kNasal, 280, 1700, 2600, 70}},
      {"ng", {Kind::kNasal, 280, 2000, 2700, 75}},
      {"s", {Kind::kFricative, 0, 0, 0, 115, 6000, 2500, 0.55}},
      {"sh", {Kind::kFricative, 0, 0, 0, 115, 3500, 2000, 0.6}},
      {"f", {Kind::kFricative, 0, 0, 0, 95, 4500, 5000, 0.18}},
      {"th", {Kind::kFricative, 0, 0, 0, 90, 5500, 5000, 0.12}},
      {"z", {Kind::kVoicedFricative, 280, 1700, 2600, 80, 6000, 2500, 0.3}},
      {"v", {Kind::kVoicedFricative, 300, 1100, 2300, 70, 4000, 5000, 0.1}},
      {"dh", {Kind::kVoicedFricative, 300, 1300, 2500, 55, 5000, 5000, 0.08}},
      {"p", {Kind::kStop, 0, 0, 0, 85, 900, 1200, 0.5}},
      {"t", {Kind::kStop, 0, 0, 0, 85, 4200, 2500, 0.6}},
      {"k", {Kind::kStop, 0, 0, 0, 90, 2200, 1200, 0.6}},
      {"b", {Kind::kVoicedStop, 0, 0, 0, 65, 900, 1200, 0.4}},
      {"d", {Kind::kVoicedStop, 0, 0, 0, 65, 4000, 2500, 0.45}},
      {"g", {Kind::kVoicedStop, 0, 0, 0, 70, 2200, 1200, 0.45}},
      {"hh", {Kind::kAspirate, 0, 0, 0, 60, 0, 0, 0.5}},
  };
  return table;
}

const std::map<std::string, std::string>& Lexicon() {
  // Diphthongs are spelled as two vowel targets.
  static const std::map<std::string, std::string> lex = {
      {"yes", "y eh s"},         {"no", "n ao uw"},
      {"up", "ah p"},            {"down", "d aa uw n"},
      {"left", "l eh f t"},      {"right", "r aa iy t"},
      {"on", "aa n"},            {"off", "ao f"},
      {"stop", "s t aa p"},      {"go", "g ao uw"},
      {"the", "dh ah"},          {"is", "ih z"},
      {"weather", "w eh dh er"}, {"today", "t ah d eh iy"},
      {"playing", "p l eh iy ih ng"},
      {"music", "m y uw z ih k"}, {"song", "s ao ng"},
      {"next", "n eh k s t"},    {"time", "t aa iy m"},
      {"news", "n uw z"},        {"and", "ae n d"},
      {"sunny", "s ah n iy"},    {"call", "k ao l"},
      {"light", "l aa iy t"},    {"it", "ih t"},
      {"will", "w ih l"},        {"be", "b iy"},
      {"here", "hh iy er"},      {"have", "hh ae v"},
      {"forecast", "f ao r k ae s t"},
  };
  return lex;
}

std::vector<std::string> Split(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Digital resonator with unity gain at DC.
class Resonator {
 public:
  double Step(double x, double f, double bw) {
    const double c = -std::exp(-2.0 * kPi * bw / kFs);
    const double b = 2.0 * std::exp(-kPi * bw / kFs) * std::cos(2.0 * kPi * f / kFs);
    const double a = 1.0 - b - c;
    const double y = a * x + b * y1_ + c * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double y1_ = 0.0, y2_ = 0.0;
};

// Band-pass for frication: a resonator minus its low-frequency leak.
class BandNoise {
 public:
  double Step(double x, double f, double bw) {
    const double r = res_.Step(x, f, bw);
    const double hp = r - lp_;
    lp_ += 0.02 * hp;
    return hp;
  }

 private:
  Resonator res_;
  double lp_ = 0.0;
};

double GlottalPulse(double phase) {
  constexpr double open = 0.45, close = 0.2;
  if (phase < open) return 0.5 * (1.0 - std::cos(kPi * phase / open));
  if (phase < open + close) return std::cos(0.5 * kPi * (phase - open) / close);
  return 0.0;
}

struct Track {
  std::vector<double> f1, f2, f3, voice, noise, noise_f, noise_bw, asp;

  explicit Track(size_t n)
      : f1(n), f2(n), f3(n), voice(n), noise(n), noise_f(n), noise_bw(n),
        asp(n) {}
};

double Rms(const std::vector<double>& x) {
  return x.empty() ? 0.0 : std::sqrt(MeanPower(x));
}

void Normalize(std::vector<double>& x, double rms_db) {
  const double r = Rms(x);
  if (r <= 0.0) return;
  const double g = std::pow(10.0, rms_db / 20.0) / r;
  for (double& v : x) v *= g;
}

void Ramp(std::vector<double>& v, size_t begin, size_t end, double target,
          size_t ramp) {
  const double start = begin > 0 ? v[begin - 1] : 0.0;
  for (size_t n = begin; n < end; ++n) {
    const double a = ramp == 0 ? 1.0
                               : std::min(1.0, static_cast<double>(n - begin) /
                                                   ramp);
    v[n] = start + (target - start) * a;
  }
}

}  // namespace

const std::vector<std::string>& DefaultKeywords() {
  static const std::vector<std::string> k = {"yes",  "no",    "up",  "down",
                                             "left", "right", "on",  "off",
                                             "stop", "go"};
  return k;
}

const std::vector<std::string>& FillerWords() {
  static const std::vector<std::string> f = [] {
    std::vector<std::string> out;
    const auto& kw = DefaultKeywords();
    for (const auto& [w, p] : Lexicon()) {
      if (std::find(kw.begin(), kw.end(), w) == kw.end()) out.push_back(w);
    }
    return out;
  }();
  return f;
}

bool HasWord(const std::string& word) { return Lexicon().count(word) > 0; }

SpeakerProfile SampleSpeaker(Rng& rng) {
  SpeakerProfile s;
  if (Bernoulli(rng, 0.5)) {
    s.f0_hz = Uniform(rng, 85.0, 150.0);
    s.formant_scale = Uniform(rng, 0.88, 1.0);
  } else {
    s.f0_hz = Uniform(rng, 165.0, 250.0);
    s.formant_scale = Uniform(rng, 1.05, 1.2);
  }
  s.f0_range = Uniform(rng, 0.05, 0.3);
  s.rate = Uniform(rng, 0.8, 1.25);
  s.breathiness = Uniform(rng, 0.02, 0.25);
  s.jitter = Uniform(rng, 0.005, 0.02);
  s.tilt = Uniform(rng, 0.1, 0.6);
  s.duration_jitter = Uniform(rng, 0.05, 0.2);
  return s;
}

std::vector<double> SynthesizeWord(const std::string& word,
                                   const SpeakerProfile& sp, Rng& rng) {
  const auto it = Lexicon().find(word);
  if (it == Lexicon().end()) throw ConfigError("unknown word '" + word + "'");
  const auto& table = PhoneTable();
  const std::vector<std::string> phones = Split(it->second);

  std::vector<size_t> lengths;
  for (const auto& p : phones) {
    const double ms = table.at(p).ms / sp.rate *
                      (1.0 + Uniform(rng, -sp.duration_jitter, sp.duration_jitter));
    lengths.push_back(static_cast<size_t>(ms * kFs / 1000.0));
  }
  size_t total = 0;
  for (size_t l : lengths) total += l;
  const size_t tail = static_cast<size_t>(0.03 * kFs);
  Track tr(total + tail);

  // Formant targets of the nearest vowel-like phone for consonants.
  auto vocalic = [&](int i, int dir) -> const Phone* {
    for (int j = i; j >= 0 && j < static_cast<int>(phones.size()); j += dir) {
      const Phone& p = table.at(phones[j]);
      if (p.f1 > 0.0) return &p;
    }
    return nullptr;
  };
  const size_t ramp = static_cast<size_t>(0.012 * kFs);
  double f1 = 500, f2 = 1500, f3 = 2500;
  size_t pos = 0;
  for (size_t i = 0; i < phones.size(); ++i) {
    const Phone& p = table.at(phones[i]);
    const size_t len = lengths[i], end = pos + len;
    const Phone* target = p.f1 > 0.0 ? &p : vocalic(static_cast<int>(i), 1);
    if (!target) target = vocalic(static_cast<int>(i), -1);
    const double t1 = target ? target->f1 : f1, t2 = target ? target->f2 : f2,
                 t3 = target ? target->f3 : f3;
    const size_t trans =
        i == 0 ? 1 : static_cast<size_t>(len * (p.kind == Kind::kVowel ? 0.4 : 0.6));
    for (size_t n = pos; n < end; ++n) {
      const double a = std::min(1.0, static_cast<double>(n - pos + 1) / trans);
      tr.f1[n] = f1 + (t1 - f1) * a;
      tr.f2[n] = f2 + (t2 - f2) * a;
      tr.f3[n] = f3 + (t3 - f3) * a;
      tr.noise_f[n] = p.noise_center;
      tr.noise_bw[n] = p.noise_bw;
    }
    f1 = t1;
    f2 = t2;
    f3 = t3;
    switch (p.kind) {
      case Kind::kVowel:
        Ramp(tr.voice, pos, end, 1.0, ramp);
        Ramp(tr.noise, pos, end, 0.0, ramp);
        break;
      case Kind::kGlide:
        Ramp(tr.voice, pos, end, 0.6, ramp);
        Ramp(tr.noise, pos, end, 0.0, ramp);
        break;
      case Kind::kNasal:
        Ramp(tr.voice, pos, end, 0.35, ramp);
        Ramp(tr.noise, pos, end, 0.0, ramp);
        for (size_t n = pos; n < end; ++n) tr.f1[n] = 250.0;
        break;
      case Kind::kFricative:
        Ramp(tr.voice, pos, end, 0.0, ramp);
        Ramp(tr.noise, pos, end, p.noise_gain, ramp);
        break;
      case Kind::kVoicedFricative:
        Ramp(tr.voice, pos, end, 0.3, ramp);
        Ramp(tr.noise, pos, end, p.noise_gain, ramp);
        break;
      case Kind::kAspirate:
        Ramp(tr.voice, pos, end, 0.0, ramp);
        Ramp(tr.asp, pos, end, p.noise_gain, ramp);
        break;
      case Kind::kStop:
      case Kind::kVoicedStop: {
        const bool voiced = p.kind == Kind::kVoicedStop;
        const size_t closure = len * 55 / 100, burst = len * 15 / 100;
        Ramp(tr.voice, pos, pos + closure, voiced ? 0.12 : 0.0, ramp / 2);
        Ramp(tr.noise, pos, pos + closure, 0.0, ramp / 2);
        Ramp(tr.noise, pos + closure, pos + closure + burst, p.noise_gain, 8);
        Ramp(tr.noise, pos + closure + burst, end, 0.0, ramp / 2);
        Ramp(tr.voice, pos + closure, end, voiced ? 0.3 : 0.0, ramp / 2);
        if (!voiced) Ramp(tr.asp, pos + closure + burst, end, 0.35, 8);
        break;
      }
    }
    if (p.kind != Kind::kAspirate && p.kind != Kind::kStop) {
      Ramp(tr.asp, pos, end, 0.0, ramp);
    }
    pos = end;
  }
  Ramp(tr.voice, pos, tr.voice.size(), 0.0, tail);
  Ramp(tr.noise, pos, tr.noise.size(), 0.0, tail / 2);
  Ramp(tr.asp, pos, tr.asp.size(), 0.0, tail / 2);
  for (size_t n = pos; n < tr.f1.size(); ++n) {
    tr.f1[n] = f1;
    tr.f2[n] = f2;
    tr.f3[n] = f3;
    tr.noise_f[n] = n > 0 ? tr.noise_f[n - 1] : 0.0;
    tr.noise_bw[n] = n > 0 ? tr.noise_bw[n - 1] : 0.0;
  }

  const size_t n_total = tr.f1.size();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> voiced(n_total), fric(n_total);
  Resonator r1, r2, r3, r4;
  BandNoise b1, b2;
  double phase = 0.0, period_scale = 1.0, prev_g = 0.0, tilt = 0.0;
  const double fs = sp.formant_scale;
  const double f0_start = sp.f0_hz * (1.0 + 0.5 * sp.f0_range);
  const double f0_end = sp.f0_hz * (1.0 - 0.5 * sp.f0_range);
  for (size_t n = 0; n < n_total; ++n) {
    const double frac = static_cast<double>(n) / n_total;
    const double f0 = (f0_start + (f0_end - f0_start) * frac) * period_scale;
    phase += f0 / kFs;
    if (phase >= 1.0) {
      phase -= 1.0;
      period_scale = 1.0 + sp.jitter * gauss(rng);
    }
    const double g = GlottalPulse(phase);
    const double dg = g - prev_g;  // lip radiation
    prev_g = g;
    const double noise = gauss(rng);
    const double exc = tr.voice[n] * (dg + sp.breathiness * 0.05 * noise) +
                       tr.asp[n] * 0.08 * noise;
    double v = r1.Step(exc, tr.f1[n] * fs, 70.0);
    v = r2.Step(v, tr.f2[n] * fs, 100.0);
    v = r3.Step(v, tr.f3[n] * fs, 150.0);
    v = r4.Step(v, 3500.0 * fs, 250.0);
    tilt = (1.0 - sp.tilt) * v + sp.tilt * tilt;
    voiced[n] = tilt;
    if (tr.noise[n] > 0.0 && tr.noise_bw[n] > 0.0) {
      const double fc = std::min(7200.0, tr.noise_f[n] * fs);
      double x = b1.Step(noise, fc, tr.noise_bw[n]);
      x = b2.Step(x, fc, tr.noise_bw[n]);
      fric[n] = tr.noise[n] * x;
    } else {
      fric[n] = tr.noise[n] * 0.0;
      b1.Step(0.0, 1000.0, 1000.0);
      b2.Step(0.0, 1000.0, 1000.0);
    }
  }
  // Level voicing on full vowels and frication on full-strength noise so the
  // table gains set the balance.
  double ve = 0.0, fe = 0.0;
  size_t vn = 0, fn = 0;
  for (size_t n = 0; n < n_total; ++n) {
    if (tr.voice[n] >= 0.99) {
      ve += voiced[n] * voiced[n];
      ++vn;
    }
    if (tr.noise[n] > 0.05) {
      const double x = fric[n] / tr.noise[n];
      fe += x * x;
      ++fn;
    }
  }
  const double vg = vn > 0 && ve > 0 ? 1.0 / std::sqrt(ve / vn) : 1.0;
  const double fg = fn > 0 && fe > 0 ? 1.0 / std::sqrt(fe / fn) : 1.0;
  std::vector<double> out(n_total);
  double peak = 0.0;
  for (size_t n = 0; n < n_total; ++n) {
    out[n] = voiced[n] * vg + fric[n] * fg;
    peak = std::max(peak, std::abs(out[n]));
  }
  if (peak > 0.0) {
    for (double& v : out) v /= peak;
  }
  return out;
}

namespace {

// Room response from a talker at a random distance to an omnidirectional
// microphone.
ImpulseResponse TalkerRir(Rng& rng, const ClipOptions& opts) {
  RoomConfig room = SampleRoomConfig(rng);
  room.mic_pattern = MicPattern::kOmni;
  const double dims[3] = {room.length, room.width, room.height};
  const double margin = 0.2;
  for (int attempt = 0;; ++attempt) {
    const double d = Uniform(rng, opts.min_distance, opts.max_distance) /
                     (1 << std::min(attempt / 8, 4));
    const double az = Uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double el = Uniform(rng, -0.3, 0.3);
    const Vec3 dir = {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
                      std::sin(el)};
    Vec3 pos;
    bool inside = true;
    for (int i = 0; i < 3; ++i) {
      pos[i] = room.mic_pos[i] + d * dir[i];
      inside = inside && pos[i] > margin && pos[i] < dims[i] - margin;
    }
    if (inside) {
      room.source_pos = pos;
      break;
    }
  }
  return ImageSourceRir(room);
}

}  // namespace

AudioBuffer SynthesizeKeywordClip(const std::string& keyword,
                                  const SpeakerProfile& speaker, Rng& rng,
                                  const ClipOptions& opts) {
  const size_t len = static_cast<size_t>(opts.seconds * kFs);
  std::vector<double> word = SynthesizeWord(keyword, speaker, rng);
  if (opts.reverb_probability > 0.0 && Bernoulli(rng, opts.reverb_probability)) {
    word = Convolve(word, TalkerRir(rng, opts).taps);
  }
  if (word.size() + 1600 > len) word.resize(len > 1600 ? len - 1600 : len / 2);
  Normalize(word, Uniform(rng, opts.min_level_db, opts.max_level_db));
  const double word_power = MeanPower(word);
  const size_t slack = len - word.size();
  const size_t onset = static_cast<size_t>(
      UniformInt(rng, static_cast<int>(slack / 8), static_cast<int>(slack * 7 / 8)));

  // Coloured background noise.
  const double snr = Uniform(rng, opts.min_snr_db, opts.max_snr_db);
  const double pole = Uniform(rng, 0.5, 0.95);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(len);
  double state = 0.0;
  for (double& v : noise) {
    state = pole * state + (1.0 - pole) * gauss(rng);
    v = state;
  }
  const double np = MeanPower(noise);
  const double gain = np > 0 ? std::sqrt(word_power / (np * std::pow(10.0, snr / 10.0)))
                             : 0.0;
  AudioBuffer clip = AudioBuffer::Zeros(len);
  for (size_t n = 0; n < len; ++n) clip.samples[n] = gain * noise[n];
  for (size_t n = 0; n < word.size(); ++n) clip.samples[onset + n] += word[n];
  return clip;
}

AudioBuffer SynthesizeUtterance(const SpeakerProfile& speaker, Rng& rng,
                                double seconds,
                                const std::vector<std::string>& keywords,
                                double keyword_rate) {
  const size_t len = static_cast<size_t>(seconds * kFs);
  const auto& kw = keywords.empty() ? DefaultKeywords() : keywords;
  const auto& fillers = FillerWords();
  std::vector<double> out(len, 0.0);
  size_t pos = static_cast<size_t>(Uniform(rng, 0.0, 0.2) * kFs);
  while (pos < len) {
    const bool is_kw = Bernoulli(rng, keyword_rate);
    const std::string& w =
        is_kw ? kw[UniformInt(rng, 0, static_cast<int>(kw.size()) - 1)]
              : fillers[UniformInt(rng, 0, static_cast<int>(fillers.size()) - 1)];
    std::vector<double> word = SynthesizeWord(w, speaker, rng);
    const double level = Uniform(rng, 0.6, 1.0);
    for (size_t n = 0; n < word.size() && pos + n < len; ++n) {
      out[pos + n] += level * word[n];
    }
    pos += word.size() + static_cast<size_t>(Uniform(rng, 0.05, 0.25) * kFs);
  }
  Normalize(out, -20.0);
  return AudioBuffer(std::move(out));
}

AudioBuffer SynthesizeMusic(Rng& rng, double seconds) {
  const size_t len = static_cast<size_t>(seconds * kFs);
  std::vector<double> out(len, 0.0);
  const double beat = 60.0 / Uniform(rng, 90.0, 140.0);
  const int root = UniformInt(rng, 45, 57);
  const bool minor = Bernoulli(rng, 0.5);
  const std::vector<int> scale = minor ? std::vector<int>{0, 3, 5, 7, 10}
                                       : std::vector<int>{0, 2, 4, 7, 9};
  auto midi_hz = [](double m) { return 440.0 * std::pow(2.0, (m - 69.0) / 12.0); };
  auto note = [&](double start, double dur, double hz, int harmonics,
                  double amp) {
    const size_t s0 = static_cast<size_t>(start * kFs);
    const size_t n = static_cast<size_t>(dur * kFs);
    for (size_t i = 0; i < n && s0 + i < len; ++i) {
      const double t = i / kFs;
      const double env = std::min(1.0, t / 0.01) * std::exp(-3.0 * t / dur);
      double v = 0.0;
      for (int h = 1; h <= harmonics; ++h) {
        if (hz * h > 7500.0) break;
        v += std::sin(2.0 * kPi * hz * h * t) / h;
      }
      out[s0 + i] += amp * env * v;
    }
  };
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double t = 0.0; t < seconds; t += beat) {
    note(t, beat, midi_hz(root + scale[UniformInt(rng, 0, 4)] - 12), 4, 0.5);
    for (int half = 0; half < 2; ++half) {
      if (Bernoulli(rng, 0.8)) {
        const int deg = UniformInt(rng, 0, 9);
        note(t + half * beat / 2, beat / 2,
             midi_hz(root + 12 * (deg / 5) + scale[deg % 5]), 6, 0.35);
      }
    }
    // Kick on the beat, hat on the off-beat.
    const size_t k0 = static_cast<size_t>(t * kFs);
    double ph = 0.0;
    for (size_t i = 0; i < static_cast<size_t>(0.12 * kFs) && k0 + i < len; ++i) {
      const double tt = i / kFs;
      ph += 2.0 * kPi * (50.0 + 70.0 * std::exp(-tt * 30.0)) / kFs;
      out[k0 + i] += 0.8 * std::exp(-tt * 25.0) * std::sin(ph);
    }
    const size_t h0 = static_cast<size_t>((t + beat / 2) * kFs);
    double prev = 0.0;
    for (size_t i = 0; i < static_cast<size_t>(0.03 * kFs) && h0 + i < len; ++i) {
      const double x = gauss(rng);
      out[h0 + i] += 0.15 * std::exp(-(i / kFs) * 120.0) * (x - prev);
      prev = x;
    }
  }
  Normalize(out, -20.0);
  return AudioBuffer(std::move(out));
}

void WriteKeywordCorpus(const fs::path& dir, const CorpusOptions& opts) {
  const auto& keywords = opts.keywords.empty() ? DefaultKeywords() : opts.keywords;
  for (const auto& k : keywords) {
    if (!HasWord(k)) throw ConfigError("no pronunciation for keyword '" + k + "'");
  }
  const int speakers = opts.train_speakers + opts.dev_speakers + opts.test_speakers;
  std::ofstream dev_list, test_list;
  fs::create_directories(dir);
  dev_list.open(dir / "validation_list.txt");
  test_list.open(dir / "testing_list.txt");
  for (int s = 0; s < speakers; ++s) {
    Rng voice_rng(DeriveSeed(opts.seed, {0x5be4, static_cast<uint64_t>(s)}));
    const SpeakerProfile sp = SampleSpeaker(voice_rng);
    char id[16];
    std::snprintf(id, sizeof(id), "%08x",
                  static_cast<unsigned>(
                      DeriveSeed(opts.seed, {0x1d, static_cast<uint64_t>(s)}) &
                      0xffffffffu));
    std::ofstream* list = s < opts.train_speakers ? nullptr
                          : s < opts.train_speakers + opts.dev_speakers
                              ? &dev_list
                              : &test_list;
    for (size_t k = 0; k < keywords.size(); ++k) {
      fs::create_directories(dir / keywords[k]);
      for (int rep = 0; rep < opts.repetitions; ++rep) {
        Rng rng(DeriveSeed(opts.seed, {static_cast<uint64_t>(s), k,
                                       static_cast<uint64_t>(rep)}));
        const AudioBuffer clip =
            SynthesizeKeywordClip(keywords[k], sp, rng, opts.clip);
        const std::string name =
            std::string(id) + "_nohash_" + std::to_string(rep) + ".wav";
        WriteWav(dir / keywords[k] / name, clip);
        if (list) *list << keywords[k] << '/' << name << '\n';
      }
    }
  }
}

void WriteTtsCorpus(const fs::path& dir, const InterfererOptions& opts) {
  fs::create_directories(dir);
  for (int i = 0; i < opts.clips; ++i) {
    Rng rng(DeriveSeed(opts.seed, {0x7175, static_cast<uint64_t>(i)}));
    const uint64_t v = opts.voices > 0 ? i % opts.voices : i;
    Rng voice_rng(DeriveSeed(opts.seed, {0x70ce, v}));
    const SpeakerProfile voice = SampleSpeaker(voice_rng);
    const AudioBuffer a = SynthesizeUtterance(voice, rng, opts.seconds,
                                              opts.keywords, opts.keyword_rate);
    char name[32];
    std::snprintf(name, sizeof(name), "tts_%04d.wav", i);
    WriteWav(dir / name, a);
  }
}

void WriteMusicCorpus(const fs::path& dir, const InterfererOptions& opts) {
  fs::create_directories(dir);
  for (int i = 0; i < opts.clips; ++i) {
    Rng rng(DeriveSeed(opts.seed, {0x3051c, static_cast<uint64_t>(i)}));
    const AudioBuffer a = SynthesizeMusic(rng, opts.seconds);
    char name[32];
    std::snprintf(name, sizeof(name), "music_%04d.wav", i);
    WriteWav(dir / name, a);
  }
}

}  // namespace iaec
