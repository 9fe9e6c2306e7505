// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_CORPUS_H_
#define IAEC_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "iaec/audio.h"
#include "iaec/rng.h"

namespace iaec {

// Formant synthesiser for small stand-in corpora: keyword clips laid out like
// Speech Commands, keyword-bearing "TTS" utterances and simple music. Words
// are phone strings from a fixed lexicon.

struct SpeakerProfile {
  double f0_hz = 120.0;
  double f0_range = 0.15;       // relative pitch excursion over a word
  double formant_scale = 1.0;   // vocal tract length factor
  double rate = 1.0;            // speaking rate, >1 is faster
  double breathiness = 0.05;    // aspiration noise relative to voicing
  double jitter = 0.01;         // relative period jitter
  double tilt = 0.3;            // one-pole low-pass coefficient
  double duration_jitter = 0.12;
};

SpeakerProfile SampleSpeaker(Rng& rng);

const std::vector<std::string>& DefaultKeywords();
const std::vector<std::string>& FillerWords();
bool HasWord(const std::string& word);

// One word, no leading or trailing silence, peak-normalised to 1.
std::vector<double> SynthesizeWord(const std::string& word,
                                   const SpeakerProfile& speaker, Rng& rng);

struct ClipOptions {
  double seconds = 1.0;
  double min_level_db = -28.0;  // RMS of the word, dBFS
  double max_level_db = -16.0;
  double min_snr_db = 20.0;     // background noise
  double max_snr_db = 40.0;
  // Probability that the word is reverberated in a sampled room before the
  // noise is added. The talker stands min_distance..max_distance metres from
  // an omnidirectional microphone.
  double reverb_probability = 0.0;
  double min_distance = 0.5;
  double max_distance = 3.0;
};

// A keyword placed at a random onset inside the clip, with background noise.
AudioBuffer SynthesizeKeywordClip(const std::string& keyword,
                                  const SpeakerProfile& speaker, Rng& rng,
                                  const ClipOptions& opts = {});

// Running speech of the given length. Each word is a keyword with
// probability `keyword_rate`, otherwise a filler.
AudioBuffer SynthesizeUtterance(const SpeakerProfile& speaker, Rng& rng,
                                double seconds,
                                const std::vector<std::string>& keywords,
                                double keyword_rate = 0.4);

AudioBuffer SynthesizeMusic(Rng& rng, double seconds);

struct CorpusOptions {
  uint64_t seed = 0;
  std::vector<std::string> keywords;  // empty means DefaultKeywords()
  int train_speakers = 20;
  int dev_speakers = 4;
  int test_speakers = 4;
  int repetitions = 1;  // clips per speaker and keyword
  ClipOptions clip;
};

// Writes <dir>/<keyword>/<speaker>_nohash_<n>.wav plus validation_list.txt
// and testing_list.txt; the split is by speaker.
void WriteKeywordCorpus(const std::filesystem::path& dir,
                        const CorpusOptions& opts);

struct InterfererOptions {
  uint64_t seed = 0;
  int clips = 20;
  double seconds = 3.0;
  std::vector<std::string> keywords;  // empty means DefaultKeywords()
  double keyword_rate = 0.4;
  // Distinct speakers in the spoken corpus; 0 draws a new one per clip.
  int voices = 0;
};

// Pre-segmented interferer WAVs: TTS-like speech or music.
void WriteTtsCorpus(const std::filesystem::path& dir,
                    const InterfererOptions& opts);
void WriteMusicCorpus(const std::filesystem::path& dir,
                      const InterfererOptions& opts);

}  // namespace iaec

#endif  // IAEC_CORPUS_H_
