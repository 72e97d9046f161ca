#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srb/toy/model.hpp"

namespace srb::toy {

struct ToyUtterance {
  std::string id;
  Signal audio;
  std::string text;
};

struct SynthOptions {
  int sample_rate = 16000;
  int symbol_ms = 100;
  double amplitude = 0.5;
  int min_symbols = 3;
  int max_symbols = 6;
};

// Tone frequency for alphabet position k. All are multiples of 100 Hz so a
// tone repeats exactly every 10 ms hop.
double symbol_frequency(int k);

// One tone per symbol, phase-locked to the utterance start.
Signal synthesize(const std::string& text, const std::string& alphabet,
                  const SynthOptions& opts = {});

// Random transcripts without adjacent repeats, synthesized. The id prefix
// keeps train and held-out sets distinct.
std::vector<ToyUtterance> make_corpus(std::uint64_t seed, int n_utts, const std::string& alphabet,
                                      const std::string& id_prefix = "toy",
                                      const SynthOptions& opts = {});

struct TrainOptions {
  int max_steps = 600;
  int min_steps = 20;
  double learning_rate = 0.01;
  double init_scale = 0.01;
  double init_logit = 2.0;
  double target_cer = 0.05;
  int check_every = 10;
  SynthOptions synth;
};

struct TrainResult {
  ToyCtcModel model;
  std::vector<ToyUtterance> corpus;
  int steps = 0;
  double train_cer = 0.0;
};

// Full-batch Adam on the mean CTC loss until the corpus CER reaches the
// target (after at least min_steps). Symbol columns start as matched filters
// giving init_logit on their own tone, plus small noise; a uniform start
// leaves CTC stuck emitting blanks over identical frames. Deterministic in
// seed. Throws TrainingError when the step budget runs out first. Alphabets
// may hold at most 8 symbols.
TrainResult train_toy(std::uint64_t seed, int n_utts, const std::string& alphabet = "abcdefgh",
                      const TrainOptions& opts = {});

// Corpus CER: summed character edits over summed reference length.
double corpus_cer(const ToyCtcModel& model, const std::vector<ToyUtterance>& corpus);

}  // namespace srb::toy
