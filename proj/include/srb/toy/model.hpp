#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "srb/audio/buffer.hpp"

namespace srb::toy {

using audio::Index;
using audio::Signal;

/// Linear frame classifier with a CTC output layer.
///
/// logits = frames * weights, one row per frame, one column per symbol plus
/// a trailing blank column. No bias and no hidden layer.
struct ToyCtcModel {
  int frame_len = 320;
  int hop = 160;
  int sample_rate = 16000;
  std::string alphabet;
  Eigen::MatrixXd weights;  // frame_len x (alphabet.size() + 1)

  ToyCtcModel() = default;
  ToyCtcModel(std::string alphabet, int frame_len = 320, int hop = 160, int sample_rate = 16000);

  Index num_classes() const { return static_cast<Index>(alphabet.size()) + 1; }
  Index blank() const { return static_cast<Index>(alphabet.size()); }

  // Label indices for a transcript. Throws on symbols outside the alphabet.
  std::vector<int> encode(const std::string& text) const;

  void save(const std::string& path) const;
  static ToyCtcModel load(const std::string& path);
};

void to_json(nlohmann::json& j, const ToyCtcModel& m);
void from_json(const nlohmann::json& j, ToyCtcModel& m);

// 1 + floor((n - frame_len) / hop) frames. Throws if n < frame_len.
Index frame_count(Index n, int frame_len, int hop);

// Rows are overlapping frames.
Eigen::MatrixXd frame_signal(const Signal& x, int frame_len, int hop);

// Adjoint of frame_signal: sums each frame back at its offset.
Signal overlap_add(const Eigen::MatrixXd& frames, int hop, Index length);

// Log-softmax of each row.
Eigen::MatrixXd log_softmax_rows(const Eigen::MatrixXd& logits);

// Per-frame log-probabilities, T x num_classes.
Eigen::MatrixXd forward(const ToyCtcModel& model, const Signal& x);

// Per-frame argmax, collapse repeats, drop blanks.
std::string greedy_decode(const Eigen::MatrixXd& logprobs, const std::string& alphabet);

std::string transcribe(const ToyCtcModel& model, const Signal& x);

}  // namespace srb::toy
