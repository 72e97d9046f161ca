#include "srb/toy/model.hpp"

#include <cmath>
#include <fstream>

#include "srb/error.hpp"

namespace srb::toy {

ToyCtcModel::ToyCtcModel(std::string alphabet_, int frame_len_, int hop_, int sample_rate_)
    : frame_len(frame_len_), hop(hop_), sample_rate(sample_rate_), alphabet(std::move(alphabet_)) {
  if (frame_len <= 0 || hop <= 0) throw ValidationError("frame length and hop must be positive");
  if (alphabet.empty()) throw ValidationError("alphabet must not be empty");
  weights = Eigen::MatrixXd::Zero(frame_len, num_classes());
}

std::vector<int> ToyCtcModel::encode(const std::string& text) const {
  std::vector<int> out;
  out.reserve(text.size());
  for (char c : text) {
    auto pos = alphabet.find(c);
    if (pos == std::string::npos)
      throw ValidationError(std::string("symbol '") + c + "' is not in the model alphabet");
    out.push_back(static_cast<int>(pos));
  }
  return out;
}

void to_json(nlohmann::json& j, const ToyCtcModel& m) {
  std::vector<double> flat(m.weights.data(), m.weights.data() + m.weights.size());
  j = nlohmann::json{{"format", "srb-toy-ctc"},
                     {"frame_len", m.frame_len},
                     {"hop", m.hop},
                     {"sample_rate", m.sample_rate},
                     {"alphabet", m.alphabet},
                     {"weights_col_major", flat}};
}

void from_json(const nlohmann::json& j, ToyCtcModel& m) {
  m = ToyCtcModel(j.at("alphabet").get<std::string>(), j.at("frame_len").get<int>(),
                  j.at("hop").get<int>(), j.value("sample_rate", 16000));
  auto flat = j.at("weights_col_major").get<std::vector<double>>();
  if (static_cast<Index>(flat.size()) != m.weights.size())
    throw FormatError("model weights have the wrong size");
  m.weights = Eigen::Map<const Eigen::MatrixXd>(flat.data(), m.frame_len, m.num_classes());
  if (!m.weights.allFinite()) throw FormatError("model weights are not finite");
}

void ToyCtcModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << nlohmann::json(*this).dump() << '\n';
}

ToyCtcModel ToyCtcModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return nlohmann::json::parse(in).get<ToyCtcModel>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

Index frame_count(Index n, int frame_len, int hop) {
  if (n < frame_len)
    throw ValidationError("input of " + std::to_string(n) + " samples is shorter than one frame");
  return 1 + (n - frame_len) / hop;
}

Eigen::MatrixXd frame_signal(const Signal& x, int frame_len, int hop) {
  const Index t = frame_count(x.size(), frame_len, hop);
  Eigen::MatrixXd frames(t, frame_len);
  for (Index i = 0; i < t; ++i) frames.row(i) = x.segment(i * hop, frame_len).transpose();
  return frames;
}

Signal overlap_add(const Eigen::MatrixXd& frames, int hop, Index length) {
  Signal out = Signal::Zero(length);
  for (Index i = 0; i < frames.rows(); ++i)
    out.segment(i * hop, frames.cols()) += frames.row(i).transpose();
  return out;
}

Eigen::MatrixXd log_softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    const double lse = m + std::log((logits.row(t).array() - m).exp().sum());
    out.row(t) = logits.row(t).array() - lse;
  }
  return out;
}

Eigen::MatrixXd forward(const ToyCtcModel& model, const Signal& x) {
  return log_softmax_rows(frame_signal(x, model.frame_len, model.hop) * model.weights);
}

std::string greedy_decode(const Eigen::MatrixXd& logprobs, const std::string& alphabet) {
  const Index blank = static_cast<Index>(alphabet.size());
  std::string out;
  Index prev = -1;
  for (Index t = 0; t < logprobs.rows(); ++t) {
    Index best = 0;
    logprobs.row(t).maxCoeff(&best);
    if (best != prev && best != blank) out.push_back(alphabet[static_cast<std::size_t>(best)]);
    prev = best;
  }
  return out;
}

std::string transcribe(const ToyCtcModel& model, const Signal& x) {
  return greedy_decode(forward(model, x), model.alphabet);
}

}  // namespace srb::toy
