#include "srb/toy/train.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "srb/error.hpp"
#include "srb/metrics/edit_distance.hpp"
#include "srb/toy/ctc.hpp"

namespace srb::toy {

double symbol_frequency(int k) { return 400.0 + 300.0 * k; }

Signal synthesize(const std::string& text, const std::string& alphabet, const SynthOptions& opts) {
  const Index per = static_cast<Index>(opts.sample_rate) * opts.symbol_ms / 1000;
  Signal out(per * static_cast<Index>(text.size()));
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto k = alphabet.find(text[i]);
    if (k == std::string::npos) throw ValidationError(std::string("symbol '") + text[i] + "' not in alphabet");
    const double w = 2.0 * std::numbers::pi * symbol_frequency(static_cast<int>(k)) / opts.sample_rate;
    for (Index n = 0; n < per; ++n) {
      const Index at = static_cast<Index>(i) * per + n;
      out(at) = opts.amplitude * std::sin(w * static_cast<double>(at));
    }
  }
  return out;
}

std::vector<ToyUtterance> make_corpus(std::uint64_t seed, int n_utts, const std::string& alphabet,
                                      const std::string& id_prefix, const SynthOptions& opts) {
  if (alphabet.empty() || alphabet.size() > 8) throw ValidationError("toy alphabet must hold 1-8 symbols");
  if (n_utts <= 0) throw ValidationError("toy corpus needs at least one utterance");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len_dist(opts.min_symbols, opts.max_symbols);
  std::uniform_int_distribution<std::size_t> sym_dist(0, alphabet.size() - 1);
  std::vector<ToyUtterance> out;
  for (int u = 0; u < n_utts; ++u) {
    int len = alphabet.size() == 1 ? 1 : len_dist(rng);
    std::string text;
    while (static_cast<int>(text.size()) < len) {
      char c = alphabet[sym_dist(rng)];
      if (!text.empty() && text.back() == c) continue;
      text.push_back(c);
    }
    char id[32];
    std::snprintf(id, sizeof id, "%04d", u);
    out.push_back({id_prefix + "-" + id, synthesize(text, alphabet, opts), text});
  }
  return out;
}

double corpus_cer(const ToyCtcModel& model, const std::vector<ToyUtterance>& corpus) {
  std::size_t edits = 0, total = 0;
  for (const auto& u : corpus) {
    edits += metrics::edit_distance(transcribe(model, u.audio), u.text);
    total += u.text.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(edits) / static_cast<double>(total);
}

namespace {

double exact_match_rate(const ToyCtcModel& model, const std::vector<ToyUtterance>& corpus) {
  int ok = 0;
  for (const auto& u : corpus) ok += transcribe(model, u.audio) == u.text;
  return static_cast<double>(ok) / static_cast<double>(corpus.size());
}

}  // namespace

TrainResult train_toy(std::uint64_t seed, int n_utts, const std::string& alphabet,
                      const TrainOptions& opts) {
  TrainResult res;
  res.corpus = make_corpus(seed, n_utts, alphabet, "toy", opts.synth);
  res.model = ToyCtcModel(alphabet, 320, 160, opts.synth.sample_rate);

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> init(0.0, opts.init_scale);
  for (Index i = 0; i < res.model.weights.size(); ++i) res.model.weights.data()[i] = init(rng);
  SynthOptions one = opts.synth;
  one.symbol_ms = 1000 * res.model.frame_len / one.sample_rate;
  for (std::size_t k = 0; k < alphabet.size(); ++k) {
    Signal tone = synthesize(std::string(1, alphabet[k]), alphabet, one).head(res.model.frame_len);
    res.model.weights.col(static_cast<Index>(k)) += opts.init_logit * tone / tone.squaredNorm();
  }

  std::vector<std::vector<int>> targets;
  for (const auto& u : res.corpus) targets.push_back(res.model.encode(u.text));

  auto converged = [&] {
    res.train_cer = corpus_cer(res.model, res.corpus);
    return res.train_cer <= opts.target_cer && exact_match_rate(res.model, res.corpus) >= 1.0 - opts.target_cer;
  };

  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(res.model.weights.rows(), res.model.weights.cols());
  Eigen::MatrixXd v = m;
  for (int step = 0; step < opts.max_steps; ++step) {
    if (step >= opts.min_steps && step % opts.check_every == 0 && converged()) {
      res.steps = step;
      return res;
    }
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    for (std::size_t i = 0; i < res.corpus.size(); ++i)
      grad += ctc_grad_weights(res.model, res.corpus[i].audio, targets[i]).dweights;
    grad /= static_cast<double>(res.corpus.size());

    m = b1 * m + (1 - b1) * grad;
    v = b2 * v + (1 - b2) * grad.cwiseProduct(grad);
    const double c1 = 1 - std::pow(b1, step + 1), c2 = 1 - std::pow(b2, step + 1);
    res.model.weights.array() -=
        opts.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
  if (converged()) {
    res.steps = opts.max_steps;
    return res;
  }
  throw TrainingError("toy model did not reach CER " + std::to_string(opts.target_cer) + " within " +
                      std::to_string(opts.max_steps) + " steps (CER " + std::to_string(res.train_cer) + ")");
}

}  // namespace srb::toy
