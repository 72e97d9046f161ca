#include "srb/adv/attacks.hpp"

#include <cmath>
#include <fstream>

#include "srb/audio/dsp.hpp"
#include "srb/audio/snr.hpp"
#include "srb/audio/wav.hpp"
#include "srb/error.hpp"
#include "srb/metrics/error_rate.hpp"
#include "srb/parallel.hpp"

namespace srb::adv {

namespace {

// Adjoint of audio::fit_length: accumulates g back onto a period of length n.
Signal fold_to_length(const Signal& g, Index n) {
  Signal out = Signal::Zero(n);
  for (Index i = 0; i < g.size(); ++i) out(i % n) += g(i);
  return out;
}

Signal clip(const Signal& x, double eps) { return x.cwiseMax(-eps).cwiseMin(eps); }

Signal sign(const Signal& x) {
  return x.unaryExpr([](double v) { return static_cast<double>((v > 0) - (v < 0)); });
}

}  // namespace

double snr_to_epsilon(const AudioBuffer& x, double snr_db, NormKind norm) {
  const double size = norm == NormKind::L2 ? audio::l2_norm(x.samples()) : audio::linf_norm(x.samples());
  if (!(size > 0.0)) throw ValidationError("epsilon undefined for a silent input");
  return std::pow(10.0, -snr_db / 20.0) * size;
}

PgdResult pgd_attack(const GradientOracle& oracle, const AudioBuffer& x, const std::string& reference,
                     const PgdConfig& cfg) {
  if (cfg.steps < 0) throw ValidationError("PGD steps must be non-negative");
  PgdResult res;
  res.epsilon = snr_to_epsilon(x, cfg.snr_db, NormKind::L2);
  const double alpha = cfg.step_size.value_or(res.epsilon / 5.0);
  Signal delta = Signal::Zero(x.size());
  for (int i = 0; i < cfg.steps; ++i) {
    Signal g = oracle.grad_input(x.samples() + delta, reference);
    if (!g.allFinite()) throw Error("oracle returned a non-finite gradient");
    const double gn = g.norm();
    res.steps_run = i + 1;
    if (gn == 0.0) break;
    delta += (alpha / gn) * g;
    const double dn = delta.norm();
    if (dn > res.epsilon) delta *= res.epsilon / dn;
  }
  res.delta = x.with_samples(std::move(delta));
  return res;
}

std::vector<PgdResult> pgd_attack_all(const GradientOracle& oracle, std::span<const LabeledAudio> set,
                                      const PgdConfig& cfg, unsigned workers) {
  std::vector<PgdResult> out(set.size());
  parallel_for(set.size(), workers,
               [&](std::size_t i) { out[i] = pgd_attack(oracle, set[i].audio, set[i].reference, cfg); });
  return out;
}

void to_json(nlohmann::json& j, const UniversalConfig& c) {
  j = nlohmann::json{{"snr_db", c.snr_db}, {"e_max", c.e_max}, {"i_max", c.i_max},
                     {"t_sr", c.t_sr},     {"t_cer", c.t_cer}};
  j["alpha"] = c.alpha ? nlohmann::json(*c.alpha) : nlohmann::json();
  j["length"] = c.length ? nlohmann::json(*c.length) : nlohmann::json();
}

double transcript_cer(const std::string& a, const std::string& b) { return metrics::cer(a, b); }

namespace {

double success_rate_against(const GradientOracle& oracle, std::span<const LabeledAudio> set,
                            const std::vector<std::string>& clean, const Signal& v, double t_cer) {
  if (set.empty()) throw ValidationError("success rate of an empty set is undefined");
  int hits = 0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    const Signal& x = set[k].audio.samples();
    hits += transcript_cer(oracle.transcribe(x + audio::fit_length(v, x.size())), clean[k]) > t_cer;
  }
  return static_cast<double>(hits) / static_cast<double>(set.size());
}

std::vector<std::string> clean_transcripts(const GradientOracle& oracle, std::span<const LabeledAudio> set) {
  std::vector<std::string> out;
  for (const auto& u : set) out.push_back(oracle.transcribe(u.audio.samples()));
  return out;
}

}  // namespace

double success_rate(const GradientOracle& oracle, std::span<const LabeledAudio> set, const Signal& v,
                    double t_cer) {
  if (set.empty()) throw ValidationError("success rate of an empty set is undefined");
  if (v.size() == 0) throw ValidationError("perturbation is empty");
  return success_rate_against(oracle, set, clean_transcripts(oracle, set), v, t_cer);
}

UniversalPerturbation universal_attack(const GradientOracle& oracle, std::span<const LabeledAudio> dev,
                                       const UniversalConfig& cfg, const EpochCallback& on_epoch) {
  if (dev.empty()) throw ValidationError("universal attack needs a non-empty dev set");
  if (cfg.t_sr > 1.0) throw ValidationError("target success rate must not exceed 1");

  double eps = 0.0;
  Index longest = 0;
  for (const auto& u : dev) {
    eps += snr_to_epsilon(u.audio, cfg.snr_db, NormKind::Linf);
    longest = std::max(longest, u.audio.size());
  }
  eps /= static_cast<double>(dev.size());
  const double alpha = cfg.alpha.value_or(eps / 1000.0);
  const Index len = cfg.length.value_or(longest);
  if (len <= 0) throw ValidationError("perturbation length must be positive");

  const auto clean = clean_transcripts(oracle, dev);
  Signal v = Signal::Zero(len);
  UniversalPerturbation out;
  out.epsilon = eps;

  double rate = success_rate_against(oracle, dev, clean, v, cfg.t_cer);
  int e = 0;
  while (rate < cfg.t_sr && e < cfg.e_max) {
    for (std::size_t k = 0; k < dev.size(); ++k) {
      const Signal& x = dev[k].audio.samples();
      const Index n = x.size();
      Signal r = Signal::Zero(len);
      for (int i = 0; i < cfg.i_max; ++i) {
        Signal input = x + audio::fit_length(v + r, n);
        if (transcript_cer(oracle.transcribe(input), clean[k]) > cfg.t_cer) break;
        Signal g = oracle.grad_input(input, dev[k].reference);
        if (!g.allFinite()) throw Error("oracle returned a non-finite gradient");
        Signal dr = alpha * sign(r - fold_to_length(g, len));
        r = clip(r - dr + v, eps) - v;
      }
      v = clip(r + v, eps);
    }
    ++e;
    rate = success_rate_against(oracle, dev, clean, v, cfg.t_cer);
    EpochStat stat{e, rate, audio::linf_norm(v)};
    out.history.push_back(stat);
    if (on_epoch) on_epoch(stat);
  }

  out.v = AudioBuffer(std::move(v), oracle.sample_rate());
  out.epochs = e;
  out.success_rate = rate;
  out.provenance = {{"oracle", oracle.id()}, {"config", cfg}, {"dev_size", dev.size()}};
  return out;
}

std::vector<AudioBuffer> apply_universal(std::span<const AudioBuffer> test, const AudioBuffer& v,
                                         double snr_db) {
  if (v.empty() || audio::l2_norm(v.samples()) == 0.0)
    throw ValidationError("universal perturbation is zero");
  std::vector<AudioBuffer> out;
  out.reserve(test.size());
  for (const auto& x : test) {
    if (x.sample_rate() != v.sample_rate())
      throw ValidationError("perturbation and test audio sample rates differ");
    AudioBuffer fitted = x.with_samples(audio::fit_length(v.samples(), x.size()));
    out.push_back(audio::add_noise_at_snr(x, fitted, snr_db));
  }
  return out;
}

void UniversalPerturbation::save(const std::string& wav_path) const {
  audio::write_wav(wav_path, v, audio::WavEncoding::Float32);
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& h : history)
    hist.push_back({{"epoch", h.epoch}, {"success_rate", h.success_rate}, {"linf", h.linf}});
  nlohmann::json meta = {{"epsilon", epsilon},   {"epochs", epochs},   {"success_rate", success_rate},
                         {"history", hist},      {"provenance", provenance}};
  std::ofstream out(wav_path + ".json", std::ios::trunc);
  if (!out) throw Error("cannot write " + wav_path + ".json");
  out << meta.dump(2) << '\n';
}

UniversalPerturbation UniversalPerturbation::load(const std::string& wav_path) {
  UniversalPerturbation p;
  p.v = audio::read_wav(wav_path);
  std::ifstream in(wav_path + ".json");
  if (!in) return p;
  try {
    auto meta = nlohmann::json::parse(in);
    p.epsilon = meta.value("epsilon", 0.0);
    p.epochs = meta.value("epochs", 0);
    p.success_rate = meta.value("success_rate", 0.0);
    p.provenance = meta.value("provenance", nlohmann::json::object());
    for (const auto& h : meta.value("history", nlohmann::json::array()))
      p.history.push_back({h.at("epoch").get<int>(), h.at("success_rate").get<double>(),
                           h.at("linf").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(wav_path + ".json: " + e.what());
  }
  return p;
}

}  // namespace srb::adv
