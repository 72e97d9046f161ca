#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "srb/adv/oracle.hpp"
#include "srb/audio/buffer.hpp"

namespace srb::adv {

using audio::AudioBuffer;
using audio::Index;

enum class NormKind { L2, Linf };

// Default attack severities 1-4, in dB.
inline constexpr std::array<double, 4> kAdversarialSnrGrid{40.0, 30.0, 20.0, 10.0};

// 10^(-snr/20) * ||x|| under the chosen norm. Throws on silent input.
double snr_to_epsilon(const AudioBuffer& x, double snr_db, NormKind norm);

struct PgdConfig {
  double snr_db = 20.0;
  int steps = 50;
  std::optional<double> step_size;  // default epsilon / 5
};

struct PgdResult {
  AudioBuffer delta;
  double epsilon = 0.0;
  int steps_run = 0;
};

/// Untargeted L2 PGD: ascend the loss along the normalized input gradient
/// and project back onto the epsilon ball after each step.
PgdResult pgd_attack(const GradientOracle& oracle, const AudioBuffer& x,
                     const std::string& reference, const PgdConfig& cfg);

struct LabeledAudio {
  std::string id;
  AudioBuffer audio;
  std::string reference;
};

// One delta per utterance, computed on up to `workers` threads.
std::vector<PgdResult> pgd_attack_all(const GradientOracle& oracle, std::span<const LabeledAudio> set,
                                      const PgdConfig& cfg, unsigned workers = 0);

struct UniversalConfig {
  double snr_db = 10.0;
  // Default epsilon / 1000. The regularized sign step only lets r track the
  // loss gradient when alpha sits below its per-sample size.
  std::optional<double> alpha;
  int e_max = 20;
  int i_max = 50;
  double t_sr = 0.5;
  double t_cer = 0.3;
  std::optional<Index> length;  // default: longest dev utterance
};

void to_json(nlohmann::json& j, const UniversalConfig& c);

struct EpochStat {
  int epoch = 0;
  double success_rate = 0.0;
  double linf = 0.0;
};

struct UniversalPerturbation {
  AudioBuffer v;
  double epsilon = 0.0;
  int epochs = 0;
  double success_rate = 0.0;  // on the dev set when the loop stopped
  std::vector<EpochStat> history;
  nlohmann::json provenance;

  // v as float32 WAV at `wav_path` plus `wav_path`.json with epsilon,
  // config, telemetry and provenance.
  void save(const std::string& wav_path) const;
  static UniversalPerturbation load(const std::string& wav_path);
};

// Character-level CER(a, b) = EditDistance(a, b) / len(b).
double transcript_cer(const std::string& a, const std::string& b);

// Fraction of utterances whose CER between the transcription of x + v
// (v tiled or truncated to each length) and the clean transcription
// exceeds t_cer. Throws on an empty set.
double success_rate(const GradientOracle& oracle, std::span<const LabeledAudio> set, const Signal& v,
                    double t_cer);

using EpochCallback = std::function<void(const EpochStat&)>;

/// Utterance-agnostic attack over a dev set.
///
/// epsilon is the dev-set mean of the L-inf SNR bound. Each epoch visits
/// every utterance, refines a residual r with signed steps on
/// 0.5||r||^2 - L(x + v + r, y) until the clean-vs-perturbed CER exceeds
/// t_cer or i_max steps pass, then folds r into v. Both r + v and v are
/// clipped elementwise to [-epsilon, epsilon]. Stops once the dev success
/// rate reaches t_sr or after e_max epochs.
UniversalPerturbation universal_attack(const GradientOracle& oracle, std::span<const LabeledAudio> dev,
                                       const UniversalConfig& cfg, const EpochCallback& on_epoch = {});

// add_noise_at_snr(x, v fitted to len(x), snr) for each test buffer.
std::vector<AudioBuffer> apply_universal(std::span<const AudioBuffer> test, const AudioBuffer& v,
                                         double snr_db);

}  // namespace srb::adv
