#include "srb/perturb/apply.hpp"

#include <random>

#include "srb/audio/dsp.hpp"
#include "srb/error.hpp"
#include "srb/perturb/effects.hpp"

namespace srb::perturb {

PerturbationSpec PerturbationSpec::make(PerturbationKind kind, int severity, std::uint64_t seed,
                                        const SeverityTable& table) {
  return {kind, severity, table.at(kind, severity), seed};
}

bool needs_noise_bank(PerturbationKind kind) {
  return kind == PerturbationKind::EnvNoise || kind == PerturbationKind::Music ||
         kind == PerturbationKind::Crosstalk;
}

bool needs_rir_bank(PerturbationKind kind) {
  return kind == PerturbationKind::Rir || kind == PerturbationKind::RealRir;
}

namespace {

AudioBuffer apply_rir(const PerturbationSpec& spec, const AudioBuffer& audio,
                      const std::vector<LabeledRir>& bank) {
  RirFamily family = spec.kind == PerturbationKind::Rir ? RirFamily::Simulated : RirFamily::Real;
  std::vector<const LabeledRir*> candidates;
  for (const auto& r : bank)
    if (r.family == family && r.severity == spec.severity) candidates.push_back(&r);
  if (candidates.empty())
    throw ValidationError("no " + std::string(kind_name(spec.kind)) + " impulse response labelled severity " +
                          std::to_string(spec.severity));
  std::mt19937_64 gen(spec.seed);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  ImpulseResponse ir = candidates[pick(gen)]->ir;
  if (ir.audio.sample_rate() != audio.sample_rate())
    ir.audio = audio::resample(ir.audio, audio.sample_rate());
  return audio::convolve(audio, ir);
}

}  // namespace

AudioBuffer apply_perturbation(const PerturbationSpec& spec, const AudioBuffer& audio,
                               const NoiseBank* noise_bank,
                               const std::vector<LabeledRir>* rir_bank) {
  if (audio.empty()) throw ValidationError("cannot perturb empty audio");
  if (spec.severity < 1 || spec.severity > kSeverityLevels)
    throw ValidationError("severity must be in 1-4");
  const double p = spec.params.value;
  switch (spec.kind) {
    case PerturbationKind::GaussianNoise: return gaussian_noise(audio, p, spec.seed);
    case PerturbationKind::EnvNoise:
    case PerturbationKind::Music:
    case PerturbationKind::Crosstalk:
      if (noise_bank == nullptr)
        throw ValidationError(std::string(kind_name(spec.kind)) + " requires a noise bank");
      return env_noise_mix(audio, *noise_bank, p, spec.seed);
    case PerturbationKind::Rir:
    case PerturbationKind::RealRir:
      if (rir_bank == nullptr)
        throw ValidationError(std::string(kind_name(spec.kind)) + " requires an RIR bank");
      return apply_rir(spec, audio, *rir_bank);
    case PerturbationKind::Echo:
    case PerturbationKind::Bass:
    case PerturbationKind::Treble:
    case PerturbationKind::Phaser:
    case PerturbationKind::Chorus:
    case PerturbationKind::Tremolo: return sox_effect(spec.kind, p, audio);
    case PerturbationKind::TempoUp:
    case PerturbationKind::TempoDown:
    case PerturbationKind::SpeedUp:
    case PerturbationKind::SlowDown:
    case PerturbationKind::PitchUp:
    case PerturbationKind::PitchDown: return tempo_speed_pitch(spec.kind, p, audio);
    case PerturbationKind::Resample:
    case PerturbationKind::Gain:
    case PerturbationKind::Lowpass:
    case PerturbationKind::Highpass: return filter_effect(spec.kind, p, audio);
  }
  throw ValidationError("unhandled perturbation kind");
}

}  // namespace srb::perturb
