#pragma once

#include <cstdint>
#include <vector>

#include "srb/perturb/banks.hpp"
#include "srb/perturb/kinds.hpp"

namespace srb::perturb {

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::GaussianNoise;
  int severity = 1;
  SeverityParams params;
  std::uint64_t seed = 0;

  // Resolves params from the table.
  static PerturbationSpec make(PerturbationKind kind, int severity, std::uint64_t seed,
                               const SeverityTable& table = SeverityTable::defaults());
};

// True for env_noise, music and crosstalk.
bool needs_noise_bank(PerturbationKind kind);
// True for rir and real_rir.
bool needs_rir_bank(PerturbationKind kind);

// Dispatches to the kind-specific procedure. Pure in (spec, audio, banks).
// noise_bank must be the bank for the spec's kind (environment, music or
// crosstalk); rir_bank must be labelled with assign_rir_severity.
AudioBuffer apply_perturbation(const PerturbationSpec& spec, const AudioBuffer& audio,
                               const NoiseBank* noise_bank = nullptr,
                               const std::vector<LabeledRir>* rir_bank = nullptr);

}  // namespace srb::perturb
