#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "srb/harness/manifest.hpp"
#include "srb/perturb/apply.hpp"

namespace srb::harness {

// Banks available to a run, keyed by the kind that consumes them.
struct ScenarioBanks {
  std::map<perturb::PerturbationKind, perturb::NoiseBank> noise;
  std::vector<perturb::LabeledRir> rirs;

  const perturb::NoiseBank* noise_for(perturb::PerturbationKind kind) const;
};

// Loads the configured bank directories (noise_banks keyed by kind name).
ScenarioBanks load_banks(const std::map<std::string, std::string>& noise_dirs,
                         const std::string& rir_dir, const perturb::SeverityTable& table,
                         int sample_rate = 16000);

struct UtteranceFailure {
  std::string id;
  std::string message;
};

struct MaterializeResult {
  Manifest manifest;  // successfully perturbed utterances
  std::string manifest_path;
  std::size_t written = 0;
  std::size_t unchanged = 0;
  std::vector<UtteranceFailure> failures;
};

struct MaterializeOptions {
  unsigned workers = 0;
  bool float_wav = false;
  int sample_rate = 16000;
};

/// Perturbs every utterance of `manifest` with (spec.kind, spec.severity).
///
/// spec.seed is the run seed; each utterance gets derive_seed(run seed, id,
/// kind, severity). Audio goes to out_dir/<kind>/<severity>/<id>.wav, the
/// derived manifest to manifest.jsonl beside it and per-utterance failures
/// to failures.jsonl. Files whose content already matches are left alone.
MaterializeResult materialize_scenario(const Manifest& manifest, const perturb::PerturbationSpec& spec,
                                       const std::string& out_dir, const ScenarioBanks& banks,
                                       const MaterializeOptions& opts = {});

// File-system safe stem for an utterance id.
std::string file_stem_for(const std::string& id);

}  // namespace srb::harness
