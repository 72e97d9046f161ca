#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "srb/config.hpp"
#include "srb/harness/adapter.hpp"
#include "srb/metrics/text.hpp"

namespace srb::harness {

/// One scenario of a run.
///
/// A perturbation scenario names a kind and the severities to materialize
/// from each clean manifest. A named scenario points at a ready-made
/// manifest (real-world recordings or adversarial outputs) and is compared
/// against the clean results of `baseline_dataset`.
struct ScenarioConfig {
  std::string name;
  std::vector<int> severities;  // perturbation scenarios
  std::optional<std::string> manifest;  // named scenarios
  int severity = 1;  // named scenarios
  bool adversarial = false;
  std::string baseline_dataset;  // named scenarios; default: first dataset
};

struct RunConfig {
  std::vector<std::string> manifests;
  std::vector<ScenarioConfig> scenarios;
  std::vector<ModelAdapter> models;
  std::uint64_t run_seed = 0;
  std::string output_dir = "srb-out";
  std::optional<std::string> difficulty_table;
  std::optional<std::string> severity_table;
  std::map<std::string, std::string> noise_banks;  // env_noise / music / crosstalk -> dir
  std::optional<std::string> rir_bank;
  metrics::TokenLevel token_level = metrics::TokenLevel::Word;
  unsigned workers = 0;
  bool float_wav = false;
};

// Relative paths resolve against base_dir. Throws ValidationError on
// unknown kinds, missing fields or an empty scenario list.
RunConfig parse_run_config(const nlohmann::json& doc, const std::string& base_dir);
RunConfig load_run_config(const std::string& path);

}  // namespace srb::harness
