#pragma once

#include <string>
#include <vector>

#include "srb/metrics/error_rate.hpp"

namespace srb::harness {

struct Utterance {
  std::string id;
  std::string audio_path;  // resolved against the manifest directory on load
  std::string text;
  std::string speaker_id;
  metrics::Gender gender = metrics::Gender::Unknown;
  std::string language;
  std::string dataset;
};

struct Manifest {
  std::vector<Utterance> entries;
};

// One JSON object per line: id, audio_path, text, speaker_id, gender
// ("m", "f" or null), language, dataset. Relative audio paths resolve
// against the manifest's directory. Errors name the offending line or id.
Manifest load_manifest(const std::string& path);

// Audio paths under the manifest's directory are written relative to it.
void write_manifest(const std::string& path, const Manifest& manifest);

// Throws ValidationError naming the first repeated id.
void check_unique_ids(const Manifest& manifest);

// Dataset name for an utterance, falling back to `fallback` when unset.
std::string dataset_of(const Utterance& u, const std::string& fallback);

}  // namespace srb::harness
