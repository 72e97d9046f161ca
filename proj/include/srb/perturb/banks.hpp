#pragma once

#include <string>
#include <vector>

#include "srb/audio/buffer.hpp"
#include "srb/perturb/kinds.hpp"

namespace srb::perturb {

using audio::AudioBuffer;
using audio::ImpulseResponse;
using audio::NoiseClip;

struct NoiseBank {
  std::vector<NoiseClip> clips;
};

// Every *.wav under `dir` (sorted by path), resampled to target_rate.
NoiseBank load_noise_bank(const std::string& dir, int target_rate = 16000);

// WAV files plus an optional `metadata.jsonl` sidecar with lines of
// {file, rt60?, srmr?, room?{volume_m3, surface_m2, absorption}}.
std::vector<ImpulseResponse> load_rir_bank(const std::string& dir, int target_rate = 16000);

// Sabine estimate 0.161 V / (S a).
double sabine_rt60(const audio::RoomMeta& room);

/// Reverberation time of an impulse response in seconds.
///
/// Uses room metadata (Sabine) when present. Otherwise fits the Schroeder
/// energy decay curve between -5 and -35 dB and extrapolates the slope to
/// 60 dB. Throws when the decay never spans 30 dB.
double estimate_rt60(const ImpulseResponse& ir);

enum class RirFamily { Simulated, Real };

struct LabeledRir {
  ImpulseResponse ir;
  RirFamily family = RirFamily::Simulated;
  int severity = 1;
};

// Nearest-anchor severity labelling: simulated IRs (rt60 or room metadata)
// against the rir row, real IRs (srmr) against the real_rir row.
std::vector<LabeledRir> assign_rir_severity(const std::vector<ImpulseResponse>& bank,
                                            const SeverityTable& table = SeverityTable::defaults());

// Nearest index (1-based) of value in a 4-entry anchor row; ties go to the
// lower severity.
int nearest_severity(const std::array<double, kSeverityLevels>& anchors, double value);

}  // namespace srb::perturb
