#pragma once

#include <array>
#include <string>
#include <string_view>

#include "json.hpp"

namespace srb::perturb {

enum class PerturbationKind {
  GaussianNoise,
  EnvNoise,
  Music,
  Crosstalk,
  Rir,
  RealRir,
  Echo,
  Bass,
  Treble,
  Phaser,
  TempoUp,
  TempoDown,
  SpeedUp,
  SlowDown,
  PitchUp,
  PitchDown,
  Chorus,
  Tremolo,
  Resample,
  Gain,
  Lowpass,
  Highpass,
};

inline constexpr std::size_t kKindCount = 22;
inline constexpr int kSeverityLevels = 4;

const std::array<PerturbationKind, kKindCount>& all_kinds();

// Canonical snake_case name, e.g. "gaussian_noise".
std::string_view kind_name(PerturbationKind kind);

// Accepts canonical names plus common aliases ("gnoise", "speedup",
// "pitch up", "low-pass", ...). Throws ValidationError on unknown input.
PerturbationKind parse_kind(std::string_view name);

// Benchmark grouping: noise_white, noise_env, spatial, sfx, audio_proc.
std::string_view kind_category(PerturbationKind kind);

enum class ParamUnit {
  SnrDb,
  Rt60Seconds,
  Srmr,
  DelayMs,
  GainDb,
  DecaySeconds,
  Factor,
  Octaves,
  DepthPercent,
  CutoffHz,
};

std::string_view unit_name(ParamUnit unit);
ParamUnit kind_unit(PerturbationKind kind);

struct SeverityParams {
  ParamUnit unit = ParamUnit::SnrDb;
  double value = 0.0;

  friend bool operator==(const SeverityParams&, const SeverityParams&) = default;
};

/// Per-kind parameter grid for severities 1-4.
///
/// Defaults are built in. Lowpass/highpass cutoffs
/// are stored in Hz. Pitch rows hold the shift magnitude in octaves; the
/// direction comes from the kind.
class SeverityTable {
 public:
  static const SeverityTable& defaults();

  // Overrides from an object keyed by canonical kind name, each value an
  // array of four numbers. Unlisted kinds keep their default rows.
  static SeverityTable with_overrides(const nlohmann::json& overrides);
  // JSON or TOML file, chosen by extension.
  static SeverityTable load(const std::string& path);

  SeverityParams at(PerturbationKind kind, int severity) const;
  const std::array<double, kSeverityLevels>& row(PerturbationKind kind) const;

 private:
  std::array<std::array<double, kSeverityLevels>, kKindCount> values_{};
};

// Default-table lookup. Throws ValidationError for severity outside 1-4.
SeverityParams severity_params(PerturbationKind kind, int severity);

}  // namespace srb::perturb
