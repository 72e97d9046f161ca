#include "srb/perturb/kinds.hpp"

#include <algorithm>
#include <cctype>

#include "srb/config.hpp"
#include "srb/error.hpp"

namespace srb::perturb {

namespace {

struct KindInfo {
  PerturbationKind kind;
  std::string_view name;
  std::string_view category;
  ParamUnit unit;
  std::array<double, kSeverityLevels> grid;
};

// clang-format off
constexpr std::array<KindInfo, kKindCount> kKinds{{
  {PerturbationKind::GaussianNoise, "gaussian_noise", "noise_white", ParamUnit::SnrDb,        {30, 20, 10, 0}},
  {PerturbationKind::EnvNoise,      "env_noise",      "noise_env",   ParamUnit::SnrDb,        {30, 20, 10, 0}},
  {PerturbationKind::Music,         "music",          "noise_env",   ParamUnit::SnrDb,        {30, 20, 10, 0}},
  {PerturbationKind::Crosstalk,     "crosstalk",      "noise_env",   ParamUnit::SnrDb,        {30, 20, 10, 0}},
  {PerturbationKind::Rir,           "rir",            "spatial",     ParamUnit::Rt60Seconds,  {0.27, 0.58, 0.99, 1.33}},
  {PerturbationKind::RealRir,       "real_rir",       "spatial",     ParamUnit::Srmr,         {9.1, 7.1, 4.1, 1.8}},
  {PerturbationKind::Echo,          "echo",           "spatial",     ParamUnit::DelayMs,      {125, 250, 500, 1000}},
  {PerturbationKind::Bass,          "bass",           "sfx",         ParamUnit::GainDb,       {20, 30, 40, 50}},
  {PerturbationKind::Treble,        "treble",         "sfx",         ParamUnit::GainDb,       {10, 23, 36, 50}},
  {PerturbationKind::Phaser,        "phaser",         "sfx",         ParamUnit::DecaySeconds, {0.3, 0.5, 0.7, 0.9}},
  {PerturbationKind::TempoUp,       "tempo_up",       "sfx",         ParamUnit::Factor,       {1.25, 1.5, 1.75, 2}},
  {PerturbationKind::TempoDown,     "tempo_down",     "sfx",         ParamUnit::Factor,       {0.875, 0.75, 0.625, 0.5}},
  {PerturbationKind::SpeedUp,       "speed_up",       "sfx",         ParamUnit::Factor,       {1.25, 1.5, 1.75, 2}},
  {PerturbationKind::SlowDown,      "slow_down",      "sfx",         ParamUnit::Factor,       {0.875, 0.75, 0.625, 0.5}},
  {PerturbationKind::PitchUp,       "pitch_up",       "sfx",         ParamUnit::Octaves,      {0.25, 0.5, 0.75, 1}},
  {PerturbationKind::PitchDown,     "pitch_down",     "sfx",         ParamUnit::Octaves,      {0.25, 0.5, 0.75, 1}},
  {PerturbationKind::Chorus,        "chorus",         "sfx",         ParamUnit::DelayMs,      {30, 50, 70, 90}},
  {PerturbationKind::Tremolo,       "tremolo",        "sfx",         ParamUnit::DepthPercent, {50, 66, 83, 100}},
  {PerturbationKind::Resample,      "resample",       "audio_proc",  ParamUnit::Factor,       {0.75, 0.5, 0.25, 0.125}},
  {PerturbationKind::Gain,          "gain",           "audio_proc",  ParamUnit::Factor,       {10, 20, 30, 40}},
  {PerturbationKind::Lowpass,       "lowpass",        "audio_proc",  ParamUnit::CutoffHz,     {4000, 2833, 1666, 500}},
  {PerturbationKind::Highpass,      "highpass",       "audio_proc",  ParamUnit::CutoffHz,     {500, 1333, 2166, 3000}},
}};
// clang-format on

struct Alias {
  std::string_view alias;
  PerturbationKind kind;
};

constexpr Alias kAliases[] = {
    {"gnoise", PerturbationKind::GaussianNoise},
    {"white_noise", PerturbationKind::GaussianNoise},
    {"envnoise", PerturbationKind::EnvNoise},
    {"sim_rir", PerturbationKind::Rir},
    {"speedup", PerturbationKind::SpeedUp},
    {"slowdown", PerturbationKind::SlowDown},
    {"tempoup", PerturbationKind::TempoUp},
    {"tempodown", PerturbationKind::TempoDown},
    {"pitchup", PerturbationKind::PitchUp},
    {"pitchdown", PerturbationKind::PitchDown},
    {"low_pass", PerturbationKind::Lowpass},
    {"high_pass", PerturbationKind::Highpass},
    {"resampling", PerturbationKind::Resample},
    {"vol", PerturbationKind::Gain},
};

const KindInfo& info(PerturbationKind kind) {
  return kKinds[static_cast<std::size_t>(kind)];
}

std::string canonicalize(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (c == ' ' || c == '-') c = '_';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

const std::array<PerturbationKind, kKindCount>& all_kinds() {
  static const auto kinds = [] {
    std::array<PerturbationKind, kKindCount> out{};
    for (std::size_t i = 0; i < kKindCount; ++i) out[i] = kKinds[i].kind;
    return out;
  }();
  return kinds;
}

std::string_view kind_name(PerturbationKind kind) { return info(kind).name; }

std::string_view kind_category(PerturbationKind kind) { return info(kind).category; }

ParamUnit kind_unit(PerturbationKind kind) { return info(kind).unit; }

PerturbationKind parse_kind(std::string_view name) {
  std::string key = canonicalize(name);
  for (const auto& k : kKinds)
    if (k.name == key) return k.kind;
  for (const auto& a : kAliases)
    if (a.alias == key) return a.kind;
  throw ValidationError("unknown perturbation kind '" + std::string(name) + "'");
}

std::string_view unit_name(ParamUnit unit) {
  switch (unit) {
    case ParamUnit::SnrDb: return "snr_db";
    case ParamUnit::Rt60Seconds: return "rt60_s";
    case ParamUnit::Srmr: return "srmr";
    case ParamUnit::DelayMs: return "delay_ms";
    case ParamUnit::GainDb: return "gain_db";
    case ParamUnit::DecaySeconds: return "decay_s";
    case ParamUnit::Factor: return "factor";
    case ParamUnit::Octaves: return "octaves";
    case ParamUnit::DepthPercent: return "depth_pct";
    case ParamUnit::CutoffHz: return "cutoff_hz";
  }
  return "?";
}

const SeverityTable& SeverityTable::defaults() {
  static const SeverityTable table = [] {
    SeverityTable t;
    for (std::size_t i = 0; i < kKindCount; ++i) t.values_[i] = kKinds[i].grid;
    return t;
  }();
  return table;
}

SeverityTable SeverityTable::with_overrides(const nlohmann::json& overrides) {
  SeverityTable t = defaults();
  if (!overrides.is_object()) throw ValidationError("severity table must be an object keyed by kind");
  for (const auto& [key, value] : overrides.items()) {
    PerturbationKind kind = parse_kind(key);
    if (!value.is_array() || value.size() != kSeverityLevels)
      throw ValidationError("severity row '" + key + "' must be an array of 4 numbers");
    for (int s = 0; s < kSeverityLevels; ++s) {
      if (!value[s].is_number()) throw ValidationError("severity row '" + key + "' has a non-number");
      t.values_[static_cast<std::size_t>(kind)][s] = value[s].get<double>();
    }
  }
  return t;
}

SeverityTable SeverityTable::load(const std::string& path) {
  nlohmann::json doc = load_config_document(path);
  if (doc.contains("severities")) doc = doc["severities"];
  return with_overrides(doc);
}

SeverityParams SeverityTable::at(PerturbationKind kind, int severity) const {
  if (severity < 1 || severity > kSeverityLevels)
    throw ValidationError("severity must be in 1-4, got " + std::to_string(severity));
  return {info(kind).unit, values_[static_cast<std::size_t>(kind)][severity - 1]};
}

const std::array<double, kSeverityLevels>& SeverityTable::row(PerturbationKind kind) const {
  return values_[static_cast<std::size_t>(kind)];
}

SeverityParams severity_params(PerturbationKind kind, int severity) {
  return SeverityTable::defaults().at(kind, severity);
}

}  // namespace srb::perturb
