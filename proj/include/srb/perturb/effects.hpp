#pragma once

#include <cstdint>

#include "srb/audio/buffer.hpp"
#include "srb/perturb/banks.hpp"
#include "srb/perturb/kinds.hpp"

namespace srb::perturb {

// Standard-normal noise from a seeded generator, mixed at snr_db.
AudioBuffer gaussian_noise(const AudioBuffer& audio, double snr_db, std::uint64_t seed);

// One clip drawn uniformly from the bank, tiled or truncated to the speech
// length, mixed at snr_db. Shared by env_noise, music and crosstalk.
AudioBuffer env_noise_mix(const AudioBuffer& audio, const NoiseBank& bank, double snr_db,
                          std::uint64_t seed);

// SoX-style effects (echo, phaser, tremolo, chorus, bass, treble). `param` is
// the severity-table value for the kind. Output length equals input length.
AudioBuffer sox_effect(PerturbationKind kind, double param, const AudioBuffer& audio);

AudioBuffer echo(const AudioBuffer& audio, double delay_ms, double gain_in = 0.8,
                 double gain_out = 0.9, double decay = 0.3);
AudioBuffer phaser(const AudioBuffer& audio, double decay, double gain_in = 0.6,
                   double gain_out = 0.8, double delay_ms = 3.0, double speed_hz = 2.0);
AudioBuffer tremolo(const AudioBuffer& audio, double depth_percent, double speed_hz = 20.0);
AudioBuffer chorus(const AudioBuffer& audio, double delay_ms);
AudioBuffer bass(const AudioBuffer& audio, double gain_db);
AudioBuffer treble(const AudioBuffer& audio, double gain_db);

// Shelf plateau corners; the transition midpoint sits kShelfSpread away
// from the corner on a log-frequency axis, toward the unboosted band.
inline constexpr double kBassCornerHz = 100.0;
inline constexpr double kTrebleCornerHz = 3000.0;
inline constexpr double kShelfSpread = 3.0;

// tempo_*: time_stretch. speed_*/slow_down: resample and relabel (duration
// and pitch both scale). pitch_*: stretch then resample, length preserved.
AudioBuffer tempo_speed_pitch(PerturbationKind kind, double param, const AudioBuffer& audio);

AudioBuffer change_speed(const AudioBuffer& audio, double factor);
AudioBuffer pitch_shift(const AudioBuffer& audio, double octaves);

// lowpass/highpass: 511-tap Hann-windowed sinc. resample: down to
// factor * rate and back. gain: scalar multiply.
AudioBuffer filter_effect(PerturbationKind kind, double param, const AudioBuffer& audio);

inline constexpr int kFilterTaps = 511;

}  // namespace srb::perturb
