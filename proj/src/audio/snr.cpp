#include "srb/audio/snr.hpp"

#include "srb/error.hpp"

namespace srb::audio {

namespace {

void check_compatible(const AudioBuffer& signal, const AudioBuffer& noise) {
  if (signal.size() != noise.size())
    throw ValidationError("signal/noise length mismatch: " + std::to_string(signal.size()) +
                          " vs " + std::to_string(noise.size()));
  if (signal.sample_rate() != noise.sample_rate())
    throw ValidationError("signal/noise sample rate mismatch");
}

}  // namespace

double measure_snr(const AudioBuffer& signal, const AudioBuffer& noise) {
  check_compatible(signal, noise);
  if (noise.samples().norm() == 0.0) throw ValidationError("SNR undefined: noise has zero energy");
  return snr_db(signal.samples(), noise.samples());
}

double noise_gain_for_snr(const AudioBuffer& signal, const AudioBuffer& noise,
                          double target_snr_db) {
  check_compatible(signal, noise);
  if (signal.samples().norm() == 0.0) throw ValidationError("cannot mix noise into a silent signal");
  if (noise.samples().norm() == 0.0) throw ValidationError("cannot scale zero-energy noise");
  // Expressed relative to the current SNR so the fixed point gives exactly 1.
  double current = snr_db(signal.samples(), noise.samples());
  return std::pow(10.0, (current - target_snr_db) / 20.0);
}

AudioBuffer add_noise_at_snr(const AudioBuffer& signal, const AudioBuffer& noise,
                             double target_snr_db) {
  double gain = noise_gain_for_snr(signal, noise, target_snr_db);
  return signal.with_samples(signal.samples() + gain * noise.samples());
}

}  // namespace srb::audio
