#pragma once

#include <cmath>

#include "srb/audio/buffer.hpp"

namespace srb::audio {

// 20*log10(||signal||_2 / ||noise||_2) on raw vectors. No validation; a zero
// noise norm yields +inf.
template <typename A, typename B>
double snr_db(const Eigen::MatrixBase<A>& signal, const Eigen::MatrixBase<B>& noise) {
  return 20.0 * std::log10(signal.norm() / noise.norm());
}

// Validated SNR. Throws on length/rate mismatch or zero-energy noise.
double measure_snr(const AudioBuffer& signal, const AudioBuffer& noise);
inline double measure_snr(const AudioBuffer& signal, const NoiseClip& noise) {
  return measure_snr(signal, noise.audio);
}

// Gain c such that snr(signal, c * noise) == target_snr_db.
double noise_gain_for_snr(const AudioBuffer& signal, const AudioBuffer& noise,
                          double target_snr_db);

// signal + c * noise at the requested SNR. The noise must already match the
// signal length. Output is not clipped.
AudioBuffer add_noise_at_snr(const AudioBuffer& signal, const AudioBuffer& noise,
                             double target_snr_db);
inline AudioBuffer add_noise_at_snr(const AudioBuffer& signal, const NoiseClip& noise,
                                    double target_snr_db) {
  return add_noise_at_snr(signal, noise.audio, target_snr_db);
}

}  // namespace srb::audio
