#pragma once

#include <utility>

#include "srb/audio/buffer.hpp"

namespace srb::audio {

// Tile (if shorter) or truncate (if longer) to exactly n samples.
Signal fit_length(const Signal& x, Index n);

// Full linear convolution, length |a| + |b| - 1. Direct sum for short
// kernels, FFT otherwise.
Signal convolve_full(const Signal& a, const Signal& b);

// Reverberate: full convolution truncated to the input length, then rescaled
// so the output peak equals the input peak.
AudioBuffer convolve(const AudioBuffer& signal, const ImpulseResponse& ir);

// Hann-windowed sinc lowpass with unit DC gain. `taps` must be odd.
Signal design_lowpass(double cutoff_hz, int sample_rate, int taps);
// Spectral inversion of design_lowpass.
Signal design_highpass(double cutoff_hz, int sample_rate, int taps);

// Zero-phase FIR application of an odd-length symmetric kernel; the input is
// extended by even reflection at both ends. Output length equals input length.
Signal fir_filter(const Signal& x, const Signal& taps);

struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;  // normalized by a0
};

// Two-pole shelving sections (shelf slope 1). `center_hz` is the half-gain
// frequency of the transition.
Biquad low_shelf(double gain_db, double center_hz, int sample_rate);
Biquad high_shelf(double gain_db, double center_hz, int sample_rate);

Signal biquad_filter(const Signal& x, const Biquad& q);

// Rational rate change by up/down (output length round(n * up / down)) with a
// Kaiser-windowed sinc interpolator whose cutoff follows the lower Nyquist.
Signal resample_ratio(const Signal& x, long up, long down);

// Band-limited conversion to new_rate. Identity when the rate is unchanged.
AudioBuffer resample(const AudioBuffer& signal, int new_rate);

// Best rational approximation p/q of value with q <= max_den.
std::pair<long, long> rational_approx(double value, long max_den);

// WSOLA time-scale modification: duration scaled by 1/factor, pitch kept.
// factor must lie in [0.25, 4].
AudioBuffer time_stretch(const AudioBuffer& signal, double factor);

}  // namespace srb::audio
