#include "srb/audio/buffer.hpp"

#include "srb/error.hpp"

namespace srb::audio {

AudioBuffer::AudioBuffer(Signal samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (sample_rate_ <= 0)
    throw ValidationError("sample rate must be positive, got " + std::to_string(sample_rate_));
  if (!samples_.allFinite()) throw ValidationError("audio contains NaN or Inf samples");
}

}  // namespace srb::audio
