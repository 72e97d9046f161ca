#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace srb::audio {

using Signal = Eigen::VectorXd;
using Index = Eigen::Index;

/// Mono audio at a fixed sample rate. Samples are finite doubles, nominally
/// in [-1, 1]; nothing in the DSP chain clips.
class AudioBuffer {
 public:
  AudioBuffer() = default;
  AudioBuffer(Signal samples, int sample_rate);

  const Signal& samples() const { return samples_; }
  int sample_rate() const { return sample_rate_; }
  Index size() const { return samples_.size(); }
  bool empty() const { return samples_.size() == 0; }
  double duration_seconds() const {
    return static_cast<double>(samples_.size()) / sample_rate_;
  }

  // Same rate, new samples.
  AudioBuffer with_samples(Signal samples) const {
    return AudioBuffer(std::move(samples), sample_rate_);
  }

 private:
  Signal samples_;
  int sample_rate_ = 16000;
};

struct NoiseClip {
  AudioBuffer audio;
  std::string source_tag;
};

struct RoomMeta {
  double volume_m3 = 0.0;
  double surface_m2 = 0.0;
  double absorption = 0.0;
};

struct ImpulseResponse {
  AudioBuffer audio;
  std::optional<double> rt60_seconds;
  std::optional<double> srmr;
  std::optional<RoomMeta> room;
  std::string source_tag;
};

template <typename Derived>
double l2_norm(const Eigen::MatrixBase<Derived>& x) {
  return x.norm();
}

template <typename Derived>
double linf_norm(const Eigen::MatrixBase<Derived>& x) {
  return x.size() == 0 ? 0.0 : x.template lpNorm<Eigen::Infinity>();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  return x.allFinite();
}

}  // namespace srb::audio
