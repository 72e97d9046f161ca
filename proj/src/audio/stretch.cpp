#include <cmath>
#include <limits>
#include <numbers>

#include "srb/audio/dsp.hpp"
#include "srb/error.hpp"

namespace srb::audio {

namespace {

double sample_at(const Signal& x, Index i) {
  return (i >= 0 && i < x.size()) ? x[i] : 0.0;
}

}  // namespace

AudioBuffer time_stretch(const AudioBuffer& signal, double factor) {
  if (!(factor >= 0.25 && factor <= 4.0))
    throw ValidationError("time-stretch factor " + std::to_string(factor) + " outside [0.25, 4]");
  if (factor == 1.0 || signal.empty()) return signal;

  const Signal& x = signal.samples();
  const Index n = x.size();
  const Index out_len = std::max<Index>(1, std::llround(n / factor));

  // ~50 ms frames, half overlap, periodic Hann (overlap-adds to one).
  const Index frame = 2 * std::max<Index>(16, std::llround(0.025 * signal.sample_rate()));
  const Index hop = frame / 2;
  const Index tolerance = frame / 4;
  Signal window(frame);
  for (Index i = 0; i < frame; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / frame);

  const Index frames = out_len / hop + 2;
  Signal acc = Signal::Zero(frames * hop + frame);
  Signal norm = Signal::Zero(acc.size());

  Index prev = 0;
  for (Index k = 0; k < frames; ++k) {
    const Index nominal = std::llround(static_cast<double>(k) * hop * factor);
    Index pos = nominal;
    if (k > 0) {
      // Pick the candidate whose head best continues the previous frame's tail.
      const Index natural = prev + hop;
      double best = -std::numeric_limits<double>::infinity();
      for (Index d = -tolerance; d <= tolerance; ++d) {
        Index cand = nominal + d;
        if (cand < 0) continue;
        double corr = 0.0, energy = 0.0;
        for (Index i = 0; i < hop; ++i) {
          double c = sample_at(x, cand + i);
          corr += c * sample_at(x, natural + i);
          energy += c * c;
        }
        double score = corr / std::sqrt(energy + 1e-12);
        if (score > best) {
          best = score;
          pos = cand;
        }
      }
    } else {
      pos = 0;
    }
    const Index out_pos = k * hop;
    for (Index i = 0; i < frame; ++i) {
      acc[out_pos + i] += window[i] * sample_at(x, pos + i);
      norm[out_pos + i] += window[i];
    }
    prev = pos;
  }

  Signal out(out_len);
  for (Index i = 0; i < out_len; ++i) out[i] = norm[i] > 1e-6 ? acc[i] / norm[i] : 0.0;
  return signal.with_samples(std::move(out));
}

}  // namespace srb::audio
