#include "srb/perturb/effects.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "srb/audio/dsp.hpp"
#include "srb/audio/snr.hpp"
#include "srb/error.hpp"
#include "srb/log.hpp"

namespace srb::perturb {

using audio::Index;
using audio::Signal;

namespace {

constexpr double kPi = std::numbers::pi;

Signal pad_or_truncate(const Signal& x, Index n) {
  Signal out = Signal::Zero(n);
  Index keep = std::min(n, x.size());
  out.head(keep) = x.head(keep);
  return out;
}

void warn_if_off_grid(PerturbationKind kind, double param) {
  const auto& row = SeverityTable::defaults().row(kind);
  auto [lo, hi] = std::minmax_element(row.begin(), row.end());
  if (param < *lo || param > *hi) {
    std::ostringstream msg;
    msg << kind_name(kind) << " parameter " << param << " outside the default grid [" << *lo
        << ", " << *hi << "]";
    log_warning(msg.str());
  }
}

double linear_tap(const Signal& x, double pos) {
  if (pos < 0.0) return 0.0;
  auto i = static_cast<Index>(std::floor(pos));
  double frac = pos - static_cast<double>(i);
  double a = i < x.size() ? x[i] : 0.0;
  double b = i + 1 < x.size() ? x[i + 1] : 0.0;
  return a + frac * (b - a);
}

// Unit-range triangle with period 1, starting at 0.
double triangle01(double phase) {
  double f = phase - std::floor(phase);
  return f < 0.5 ? 2.0 * f : 2.0 - 2.0 * f;
}

}  // namespace

AudioBuffer gaussian_noise(const AudioBuffer& audio, double snr_db, std::uint64_t seed) {
  if (audio.samples().norm() == 0.0) throw ValidationError("gaussian noise needs a non-silent input");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Signal noise(audio.size());
  for (Index i = 0; i < noise.size(); ++i) noise[i] = normal(gen);
  return audio::add_noise_at_snr(audio, audio.with_samples(std::move(noise)), snr_db);
}

AudioBuffer env_noise_mix(const AudioBuffer& audio, const NoiseBank& bank, double snr_db,
                          std::uint64_t seed) {
  if (bank.clips.empty()) throw ValidationError("noise bank is empty");
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, bank.clips.size() - 1);
  const NoiseClip& clip = bank.clips[pick(gen)];
  AudioBuffer noise = audio::resample(clip.audio, audio.sample_rate());
  if (noise.empty() || noise.samples().norm() == 0.0)
    throw ValidationError("noise clip '" + clip.source_tag + "' is silent");
  Signal fitted = audio::fit_length(noise.samples(), audio.size());
  return audio::add_noise_at_snr(audio, audio.with_samples(std::move(fitted)), snr_db);
}

AudioBuffer echo(const AudioBuffer& audio, double delay_ms, double gain_in, double gain_out,
                 double decay) {
  const Signal& x = audio.samples();
  const auto d = static_cast<Index>(std::llround(delay_ms * audio.sample_rate() / 1000.0));
  Signal y = gain_in * x;
  if (d < x.size()) y.tail(x.size() - d) += decay * x.head(x.size() - d);
  return audio.with_samples(gain_out * y);
}

AudioBuffer phaser(const AudioBuffer& audio, double decay, double gain_in, double gain_out,
                   double delay_ms, double speed_hz) {
  const int rate = audio.sample_rate();
  const auto delay_len =
      std::max<Index>(1, static_cast<Index>(delay_ms * 0.001 * rate + 0.5));
  const auto mod_len = std::max<Index>(1, static_cast<Index>(rate / speed_hz + 0.5));

  // Triangular modulation over [1, delay_len], quarter-period phase offset.
  std::vector<Index> mod(static_cast<std::size_t>(mod_len));
  for (Index i = 0; i < mod_len; ++i) {
    double tri = triangle01(static_cast<double>(i) / mod_len + 0.25);
    mod[static_cast<std::size_t>(i)] =
        static_cast<Index>(std::floor(1.0 + tri * static_cast<double>(delay_len - 1) + 0.5));
  }

  std::vector<double> buf(static_cast<std::size_t>(delay_len), 0.0);
  const Signal& x = audio.samples();
  Signal y(x.size());
  Index delay_pos = 0, mod_pos = 0;
  for (Index i = 0; i < x.size(); ++i) {
    Index tap = (delay_pos + mod[static_cast<std::size_t>(mod_pos)]) % delay_len;
    double d = x[i] * gain_in + buf[static_cast<std::size_t>(tap)] * decay;
    mod_pos = (mod_pos + 1) % mod_len;
    delay_pos = (delay_pos + 1) % delay_len;
    buf[static_cast<std::size_t>(delay_pos)] = d;
    y[i] = d * gain_out;
  }
  return audio.with_samples(std::move(y));
}

AudioBuffer tremolo(const AudioBuffer& audio, double depth_percent, double speed_hz) {
  const double depth = depth_percent / 100.0;
  const Signal& x = audio.samples();
  Signal y(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    double t = static_cast<double>(i) / audio.sample_rate();
    double gain = 1.0 - depth * 0.5 * (1.0 - std::sin(2.0 * kPi * speed_hz * t));
    y[i] = x[i] * gain;
  }
  return audio.with_samples(std::move(y));
}

AudioBuffer chorus(const AudioBuffer& audio, double delay_ms) {
  struct Voice {
    double delay_ms, decay, speed_hz, depth_ms;
    bool triangular;
  };
  // Two voices: the configured delay (triangular) and delay + 10 ms (sine).
  const Voice voices[] = {{delay_ms, 0.4, 0.25, 2.0, true}, {delay_ms + 10.0, 0.3, 0.4, 2.0, false}};
  constexpr double gain_in = 0.9, gain_out = 0.9;
  const double rate = audio.sample_rate();
  const Signal& x = audio.samples();
  Signal y(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    double t = static_cast<double>(i) / rate;
    double acc = gain_in * x[i];
    for (const auto& v : voices) {
      double m = v.triangular ? 2.0 * triangle01(v.speed_hz * t) - 1.0
                              : std::sin(2.0 * kPi * v.speed_hz * t);
      double delay = (v.delay_ms - v.depth_ms * (1.0 + m)) * rate / 1000.0;
      acc += v.decay * linear_tap(x, static_cast<double>(i) - delay);
    }
    y[i] = gain_out * acc;
  }
  return audio.with_samples(std::move(y));
}

AudioBuffer bass(const AudioBuffer& audio, double gain_db) {
  double center = std::min(kBassCornerHz * kShelfSpread, 0.45 * audio.sample_rate());
  return audio.with_samples(
      audio::biquad_filter(audio.samples(), audio::low_shelf(gain_db, center, audio.sample_rate())));
}

AudioBuffer treble(const AudioBuffer& audio, double gain_db) {
  double center = std::min(kTrebleCornerHz / kShelfSpread, 0.45 * audio.sample_rate());
  return audio.with_samples(
      audio::biquad_filter(audio.samples(), audio::high_shelf(gain_db, center, audio.sample_rate())));
}

AudioBuffer sox_effect(PerturbationKind kind, double param, const AudioBuffer& audio) {
  switch (kind) {
    case PerturbationKind::Echo: warn_if_off_grid(kind, param); return echo(audio, param);
    case PerturbationKind::Phaser:
      warn_if_off_grid(kind, param);
      if (!(param >= 0.0 && param < 1.0)) throw ValidationError("phaser decay must be in [0, 1)");
      return phaser(audio, param);
    case PerturbationKind::Tremolo: warn_if_off_grid(kind, param); return tremolo(audio, param);
    case PerturbationKind::Chorus: warn_if_off_grid(kind, param); return chorus(audio, param);
    case PerturbationKind::Bass: warn_if_off_grid(kind, param); return bass(audio, param);
    case PerturbationKind::Treble: warn_if_off_grid(kind, param); return treble(audio, param);
    default:
      throw ValidationError(std::string(kind_name(kind)) + " is not a SoX-style effect");
  }
}

AudioBuffer change_speed(const AudioBuffer& audio, double factor) {
  if (!(factor >= 0.25 && factor <= 4.0))
    throw ValidationError("speed factor " + std::to_string(factor) + " outside [0.25, 4]");
  auto [num, den] = audio::rational_approx(factor, 1000);
  // factor = num/den; fewer samples at the same rate label plays faster.
  return audio.with_samples(audio::resample_ratio(audio.samples(), den, num));
}

AudioBuffer pitch_shift(const AudioBuffer& audio, double octaves) {
  const double ratio = std::pow(2.0, octaves);
  if (!(ratio >= 0.25 && ratio <= 4.0))
    throw ValidationError("pitch shift of " + std::to_string(octaves) + " octaves out of range");
  if (octaves == 0.0) return audio;
  auto [num, den] = audio::rational_approx(ratio, 1000);
  // Lengthen by num/den keeping pitch, then squeeze back to the original
  // length, which raises pitch by num/den.
  AudioBuffer stretched =
      audio::time_stretch(audio, static_cast<double>(den) / static_cast<double>(num));
  Signal squeezed = audio::resample_ratio(stretched.samples(), den, num);
  return audio.with_samples(pad_or_truncate(squeezed, audio.size()));
}

AudioBuffer tempo_speed_pitch(PerturbationKind kind, double param, const AudioBuffer& audio) {
  switch (kind) {
    case PerturbationKind::TempoUp:
    case PerturbationKind::TempoDown: return audio::time_stretch(audio, param);
    case PerturbationKind::SpeedUp:
    case PerturbationKind::SlowDown: return change_speed(audio, param);
    case PerturbationKind::PitchUp: return pitch_shift(audio, std::abs(param));
    case PerturbationKind::PitchDown: return pitch_shift(audio, -std::abs(param));
    default:
      throw ValidationError(std::string(kind_name(kind)) + " is not a tempo/speed/pitch kind");
  }
}

AudioBuffer filter_effect(PerturbationKind kind, double param, const AudioBuffer& audio) {
  const int rate = audio.sample_rate();
  switch (kind) {
    case PerturbationKind::Lowpass:
      return audio.with_samples(
          audio::fir_filter(audio.samples(), audio::design_lowpass(param, rate, kFilterTaps)));
    case PerturbationKind::Highpass:
      return audio.with_samples(
          audio::fir_filter(audio.samples(), audio::design_highpass(param, rate, kFilterTaps)));
    case PerturbationKind::Resample: {
      if (!(param > 0.0)) throw ValidationError("resample factor must be positive");
      auto [num, den] = audio::rational_approx(param, 1000);
      Signal low = audio::resample_ratio(audio.samples(), num, den);
      Signal back = audio::resample_ratio(low, den, num);
      return audio.with_samples(pad_or_truncate(back, audio.size()));
    }
    case PerturbationKind::Gain:
      if (!(param > 0.0)) throw ValidationError("gain factor must be positive");
      return audio.with_samples(param * audio.samples());
    default:
      throw ValidationError(std::string(kind_name(kind)) + " is not a filter kind");
  }
}

}  // namespace srb::perturb
