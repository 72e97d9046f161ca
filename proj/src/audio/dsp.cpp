#include "srb/audio/dsp.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "srb/error.hpp"

namespace srb::audio {

namespace {

constexpr double kPi = std::numbers::pi;

Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

// Resampling kernel parameters.
constexpr double kZeroCrossings = 24.0;
constexpr double kRolloff = 0.95;
constexpr double kKaiserBeta = 8.6;

double kaiser(double t, double half_width) {
  double r = t / half_width;
  if (std::abs(r) > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) /
         std::cyl_bessel_i(0.0, kKaiserBeta);
}

}  // namespace

Signal fit_length(const Signal& x, Index n) {
  if (n < 0) throw ValidationError("negative target length");
  Signal out(n);
  if (n == 0) return out;
  if (x.size() == 0) throw ValidationError("cannot tile an empty signal");
  Index filled = 0;
  while (filled < n) {
    Index take = std::min(x.size(), n - filled);
    out.segment(filled, take) = x.head(take);
    filled += take;
  }
  return out;
}

Signal convolve_full(const Signal& a, const Signal& b) {
  if (a.size() == 0 || b.size() == 0) return Signal();
  const Index n = a.size() + b.size() - 1;
  if (std::min(a.size(), b.size()) <= 64) {
    const Signal& lng = a.size() >= b.size() ? a : b;
    const Signal& sht = a.size() >= b.size() ? b : a;
    Signal out = Signal::Zero(n);
    for (Index k = 0; k < sht.size(); ++k) out.segment(k, lng.size()) += sht[k] * lng;
    return out;
  }
  const Index nfft = next_pow2(n);
  std::vector<double> pa(nfft, 0.0), pb(nfft, 0.0);
  std::copy(a.data(), a.data() + a.size(), pa.begin());
  std::copy(b.data(), b.data() + b.size(), pb.begin());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> fa, fb;
  fft.fwd(fa, pa);
  fft.fwd(fb, pb);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  std::vector<double> prod;
  fft.inv(prod, fa);
  Signal out(n);
  for (Index i = 0; i < n; ++i) out[i] = prod[static_cast<std::size_t>(i)];
  return out;
}

AudioBuffer convolve(const AudioBuffer& signal, const ImpulseResponse& ir) {
  if (ir.audio.empty()) throw ValidationError("empty impulse response");
  if (ir.audio.sample_rate() != signal.sample_rate())
    throw ValidationError("impulse response sample rate differs from signal");
  if (signal.empty()) return signal;
  Signal wet = convolve_full(signal.samples(), ir.audio.samples()).head(signal.size());
  double in_peak = linf_norm(signal.samples());
  double out_peak = linf_norm(wet);
  if (in_peak > 0.0 && out_peak > 0.0) wet *= in_peak / out_peak;
  return signal.with_samples(std::move(wet));
}

Signal design_lowpass(double cutoff_hz, int sample_rate, int taps) {
  if (taps < 1 || taps % 2 == 0) throw ValidationError("FIR length must be odd");
  double nyquist = sample_rate / 2.0;
  if (cutoff_hz <= 0.0 || cutoff_hz >= nyquist)
    throw ValidationError("cutoff " + std::to_string(cutoff_hz) + " Hz must lie in (0, Nyquist)");
  const double fc = cutoff_hz / sample_rate;  // cycles per sample
  const int half = taps / 2;
  Signal h(taps);
  for (int i = 0; i < taps; ++i) {
    int t = i - half;
    double w = 0.5 - 0.5 * std::cos(2.0 * kPi * (i + 1) / (taps + 1));
    h[i] = 2.0 * fc * sinc(2.0 * fc * t) * w;
  }
  return h / h.sum();
}

Signal design_highpass(double cutoff_hz, int sample_rate, int taps) {
  Signal h = -design_lowpass(cutoff_hz, sample_rate, taps);
  h[taps / 2] += 1.0;
  return h;
}

Signal fir_filter(const Signal& x, const Signal& taps) {
  const Index n = x.size();
  if (n == 0) return x;
  const Index half = taps.size() / 2;
  // Even reflection: ... x2 x1 | x0 x1 ... x_{n-1} | x_{n-2} ...
  auto at = [&](Index i) {
    if (n == 1) return x[0];
    const Index period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? x[i] : x[period - i];
  };
  Signal ext(n + 2 * half);
  for (Index i = 0; i < ext.size(); ++i) ext[i] = at(i - half);
  Signal out(n);
  for (Index i = 0; i < n; ++i) out[i] = ext.segment(i, taps.size()).dot(taps.reverse());
  return out;
}

Biquad low_shelf(double gain_db, double center_hz, int sample_rate) {
  const double A = std::pow(10.0, gain_db / 40.0);
  const double w0 = 2.0 * kPi * center_hz / sample_rate;
  const double c = std::cos(w0);
  const double alpha = std::sin(w0) / 2.0 * std::sqrt(2.0);
  const double sa = 2.0 * std::sqrt(A) * alpha;
  const double a0 = (A + 1) + (A - 1) * c + sa;
  Biquad q;
  q.b0 = A * ((A + 1) - (A - 1) * c + sa) / a0;
  q.b1 = 2 * A * ((A - 1) - (A + 1) * c) / a0;
  q.b2 = A * ((A + 1) - (A - 1) * c - sa) / a0;
  q.a1 = -2 * ((A - 1) + (A + 1) * c) / a0;
  q.a2 = ((A + 1) + (A - 1) * c - sa) / a0;
  return q;
}

Biquad high_shelf(double gain_db, double center_hz, int sample_rate) {
  const double A = std::pow(10.0, gain_db / 40.0);
  const double w0 = 2.0 * kPi * center_hz / sample_rate;
  const double c = std::cos(w0);
  const double alpha = std::sin(w0) / 2.0 * std::sqrt(2.0);
  const double sa = 2.0 * std::sqrt(A) * alpha;
  const double a0 = (A + 1) - (A - 1) * c + sa;
  Biquad q;
  q.b0 = A * ((A + 1) + (A - 1) * c + sa) / a0;
  q.b1 = -2 * A * ((A - 1) + (A + 1) * c) / a0;
  q.b2 = A * ((A + 1) + (A - 1) * c - sa) / a0;
  q.a1 = 2 * ((A - 1) - (A + 1) * c) / a0;
  q.a2 = ((A + 1) - (A - 1) * c - sa) / a0;
  return q;
}

Signal biquad_filter(const Signal& x, const Biquad& q) {
  Signal y(x.size());
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (Index i = 0; i < x.size(); ++i) {
    double v = q.b0 * x[i] + q.b1 * x1 + q.b2 * x2 - q.a1 * y1 - q.a2 * y2;
    x2 = x1;
    x1 = x[i];
    y2 = y1;
    y1 = v;
    y[i] = v;
  }
  return y;
}

Signal resample_ratio(const Signal& x, long up, long down) {
  if (up <= 0 || down <= 0) throw ValidationError("resampling ratio must be positive");
  long g = std::gcd(up, down);
  up /= g;
  down /= g;
  const Index n = x.size();
  if (up == down) return x;
  const Index n_out = static_cast<Index>((static_cast<long long>(n) * up + down / 2) / down);
  if (n_out == 0 || n == 0) return Signal::Zero(n_out);

  const double fc = kRolloff * std::min(1.0, static_cast<double>(up) / down);
  const double half_width = kZeroCrossings / fc;
  const long reach = static_cast<long>(std::ceil(half_width)) + 1;
  const long width = 2 * reach + 1;

  auto kernel_row = [&](long phase, double* row) {
    double frac = static_cast<double>(phase) / up;
    for (long j = -reach; j <= reach; ++j) {
      double t = frac - j;
      row[j + reach] = fc * sinc(fc * t) * kaiser(t, half_width);
    }
  };

  // One kernel per output phase when the table is small enough.
  const bool tabulate = up * width <= (1L << 22);
  std::vector<double> table;
  if (tabulate) {
    table.resize(static_cast<std::size_t>(up * width));
    for (long p = 0; p < up; ++p) kernel_row(p, table.data() + p * width);
  }
  std::vector<double> scratch(static_cast<std::size_t>(width));

  Signal out(n_out);
  for (Index m = 0; m < n_out; ++m) {
    long long num = static_cast<long long>(m) * down;
    long long base = num / up;
    long phase = static_cast<long>(num % up);
    const double* row;
    if (tabulate) {
      row = table.data() + phase * width;
    } else {
      kernel_row(phase, scratch.data());
      row = scratch.data();
    }
    double acc = 0.0;
    long long lo = std::max<long long>(0, base - reach);
    long long hi = std::min<long long>(n - 1, base + reach);
    for (long long k = lo; k <= hi; ++k) acc += x[static_cast<Index>(k)] * row[k - base + reach];
    out[m] = acc;
  }
  return out;
}

AudioBuffer resample(const AudioBuffer& signal, int new_rate) {
  if (new_rate <= 0) throw ValidationError("target sample rate must be positive");
  if (new_rate == signal.sample_rate()) return signal;
  return AudioBuffer(resample_ratio(signal.samples(), new_rate, signal.sample_rate()), new_rate);
}

std::pair<long, long> rational_approx(double value, long max_den) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ValidationError("rational_approx needs a positive finite value");
  // Continued-fraction convergents.
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = value;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(v);
    long ai = static_cast<long>(a);
    long p2 = ai * p1 + p0;
    long q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double rem = v - a;
    if (rem < 1e-12) break;
    v = 1.0 / rem;
  }
  return {p1, q1};
}

}  // namespace srb::audio
