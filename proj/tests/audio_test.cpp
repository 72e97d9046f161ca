#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "srb/audio/dsp.hpp"
#include "srb/audio/snr.hpp"
#include "srb/audio/wav.hpp"
#include "srb/error.hpp"

using namespace srb;
using namespace srb::audio;

namespace {

Signal random_signal(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> d(0.0, 0.3);
  Signal x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

double gain_db_at(const Signal& in, const Signal& out, double f, int rate) {
  return 20.0 * std::log10(oracle::dft_magnitude(out, f, rate) / oracle::dft_magnitude(in, f, rate));
}

}  // namespace

TEST_CASE("snr round trip for several targets") {
  std::mt19937_64 rng(3);
  for (double target : {-5.0, 0.0, 12.5, 40.0}) {
    AudioBuffer s(oracle::speechlike(rng, 0.5, 16000), 16000);
    AudioBuffer n(random_signal(rng, s.size()), 16000);
    AudioBuffer mix = add_noise_at_snr(s, n, target);
    AudioBuffer noise = s.with_samples(mix.samples() - s.samples());
    CHECK(measure_snr(s, noise) == doctest::Approx(target).epsilon(1e-9));
  }
}

TEST_CASE("snr rejects bad input") {
  AudioBuffer s(Signal::Ones(10), 16000);
  CHECK_THROWS_AS(measure_snr(s, AudioBuffer(Signal::Ones(9), 16000)), ValidationError);
  CHECK_THROWS_AS(measure_snr(s, AudioBuffer(Signal::Ones(10), 8000)), ValidationError);
  CHECK_THROWS_AS(measure_snr(s, AudioBuffer(Signal::Zero(10), 16000)), ValidationError);
  CHECK_THROWS_AS(add_noise_at_snr(AudioBuffer(Signal::Zero(10), 16000), s, 10.0), ValidationError);
}

TEST_CASE("fit_length tiles and truncates") {
  Signal x(3);
  x << 1, 2, 3;
  Signal t = fit_length(x, 7);
  Signal want(7);
  want << 1, 2, 3, 1, 2, 3, 1;
  CHECK(t == want);
  CHECK(fit_length(x, 2) == x.head(2));
  CHECK(fit_length(x, 0).size() == 0);
  CHECK_THROWS_AS(fit_length(Signal(), 4), ValidationError);
}

TEST_CASE("convolution matches the direct double sum") {
  std::mt19937_64 rng(11);
  for (auto [na, nb] : {std::pair<Index, Index>{5, 3}, {200, 17}, {1500, 900}, {4000, 2500}}) {
    Signal a = random_signal(rng, na), b = random_signal(rng, nb);
    Signal got = convolve_full(a, b);
    auto want = oracle::convolve(std::vector<double>(a.begin(), a.end()), std::vector<double>(b.begin(), b.end()));
    REQUIRE(got.size() == static_cast<Index>(want.size()));
    double err = 0.0;
    for (Index i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got(i) - want[i]));
    CHECK(err < 1e-9);
  }
}

TEST_CASE("reverberation keeps length and peak") {
  std::mt19937_64 rng(5);
  AudioBuffer x(oracle::speechlike(rng, 0.3, 16000), 16000);
  ImpulseResponse ir;
  Signal h = Signal::Zero(800);
  for (Index i = 0; i < h.size(); ++i) h(i) = std::exp(-i / 120.0) * (i % 7 == 0 ? 1.0 : -0.3);
  ir.audio = AudioBuffer(h, 16000);
  AudioBuffer y = convolve(x, ir);
  CHECK(y.size() == x.size());
  CHECK(linf_norm(y.samples()) == doctest::Approx(linf_norm(x.samples())).epsilon(1e-12));
}

TEST_CASE("fir filters have the designed response") {
  const int rate = 16000;
  Signal lp = design_lowpass(2000.0, rate, 511);
  CHECK(lp.sum() == doctest::Approx(1.0).epsilon(1e-9));
  Signal hp = design_highpass(2000.0, rate, 511);
  CHECK(std::abs(hp.sum()) < 1e-9);
  Signal probe = oracle::tone(500.0, 0.5, rate) + oracle::tone(5000.0, 0.5, rate);
  Signal y = fir_filter(probe, lp);
  CHECK(y.size() == probe.size());
  CHECK(gain_db_at(probe, y, 500.0, rate) == doctest::Approx(0.0).epsilon(0.01));
  CHECK(gain_db_at(probe, y, 5000.0, rate) < -60.0);
  Signal z = fir_filter(probe, hp);
  CHECK(gain_db_at(probe, z, 500.0, rate) < -60.0);
  CHECK(gain_db_at(probe, z, 5000.0, rate) == doctest::Approx(0.0).epsilon(0.01));
  CHECK_THROWS_AS(design_lowpass(9000.0, rate, 511), ValidationError);
  CHECK_THROWS_AS(design_lowpass(1000.0, rate, 510), ValidationError);
}

TEST_CASE("shelving biquads reach their plateau gains") {
  const int rate = 16000;
  Signal lo = oracle::tone(30.0, 2.0, rate), hi = oracle::tone(6000.0, 2.0, rate);
  Biquad ls = low_shelf(12.0, 300.0, rate);
  CHECK(gain_db_at(lo, biquad_filter(lo, ls), 30.0, rate) == doctest::Approx(12.0).epsilon(0.03));
  CHECK(std::abs(gain_db_at(hi, biquad_filter(hi, ls), 6000.0, rate)) < 0.2);
  Biquad hs = high_shelf(12.0, 1000.0, rate);
  CHECK(gain_db_at(hi, biquad_filter(hi, hs), 6000.0, rate) == doctest::Approx(12.0).epsilon(0.03));
  CHECK(std::abs(gain_db_at(lo, biquad_filter(lo, hs), 30.0, rate)) < 0.2);
}

TEST_CASE("resampling preserves tone frequency and duration") {
  AudioBuffer x(oracle::tone(440.0, 1.0, 16000), 16000);
  AudioBuffer y = resample(x, 8000);
  CHECK(y.sample_rate() == 8000);
  CHECK(y.size() == 8000);
  CHECK(oracle::peak_frequency(y.samples(), 8000, 400, 480, 1.0) == doctest::Approx(440.0).epsilon(0.005));
  CHECK(resample(x, 16000).samples() == x.samples());
  auto [p, q] = rational_approx(0.75, 100);
  CHECK(p == 3);
  CHECK(q == 4);
}

TEST_CASE("time stretch scales duration and keeps pitch") {
  AudioBuffer x(oracle::tone(440.0, 1.0, 16000), 16000);
  for (double factor : {0.5, 0.8, 1.5, 2.0}) {
    AudioBuffer y = time_stretch(x, factor);
    CHECK(y.duration_seconds() == doctest::Approx(1.0 / factor).epsilon(0.01));
    CHECK(oracle::peak_frequency(y.samples(), 16000, 400, 480, 1.0) == doctest::Approx(440.0).epsilon(0.01));
  }
  CHECK_THROWS_AS(time_stretch(x, 5.0), ValidationError);
}

TEST_CASE("wav round trip") {
  oracle::TempDir dir;
  std::mt19937_64 rng(9);
  Signal x = random_signal(rng, 1234).cwiseMax(-0.99).cwiseMin(0.99);
  AudioBuffer a(x, 22050);
  write_wav(dir / "f.wav", a, WavEncoding::Float32);
  AudioBuffer f = read_wav(dir / "f.wav");
  CHECK(f.sample_rate() == 22050);
  CHECK((f.samples() - x).lpNorm<Eigen::Infinity>() < 1e-7);
  write_wav(dir / "p.wav", a, WavEncoding::Pcm16);
  AudioBuffer p = read_wav(dir / "p.wav");
  CHECK(p.size() == x.size());
  CHECK((p.samples() - x).lpNorm<Eigen::Infinity>() <= 1.0 / 32768.0);
  // Saturation only on PCM16.
  AudioBuffer loud(Signal::Constant(4, 1.5), 16000);
  CHECK(decode_wav(encode_wav(loud, WavEncoding::Pcm16)).samples().maxCoeff() <= 1.0);
  CHECK(decode_wav(encode_wav(loud, WavEncoding::Float32)).samples().maxCoeff() == 1.5);
}

TEST_CASE("wav decoder rejects garbage and downmixes stereo") {
  CHECK_THROWS_AS(decode_wav({'n', 'o', 'p', 'e'}), FormatError);
  auto bytes = encode_wav(AudioBuffer(Signal::Ones(8), 16000), WavEncoding::Pcm16);
  bytes.resize(30);
  CHECK_THROWS_AS(decode_wav(bytes), FormatError);

  // Hand-built 2-channel PCM16: L = 16384, R = 0.
  std::vector<std::uint8_t> w;
  auto u32 = [&](std::uint32_t v) { for (int i = 0; i < 4; ++i) w.push_back((v >> (8 * i)) & 0xff); };
  auto u16 = [&](std::uint16_t v) { w.push_back(v & 0xff); w.push_back(v >> 8); };
  auto tag = [&](const char* s) { w.insert(w.end(), s, s + 4); };
  tag("RIFF"); u32(36 + 8); tag("WAVE");
  tag("fmt "); u32(16); u16(1); u16(2); u32(8000); u32(8000 * 4); u16(4); u16(16);
  tag("data"); u32(8);
  for (int i = 0; i < 2; ++i) { u16(16384); u16(0); }
  AudioBuffer m = decode_wav(w);
  CHECK(m.sample_rate() == 8000);
  REQUIRE(m.size() == 2);
  CHECK(m.samples()(0) == doctest::Approx(0.25));
}
