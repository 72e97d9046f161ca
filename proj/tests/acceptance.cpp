// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "srb/adv/attacks.hpp"
#include "srb/audio/snr.hpp"
#include "srb/audio/wav.hpp"
#include "srb/harness/manifest.hpp"
#include "srb/metrics/difficulty.hpp"
#include "srb/metrics/edit_distance.hpp"
#include "srb/metrics/error_rate.hpp"
#include "srb/perturb/apply.hpp"
#include "srb/perturb/kinds.hpp"
#include "srb/toy/ctc.hpp"
#include "srb/toy/train.hpp"

namespace fs = std::filesystem;
using namespace srb;
using audio::AudioBuffer;
using audio::Signal;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed checks; the first few messages end up in the detail line.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + " failed check(s): " + messages_};
  }

 private:
  int failures_ = 0;
  std::string messages_;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double pop_sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / v.size());
}

// ---------------------------------------------------------------- 1

Outcome snr_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> dur(0.1, 1.0);
  std::normal_distribution<double> gauss;
  const double targets[] = {0, 10, 20, 30, 40};
  Checks c;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Signal s = oracle::speechlike(rng, dur(rng), 16000);
    Signal n(s.size());
    // Alternate white, brown-ish and tonal noise.
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n.size(); ++k) {
      const double g = gauss(rng);
      acc = 0.98 * acc + g;
      n(k) = i % 3 == 0 ? g : i % 3 == 1 ? acc : std::sin(0.05 * k) + 0.1 * g;
    }
    const double target = targets[i % 5];
    AudioBuffer sig(s, 16000);
    AudioBuffer mix = audio::add_noise_at_snr(sig, AudioBuffer(n, 16000), target);
    Signal comp = mix.samples() - s;
    const double measured = 20.0 * std::log10(std::sqrt(s.squaredNorm()) / std::sqrt(comp.squaredNorm()));
    worst = std::max(worst, std::abs(measured - target));
    c.expect(std::abs(measured - target) <= 1e-6, "triple " + std::to_string(i) + " off by " + fmt(measured - target));
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 5.0, "took " + fmt(elapsed) + " s");
  return c.outcome("100 triples, worst |error| " + fmt(worst, 3) + " dB");
}

// ---------------------------------------------------------------- 2

Outcome severity_registry() {
  using perturb::ParamUnit;
  using perturb::PerturbationKind;
  struct Row {
    PerturbationKind kind;
    ParamUnit unit;
    double v[4];
  };
  const Row golden[] = {
      {PerturbationKind::GaussianNoise, ParamUnit::SnrDb, {30, 20, 10, 0}},
      {PerturbationKind::EnvNoise, ParamUnit::SnrDb, {30, 20, 10, 0}},
      {PerturbationKind::Music, ParamUnit::SnrDb, {30, 20, 10, 0}},
      {PerturbationKind::Crosstalk, ParamUnit::SnrDb, {30, 20, 10, 0}},
      {PerturbationKind::Rir, ParamUnit::Rt60Seconds, {0.27, 0.58, 0.99, 1.33}},
      {PerturbationKind::RealRir, ParamUnit::Srmr, {9.1, 7.1, 4.1, 1.8}},
      {PerturbationKind::Echo, ParamUnit::DelayMs, {125, 250, 500, 1000}},
      {PerturbationKind::Bass, ParamUnit::GainDb, {20, 30, 40, 50}},
      {PerturbationKind::Treble, ParamUnit::GainDb, {10, 23, 36, 50}},
      {PerturbationKind::Phaser, ParamUnit::DecaySeconds, {0.3, 0.5, 0.7, 0.9}},
      {PerturbationKind::TempoUp, ParamUnit::Factor, {1.25, 1.5, 1.75, 2}},
      {PerturbationKind::TempoDown, ParamUnit::Factor, {0.875, 0.75, 0.625, 0.5}},
      {PerturbationKind::SpeedUp, ParamUnit::Factor, {1.25, 1.5, 1.75, 2}},
      {PerturbationKind::SlowDown, ParamUnit::Factor, {0.875, 0.75, 0.625, 0.5}},
      {PerturbationKind::PitchUp, ParamUnit::Octaves, {0.25, 0.5, 0.75, 1}},
      {PerturbationKind::PitchDown, ParamUnit::Octaves, {0.25, 0.5, 0.75, 1}},
      {PerturbationKind::Chorus, ParamUnit::DelayMs, {30, 50, 70, 90}},
      {PerturbationKind::Tremolo, ParamUnit::DepthPercent, {50, 66, 83, 100}},
      {PerturbationKind::Resample, ParamUnit::Factor, {0.75, 0.5, 0.25, 0.125}},
      {PerturbationKind::Gain, ParamUnit::Factor, {10, 20, 30, 40}},
      {PerturbationKind::Lowpass, ParamUnit::CutoffHz, {4000, 2833, 1666, 500}},
      {PerturbationKind::Highpass, ParamUnit::CutoffHz, {500, 1333, 2166, 3000}},
  };
  Checks c;
  int cells = 0;
  for (const auto& row : golden)
    for (int sev = 1; sev <= 4; ++sev) {
      auto p = perturb::severity_params(row.kind, sev);
      c.expect(p.unit == row.unit && p.value == row.v[sev - 1],
               std::string(perturb::kind_name(row.kind)) + " sev " + std::to_string(sev));
      ++cells;
    }
  c.expect(std::size(golden) == perturb::all_kinds().size(), "kind count differs");
  return c.outcome(std::to_string(cells) + " cells match");
}

// ---------------------------------------------------------------- 3

// Plain recursion over suffixes; the memo only caches subproblem answers.
struct MemoEditDistance {
  const std::vector<int>& a;
  const std::vector<int>& b;
  int memo[7][7];

  MemoEditDistance(const std::vector<int>& a_, const std::vector<int>& b_) : a(a_), b(b_) {
    for (auto& row : memo)
      for (int& m : row) m = -1;
  }
  int operator()(std::size_t i, std::size_t j) {
    if (i == a.size()) return static_cast<int>(b.size() - j);
    if (j == b.size()) return static_cast<int>(a.size() - i);
    int& m = memo[i][j];
    if (m >= 0) return m;
    if (a[i] == b[j]) return m = (*this)(i + 1, j + 1);
    return m = 1 + std::min({(*this)(i + 1, j + 1), (*this)(i + 1, j), (*this)(i, j + 1)});
  }
};

Outcome metric_oracle() {
  std::vector<std::vector<int>> all{{}};
  for (std::size_t start = 0, len = 1; len <= 6; ++len) {
    const std::size_t end = all.size();
    for (std::size_t i = start; i < end; ++i)
      for (int s = 0; s < 3; ++s) {
        auto v = all[i];
        v.push_back(s);
        all.push_back(std::move(v));
      }
    start = end;
  }
  Checks c;
  long pairs = 0;
  for (const auto& a : all)
    for (const auto& b : all) {
      MemoEditDistance oracle_ed(a, b);
      const int want = oracle_ed(0, 0);
      const auto got = metrics::edit_distance(a, b);
      c.expect(static_cast<int>(got) == want, "pair " + std::to_string(pairs));
      ++pairs;
    }

  auto record = [](const std::string& ref, const std::string& hyp) {
    auto s = metrics::score_pair(ref, hyp);
    metrics::EvalRecord r;
    r.utterance_id = ref;
    r.edit_distance = s.edit_distance;
    r.ref_len = s.ref_len;
    return r;
  };
  // Edits by hand: 0 of 3, 1 of 3, 1 of 2, 1 of 4, 2 of 2.
  std::vector<metrics::EvalRecord> corpus{
      record("the cat sat", "the cat sat"), record("a b c", "a x c"), record("hello world", "hello"),
      record("one two three four", "one two three four five"), record("red blue", "")};
  const double wer = metrics::corpus_error_rate(corpus);
  c.expect(wer == 100.0 * 5.0 / 14.0, "five-utterance WER " + fmt(wer, 17));
  std::vector<metrics::EvalRecord> twenty{record("a b c", "a b c"), record("d e", "d")};
  c.expect(metrics::corpus_error_rate(twenty) == 20.0, "two-utterance WER is not 20");
  return c.outcome(std::to_string(pairs) + " pairs exact, corpus WER " + fmt(wer, 10) + "%");
}

// ---------------------------------------------------------------- 4

Outcome normalization() {
  Checks c;
  std::mt19937_64 rng(44);
  std::normal_distribution<double> d(-2.5, 0.8);
  std::uniform_int_distribution<int> n_pick(2, 300);
  double worst = 0.0;
  auto check_stats = [&](const std::vector<double>& v, const std::string& what) {
    const double m = mean(v), s = pop_sd(v);
    worst = std::max({worst, std::abs(m - 50.0), std::abs(s - 25.0)});
    c.expect(std::abs(m - 50.0) <= 1e-9 && std::abs(s - 25.0) <= 1e-9,
             what + ": mean " + fmt(m, 15) + " sd " + fmt(s, 15));
  };
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> raw(n_pick(rng));
    for (auto& v : raw) v = d(rng);
    check_stats(metrics::normalize_scores(raw), "scores trial " + std::to_string(trial));
  }
  for (int trial = 0; trial < 20; ++trial) {
    std::map<metrics::DifficultyKey, metrics::RawDifficulty> raw, single;
    for (auto kind : perturb::all_kinds())
      for (int sev = 1; sev <= 4; ++sev) {
        metrics::DifficultyKey k{std::string(perturb::kind_name(kind)), sev};
        raw[k] = {d(rng), 3.0 * d(rng)};
        single[k] = {d(rng), std::nullopt};
      }
    auto cells = metrics::normalize_difficulty(raw);
    std::vector<double> dn, pe, avg;
    for (const auto& [k, cell] : cells) {
      dn.push_back(*cell.dnsmos);
      pe.push_back(*cell.pesq);
    }
    check_stats(dn, "dnsmos column");
    check_stats(pe, "pesq column");
    for (const auto& [k, cell] : metrics::normalize_difficulty(single)) avg.push_back(cell.avg);
    check_stats(avg, "single-metric avg");
  }
  auto shipped = metrics::DifficultyTable::shipped().avg("env_noise", 1);
  c.expect(shipped && *shipped == 50.5, "shipped env_noise sev 1 avg");
  return c.outcome("worst deviation " + fmt(worst, 3) + ", env_noise sev 1 avg " + (shipped ? fmt(*shipped) : "missing"));
}

// ---------------------------------------------------------------- 5

Outcome ctc_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  Checks c;
  std::mt19937_64 rng(55);
  std::normal_distribution<double> g(0.0, 1.5);
  int cases = 0;
  double worst = 0.0;
  for (int a = 1; a <= 3; ++a)
    for (int T = 1; T <= 4; ++T) {
      std::vector<std::vector<int>> targets{{}};
      for (int x = 0; x < a; ++x) {
        targets.push_back({x});
        for (int y = 0; y < a; ++y) targets.push_back({x, y});
      }
      for (const auto& target : targets) {
        if (toy::ctc_min_frames(target) > T) continue;
        for (int draw = 0; draw < 3; ++draw) {
          Eigen::MatrixXd logits(T, a + 1);
          for (Eigen::Index i = 0; i < logits.size(); ++i) logits.data()[i] = g(rng);
          Eigen::MatrixXd lp = toy::log_softmax_rows(logits);
          const double want = -std::log(oracle::ctc_probability(lp.array().exp().matrix(), target));
          const double got = toy::ctc_loss(lp, target);
          worst = std::max(worst, std::abs(got - want));
          c.expect(std::abs(got - want) <= 1e-9, "A=" + std::to_string(a) + " T=" + std::to_string(T));
          ++cases;
        }
      }
    }

  std::uniform_int_distribution<int> alpha_size(2, 5), n_frames(4, 8), tlen(1, 3);
  std::normal_distribution<double> w(0.0, 0.05), s(0.0, 0.3);
  double worst_rel = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int A = alpha_size(rng);
    toy::ToyCtcModel model(std::string("abcde").substr(0, A), 64, 32, 16000);
    for (Eigen::Index i = 0; i < model.weights.size(); ++i) model.weights.data()[i] = w(rng);
    const int T = n_frames(rng);
    Signal x(64 + (T - 1) * 32);
    for (auto& v : x) v = s(rng);
    std::vector<int> target;
    std::uniform_int_distribution<int> sym(0, A - 1);
    const int L = std::min(tlen(rng), T / 2);
    while (static_cast<int>(target.size()) < L) {
      int y = sym(rng);
      if (target.empty() || y != target.back()) target.push_back(y);
    }
    Signal grad = toy::ctc_grad_input(model, x, target);
    auto loss_at = [&](const Signal& z) {
      return toy::ctc_loss(oracle::toy_logprobs(model.weights, z, model.frame_len, model.hop), target);
    };
    Signal fd(x.size());
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Signal up = x, down = x;
      up(i) += h;
      down(i) -= h;
      fd(i) = (loss_at(up) - loss_at(down)) / (2.0 * h);
    }
    const double rel = (grad - fd).norm() / std::max(fd.norm(), 1e-12);
    worst_rel = std::max(worst_rel, rel);
    c.expect(rel <= 1e-4, "gradient case " + std::to_string(k) + " rel " + fmt(rel));
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 30.0, "took " + fmt(elapsed) + " s");
  return c.outcome(std::to_string(cases) + " brute-force cases (worst " + fmt(worst, 3) +
                   "), 100 gradient checks (worst rel " + fmt(worst_rel, 3) + ")");
}

// ---------------------------------------------------------------- shared toy setup

constexpr char kAlphabet[] = "abcdefgh";

const toy::TrainResult& toy_model() {
  static const toy::TrainResult r = toy::train_toy(7, 20, kAlphabet);
  return r;
}

std::vector<adv::LabeledAudio> labeled(const std::vector<toy::ToyUtterance>& us) {
  std::vector<adv::LabeledAudio> out;
  for (const auto& u : us) out.push_back({u.id, AudioBuffer(u.audio, 16000), u.text});
  return out;
}

double char_cer(const std::string& hyp, const std::string& ref) {
  return static_cast<double>(metrics::edit_distance(hyp, ref)) / static_cast<double>(ref.size());
}

// ---------------------------------------------------------------- 6

Outcome pgd_efficacy() {
  const auto t0 = std::chrono::steady_clock::now();
  Checks c;
  adv::ToyOracle o(toy_model().model);
  auto set = labeled(toy_model().corpus);
  const double n = static_cast<double>(set.size());

  std::vector<double> mean_cer;
  double loss_frac = 0.0, cer_frac = 0.0;
  for (double snr : {40.0, 30.0, 20.0, 10.0}) {
    adv::PgdConfig cfg;
    cfg.snr_db = snr;
    cfg.steps = 50;
    auto deltas = adv::pgd_attack_all(o, set, cfg);
    double cer_sum = 0.0;
    int loss_up = 0, cer_up = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const Signal& x = set[i].audio.samples();
      const Signal xa = x + deltas[i].delta.samples();
      const double eps = std::pow(10.0, -snr / 20.0) * x.norm();
      c.expect(deltas[i].delta.samples().norm() <= eps * (1.0 + 1e-12),
               "delta norm above epsilon at " + fmt(snr) + " dB");
      const double clean_cer = char_cer(o.transcribe(x), set[i].reference);
      const double adv_cer = char_cer(o.transcribe(xa), set[i].reference);
      cer_sum += adv_cer;
      loss_up += o.loss(xa, set[i].reference) > o.loss(x, set[i].reference);
      cer_up += adv_cer > clean_cer;
    }
    mean_cer.push_back(cer_sum / n);
    if (snr == 20.0) {
      loss_frac = loss_up / n;
      cer_frac = cer_up / n;
    }
  }
  c.expect(loss_frac >= 0.95, "loss increased on " + fmt(100 * loss_frac) + "%");
  c.expect(cer_frac >= 0.80, "CER increased on " + fmt(100 * cer_frac) + "%");
  for (std::size_t i = 1; i < mean_cer.size(); ++i)
    c.expect(mean_cer[i] >= mean_cer[i - 1], "mean CER drops between severities " + std::to_string(i) + " and " +
                                                 std::to_string(i + 1));
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 120.0, "took " + fmt(elapsed) + " s");
  return c.outcome("20 dB: loss up " + fmt(100 * loss_frac) + "%, CER up " + fmt(100 * cer_frac) +
                   "%; mean CER 40/30/20/10 dB = " + fmt(mean_cer[0], 3) + "/" + fmt(mean_cer[1], 3) + "/" +
                   fmt(mean_cer[2], 3) + "/" + fmt(mean_cer[3], 3));
}

// ---------------------------------------------------------------- 7

Outcome universal_attack() {
  const auto t0 = std::chrono::steady_clock::now();
  Checks c;
  adv::ToyOracle o(toy_model().model);
  auto dev = labeled(toy::make_corpus(71, 20, kAlphabet, "dev"));
  auto held = labeled(toy::make_corpus(72, 20, kAlphabet, "held"));

  adv::UniversalConfig cfg;
  cfg.snr_db = 10.0;
  cfg.t_cer = 0.3;
  cfg.t_sr = 0.5;
  cfg.e_max = 20;
  int callbacks = 0;
  double eps_seen = 0.0;
  std::vector<double> linf;
  auto u = adv::universal_attack(o, dev, cfg, [&](const adv::EpochStat& s) {
    ++callbacks;
    linf.push_back(s.linf);
  });
  eps_seen = u.epsilon;
  c.expect(u.epochs <= cfg.e_max && callbacks == u.epochs, "epoch count " + std::to_string(u.epochs));
  for (double l : linf) c.expect(l <= eps_seen * (1.0 + 1e-12), "epoch linf " + fmt(l) + " > " + fmt(eps_seen));
  const Signal& v = u.v.samples();
  c.expect(v.lpNorm<Eigen::Infinity>() <= eps_seen * (1.0 + 1e-12), "final linf above epsilon");

  // Random signs with the same L2 norm as v.
  std::mt19937_64 rng(73);
  std::bernoulli_distribution coin;
  const double amp = v.norm() / std::sqrt(static_cast<double>(v.size()));
  Signal random(v.size());
  for (auto& r : random) r = coin(rng) ? amp : -amp;

  const double sr_v = adv::success_rate(o, held, v, cfg.t_cer);
  const double sr_r = adv::success_rate(o, held, random, cfg.t_cer);
  c.expect(sr_v > sr_r, "held-out SR " + fmt(sr_v) + " not above random " + fmt(sr_r));
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 300.0, "took " + fmt(elapsed) + " s");
  return c.outcome(std::to_string(u.epochs) + " epochs, dev SR " + fmt(u.success_rate, 3) + ", held-out SR " +
                   fmt(sr_v, 3) + " vs random " + fmt(sr_r, 3));
}

// ---------------------------------------------------------------- 8

AudioBuffer perturbed(perturb::PerturbationKind kind, int sev, const Signal& x) {
  return perturb::apply_perturbation(perturb::PerturbationSpec::make(kind, sev, 1), AudioBuffer(x, 16000));
}

Outcome dsp_contracts() {
  using perturb::PerturbationKind;
  Checks c;
  const int rate = 16000;

  Signal a440 = oracle::tone(440.0, 1.0, rate);
  auto up = perturbed(PerturbationKind::PitchUp, 4, a440);
  const double f = oracle::peak_frequency(up.samples(), rate, 200.0, 2000.0, 1.0);
  const double dur_ratio = static_cast<double>(up.size()) / a440.size();
  c.expect(std::abs(f / 880.0 - 1.0) <= 0.03, "pitch peak " + fmt(f) + " Hz");
  c.expect(std::abs(dur_ratio - 1.0) <= 0.01, "pitch duration ratio " + fmt(dur_ratio));

  Signal speech = oracle::tone(300.0, 2.0, rate);
  auto fast = perturbed(PerturbationKind::SpeedUp, 4, speech);
  const double speed_ratio = static_cast<double>(fast.size()) / speech.size();
  c.expect(std::abs(speed_ratio - 0.5) <= 0.005, "speed duration ratio " + fmt(speed_ratio));

  // Compare probe levels away from the filter's start-up transient.
  auto level = [&](double hz) {
    Signal y = perturbed(PerturbationKind::Lowpass, 1, oracle::tone(hz, 1.0, rate)).samples();
    return oracle::dft_magnitude(y.segment(4000, 8000), hz, rate);
  };
  const double atten = 20.0 * std::log10(level(1000.0) / level(6000.0));
  c.expect(atten >= 40.0, "lowpass attenuation " + fmt(atten) + " dB");

  Signal carrier = oracle::tone(2000.0, 2.0, rate);
  Signal trem = perturbed(PerturbationKind::Tremolo, 4, carrier).samples();
  Signal power = trem.array().square();
  power.array() -= power.mean();
  const double env = oracle::peak_frequency(power, rate, 5.0, 35.0, 0.05);
  c.expect(std::abs(env - 20.0) <= 0.5, "tremolo envelope " + fmt(env) + " Hz");

  return c.outcome("pitch " + fmt(f) + " Hz (x" + fmt(dur_ratio, 5) + " length), speed x" + fmt(speed_ratio, 5) +
                   " length, lowpass " + fmt(atten) + " dB, tremolo " + fmt(env) + " Hz");
}

// ---------------------------------------------------------------- CLI helpers

std::string quote(const std::string& s) { return "'" + s + "'"; }

int srb_cli(const std::string& args, const std::string& log) {
  return oracle::run(std::string(SRB_CLI) + " " + args + " >>" + quote(log) + " 2>&1");
}

std::size_t line_count(const std::string& path) {
  if (!fs::exists(path)) return 0;
  auto text = oracle::read_file(path);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

harness::Manifest write_corpus(const oracle::TempDir& dir, int n, const std::vector<std::string>& texts) {
  std::mt19937_64 rng(900 + n);
  harness::Manifest m;
  fs::create_directories(dir.path() / "wav");
  for (int i = 0; i < n; ++i) {
    harness::Utterance u;
    u.id = "spk" + std::to_string(i % 4) + "/utt" + std::to_string(i);
    u.audio_path = dir / ("wav/u" + std::to_string(i) + ".wav");
    u.text = texts[i % texts.size()];
    u.speaker_id = "spk" + std::to_string(i % 4);
    u.gender = i % 2 ? metrics::Gender::Female : metrics::Gender::Male;
    u.dataset = "accept";
    audio::write_wav(u.audio_path, AudioBuffer(oracle::speechlike(rng, 0.3, 16000), 16000));
    m.entries.push_back(u);
  }
  harness::write_manifest(dir / "manifest.jsonl", m);
  return m;
}

void write_map(const std::string& path, const std::vector<std::pair<std::string, std::string>>& answers) {
  std::string text;
  for (const auto& [id, hyp] : answers) text += nlohmann::json{{"id", id}, {"text", hyp}}.dump() + "\n";
  oracle::write_file(path, text);
}

// ---------------------------------------------------------------- 9

Outcome determinism() {
  Checks c;
  oracle::TempDir dir;
  const std::vector<std::string> texts{"the quick brown fox", "jumps over the lazy dog", "pack my box"};
  auto m = write_corpus(dir, 8, texts);
  std::vector<std::pair<std::string, std::string>> answers;
  for (std::size_t i = 0; i < m.entries.size(); ++i)
    answers.push_back({m.entries[i].id, i % 3 == 0 ? "the quick brown box" : m.entries[i].text});
  write_map(dir / "map.jsonl", answers);
  const std::string log = dir / "cli.log";

  auto cold_run = [&](const std::string& tag) {
    const std::string root = dir / tag;
    fs::create_directories(root);
    const std::string adapter = std::string(SRB_ECHO_ADAPTER) + " --map " + (dir / "map.jsonl") + " --log " +
                                root + "/requests.log";
    oracle::write_file(root + "/run.json",
                       nlohmann::json{{"manifest", dir / "manifest.jsonl"},
                                      {"seed", 17},
                                      {"output_dir", root + "/eval"},
                                      {"scenarios", {{{"kind", "gaussian_noise"}, {"severities", {1, 3}}},
                                                     {{"kind", "echo"}, {"severities", {2}}}}},
                                      {"models", {{{"id", "echo"}, {"command", adapter}}}}}
                           .dump(2));
    bool ok = srb_cli("perturb --manifest " + (dir / "manifest.jsonl") +
                          " --kind gaussian_noise --severity 1 3 --seed 17 --out " + root + "/pert",
                      log) == 0;
    ok = ok && srb_cli("transcribe --manifest " + root + "/pert/gaussian_noise/3/manifest.jsonl --adapter " +
                           quote(adapter) + " --model-id echo --cache " + root + "/cache.jsonl --out " + root +
                           "/hyp.jsonl",
                       log) == 0;
    ok = ok && srb_cli("evaluate --config " + root + "/run.json", log) == 0;
    c.expect(ok, tag + " pipeline exited nonzero (see " + log + ")");
    return root;
  };
  const std::string a = cold_run("a"), b = cold_run("b");
  const auto csv_a = oracle::read_file(a + "/eval/results.csv");
  c.expect(!csv_a.empty(), "results.csv missing");
  c.expect(csv_a == oracle::read_file(b + "/eval/results.csv"), "results.csv differs between cold runs");
  c.expect(oracle::read_file(a + "/hyp.jsonl") == oracle::read_file(b + "/hyp.jsonl"), "hypotheses differ");
  for (const auto& rel : {"pert/gaussian_noise/1/manifest.jsonl", "pert/gaussian_noise/3/manifest.jsonl"}) {
    const auto ma = harness::load_manifest(a + "/" + rel), mb = harness::load_manifest(b + "/" + rel);
    for (std::size_t i = 0; i < ma.entries.size() && i < mb.entries.size(); ++i)
      c.expect(oracle::read_file(ma.entries[i].audio_path) == oracle::read_file(mb.entries[i].audio_path),
               std::string("perturbed audio differs in ") + rel);
  }

  const std::size_t cold_requests = line_count(a + "/requests.log");
  c.expect(cold_requests > 0, "cold run logged no adapter requests");
  bool ok = srb_cli("transcribe --manifest " + a + "/pert/gaussian_noise/3/manifest.jsonl --adapter " +
                        quote(std::string(SRB_ECHO_ADAPTER) + " --map " + (dir / "map.jsonl") + " --log " + a +
                              "/requests.log") +
                        " --model-id echo --cache " + a + "/cache.jsonl --out " + a + "/hyp2.jsonl",
                    log) == 0;
  ok = ok && srb_cli("evaluate --config " + a + "/run.json", log) == 0;
  c.expect(ok, "cached rerun exited nonzero");
  const std::size_t extra = line_count(a + "/requests.log") - cold_requests;
  c.expect(extra == 0, "cached rerun sent " + std::to_string(extra) + " adapter requests");
  c.expect(csv_a == oracle::read_file(a + "/eval/results.csv"), "cached rerun changed results.csv");
  return c.outcome("results.csv identical (" + std::to_string(csv_a.size()) + " bytes), " +
                   std::to_string(cold_requests) + " cold requests, " + std::to_string(extra) + " cached");
}

// ---------------------------------------------------------------- 10

Outcome fairness() {
  Checks c;
  oracle::TempDir dir;
  // Five words per utterance; males (even index) lose 1 word in 20, females 2.
  const std::string ref = "one two three four five";
  auto m = write_corpus(dir, 8, {ref});
  std::vector<std::pair<std::string, std::string>> answers;
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    std::string hyp = ref;
    if (i == 0) hyp = "one two three four fish";
    if (i == 1) hyp = "one too three four fife";
    answers.push_back({m.entries[i].id, hyp});
  }
  write_map(dir / "map.jsonl", answers);
  oracle::write_file(dir / "run.json",
                     nlohmann::json{{"manifest", dir / "manifest.jsonl"},
                                    {"seed", 5},
                                    {"output_dir", dir / "eval"},
                                    {"scenarios", {{{"kind", "gain"}, {"severities", {1}}}}},
                                    {"models",
                                     {{{"id", "echo"},
                                       {"command", std::string(SRB_ECHO_ADAPTER) + " --map " + (dir / "map.jsonl")}}}}}
                         .dump(2));
  c.expect(srb_cli("evaluate --config " + (dir / "run.json"), dir / "cli.log") == 0, "evaluate exited nonzero");

  std::istringstream csv(oracle::read_file(dir / "eval/fairness.csv"));
  std::string line;
  std::getline(csv, line);
  c.expect(line == "model,dataset,scenario_kind,severity,wer_m,wer_f,lwerr", "fairness.csv header: " + line);
  int rows = 0;
  std::string values;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string field; std::getline(ls, field, ',');) f.push_back(field);
    c.expect(f.size() == 7, "bad row: " + line);
    if (f.size() != 7) continue;
    const double wm = std::stod(f[4]), wf = std::stod(f[5]), l = std::stod(f[6]);
    c.expect(std::abs(wm - 5.0) <= 1e-9 && std::abs(wf - 10.0) <= 1e-9, "WERs in row: " + line);
    c.expect(std::abs(l - 1.0) <= 1e-9, "LWERR " + f[6] + " in " + f[2] + " row");
    values += (values.empty() ? "" : ", ") + f[2] + "=" + f[6];
    ++rows;
  }
  c.expect(rows >= 2, "expected clean and gain rows, got " + std::to_string(rows));
  return c.outcome("LWERR " + values);
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"SNR fidelity", snr_fidelity},
      {"Severity registry", severity_registry},
      {"Metric oracle equivalence", metric_oracle},
      {"Difficulty normalization", normalization},
      {"CTC correctness", ctc_correctness},
      {"PGD efficacy", pgd_efficacy},
      {"Universal attack", universal_attack},
      {"DSP spectral contracts", dsp_contracts},
      {"End-to-end determinism", determinism},
      {"Fairness metric", fairness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failed += !out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << " [" << std::setw(2) << i + 1 << "] " << criteria[i].name << ": "
              << out.detail << " (" << std::fixed << std::setprecision(2) << seconds_since(t0) << " s)"
              << std::defaultfloat << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
