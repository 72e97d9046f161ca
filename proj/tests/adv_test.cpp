#include "doctest.h"
#include "oracles.hpp"
#include "srb/adv/attacks.hpp"
#include "srb/audio/snr.hpp"
#include "srb/error.hpp"
#include "srb/toy/train.hpp"

using namespace srb;
using namespace srb::adv;

namespace {

const toy::TrainResult& trained() {
  static const toy::TrainResult r = toy::train_toy(21, 10, "abcdefgh");
  return r;
}

std::vector<LabeledAudio> labeled(const std::vector<toy::ToyUtterance>& us) {
  std::vector<LabeledAudio> out;
  for (const auto& u : us) out.push_back({u.id, AudioBuffer(u.audio, 16000), u.text});
  return out;
}

// Counts utterances whose perturbed-vs-clean CER exceeds t_cer by hand.
double hand_success(const GradientOracle& o, const std::vector<LabeledAudio>& set, const Signal& v, double t) {
  int hits = 0;
  for (const auto& u : set) {
    Signal x = u.audio.samples();
    Signal p = x;
    for (Index i = 0; i < x.size(); ++i) p(i) += v(i % v.size());
    std::string clean = o.transcribe(x), pert = o.transcribe(p);
    double c = oracle::edit_distance(std::vector<char>(pert.begin(), pert.end()),
                                     std::vector<char>(clean.begin(), clean.end())) /
               static_cast<double>(clean.size());
    hits += c > t;
  }
  return static_cast<double>(hits) / set.size();
}

}  // namespace

TEST_CASE("snr to epsilon") {
  Signal x = Signal::Zero(4);
  x(0) = 1.0;
  AudioBuffer a(x, 16000);
  CHECK(snr_to_epsilon(a, 20.0, NormKind::L2) == doctest::Approx(0.1));
  CHECK(snr_to_epsilon(a, 0.0, NormKind::L2) == doctest::Approx(1.0));
  CHECK(snr_to_epsilon(a.with_samples(0.5 * x), 40.0, NormKind::Linf) == doctest::Approx(0.005));
  CHECK_THROWS_AS(snr_to_epsilon(a.with_samples(Signal::Zero(4)), 10.0, NormKind::L2), ValidationError);
}

TEST_CASE("pgd respects its budget and leaves inputs alone") {
  ToyOracle o(trained().model);
  auto set = labeled(trained().corpus);
  const Signal before = set[0].audio.samples();
  PgdConfig none;
  none.steps = 0;
  CHECK(pgd_attack(o, set[0].audio, set[0].reference, none).delta.samples().norm() == 0.0);
  PgdConfig cfg;
  cfg.steps = 10;
  auto all = pgd_attack_all(o, set, cfg, 2);
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(all[i].delta.samples().norm() <= all[i].epsilon + 1e-9);
    CHECK(o.loss(set[i].audio.samples() + all[i].delta.samples(), set[i].reference) >
          o.loss(set[i].audio.samples(), set[i].reference));
  }
  CHECK(set[0].audio.samples() == before);
  auto again = pgd_attack(o, set[0].audio, set[0].reference, cfg);
  CHECK(again.delta.samples() == all[0].delta.samples());
}

TEST_CASE("success rate edge cases and hand count") {
  ToyOracle o(trained().model);
  auto set = labeled(trained().corpus);
  set.resize(5);
  Signal zero = Signal::Zero(100);
  CHECK(success_rate(o, set, zero, 0.3) == 0.0);
  CHECK(success_rate(o, set, zero, -1.0) == 1.0);
  CHECK_THROWS_AS(success_rate(o, std::vector<LabeledAudio>{}, zero, 0.3), ValidationError);
  // A loud tone at symbol d's frequency rewrites most transcripts.
  Signal v = 0.4 * toy::synthesize("d", "abcdefgh").head(1600);
  CHECK(success_rate(o, set, v, 0.3) == hand_success(o, set, v, 0.3));
  CHECK(success_rate(o, set, v, 0.0) == hand_success(o, set, v, 0.0));
}

TEST_CASE("universal attack loop guard and clip invariant") {
  ToyOracle o(trained().model);
  auto dev = labeled(trained().corpus);
  UniversalConfig none;
  none.t_sr = 0.0;
  auto z = universal_attack(o, dev, none);
  CHECK(z.epochs == 0);
  CHECK(z.v.samples().norm() == 0.0);

  UniversalConfig cfg;
  cfg.e_max = 3;
  cfg.i_max = 5;
  std::vector<EpochStat> seen;
  auto u = universal_attack(o, dev, cfg, [&](const EpochStat& s) { seen.push_back(s); });
  CHECK(u.epochs == static_cast<int>(seen.size()));
  CHECK(u.epochs <= 3);
  for (const auto& s : seen) CHECK(s.linf <= u.epsilon + 1e-12);
  CHECK(audio::linf_norm(u.v.samples()) <= u.epsilon + 1e-12);
  Index longest = 0;
  for (const auto& d : dev) longest = std::max(longest, d.audio.size());
  CHECK(u.v.size() == longest);
  CHECK_THROWS_AS(universal_attack(o, std::vector<LabeledAudio>{}, cfg), ValidationError);
  UniversalConfig bad;
  bad.t_sr = 1.5;
  CHECK_THROWS_AS(universal_attack(o, dev, bad), ValidationError);

  auto again = universal_attack(o, dev, cfg);
  CHECK(again.v.samples() == u.v.samples());
}

TEST_CASE("universal perturbation persistence and application") {
  oracle::TempDir dir;
  UniversalPerturbation p;
  p.v = AudioBuffer(0.01 * Signal::LinSpaced(500, -1.0, 1.0), 16000);
  p.epsilon = 0.02;
  p.epochs = 4;
  p.success_rate = 0.25;
  p.history = {{1, 0.1, 0.01}};
  p.provenance = {{"oracle", "toy-x"}};
  p.save(dir / "v.wav");
  auto back = UniversalPerturbation::load(dir / "v.wav");
  CHECK((back.v.samples() - p.v.samples()).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK(back.epsilon == 0.02);
  CHECK(back.epochs == 4);
  CHECK(back.history.size() == 1);

  std::vector<AudioBuffer> test{AudioBuffer(toy::synthesize("abc", "abcdefgh"), 16000),
                                AudioBuffer(toy::synthesize("h", "abcdefgh"), 16000)};
  for (double snr : {40.0, 10.0}) {
    auto out = apply_universal(test, p.v, snr);
    for (std::size_t i = 0; i < test.size(); ++i) {
      auto n = test[i].with_samples(out[i].samples() - test[i].samples());
      CHECK(audio::measure_snr(test[i], n) == doctest::Approx(snr).epsilon(1e-9));
    }
  }
  ToyOracle o(trained().model);
  auto quiet = apply_universal(test, p.v, 200.0);
  CHECK(o.transcribe(quiet[0].samples()) == o.transcribe(test[0].samples()));
  CHECK_THROWS_AS(apply_universal(test, AudioBuffer(Signal::Zero(10), 16000), 10.0), ValidationError);
}
