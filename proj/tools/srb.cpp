// srb: perturb, transcribe, attack, evaluate and report.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "srb/adv/attacks.hpp"
#include "srb/audio/dsp.hpp"
#include "srb/audio/wav.hpp"
#include "srb/config.hpp"
#include "srb/error.hpp"
#include "srb/format.hpp"
#include "srb/harness/evaluate.hpp"
#include "srb/hash.hpp"
#include "srb/harness/report.hpp"
#include "srb/harness/scenario.hpp"
#include "srb/metrics/difficulty.hpp"
#include "srb/toy/train.hpp"

namespace fs = std::filesystem;
using namespace srb;

namespace {

struct PerturbArgs {
  std::string manifest, kind, out, config, noise_bank, rir_bank;
  std::vector<int> severities{1, 2, 3, 4};
  std::uint64_t seed = 0;
  bool float32 = false;
  unsigned workers = 0;
};

struct TranscribeArgs {
  std::string manifest, adapter, model_id = "model", cache, out;
  double timeout = 60.0;
};

struct PgdArgs {
  std::string model, manifest, out;
  double snr = 20.0;
  int severity = 0, steps = 50;
  double step_size = 0.0;
  unsigned workers = 0;
};

struct UniversalArgs {
  std::string model, dev, manifest, out;
  double snr = 10.0, alpha = 0.0, t_sr = 0.5, t_cer = 0.3;
  int e_max = 20, i_max = 50;
  std::vector<double> apply_snr{40, 30, 20, 10};
};

struct EvaluateArgs {
  std::string config, out;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

struct ReportArgs {
  std::string results, out, group_by = "cell", csv;
};

struct ToyArgs {
  std::string out, alphabet = "abcdefgh";
  std::uint64_t seed = 0;
  int n_utts = 20, steps = 600;
};

struct DifficultyArgs {
  std::string scores, out;
};

std::vector<adv::LabeledAudio> load_labeled(const std::string& path, int rate) {
  std::vector<adv::LabeledAudio> out;
  for (const auto& u : harness::load_manifest(path).entries)
    out.push_back({u.id, audio::resample(audio::read_wav(u.audio_path), rate), u.text});
  return out;
}

// Derived manifest entries point at freshly written audio, other fields kept.
harness::Utterance relocate(const harness::Utterance& u, const std::string& audio_path) {
  harness::Utterance out = u;
  out.audio_path = audio_path;
  return out;
}

int run_perturb(const PerturbArgs& a) {
  auto table = perturb::SeverityTable::defaults();
  std::map<std::string, std::string> noise_dirs;
  std::string rir_dir = a.rir_bank;
  if (!a.config.empty()) {
    auto doc = load_config_document(a.config);
    const std::string base = fs::path(a.config).parent_path().string();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_relative() ? (fs::path(base) / p).string() : p; };
    if (doc.contains("severities")) table = perturb::SeverityTable::with_overrides(doc["severities"]);
    for (const auto& [k, v] : doc.value("noise_banks", nlohmann::json::object()).items())
      noise_dirs[k] = resolve(v.get<std::string>());
    if (doc.contains("rir_bank") && rir_dir.empty()) rir_dir = resolve(doc["rir_bank"].get<std::string>());
  }
  const auto kind = perturb::parse_kind(a.kind);
  if (!a.noise_bank.empty()) noise_dirs[std::string(perturb::kind_name(kind))] = a.noise_bank;

  auto banks = harness::load_banks(noise_dirs, rir_dir, table);
  auto manifest = harness::load_manifest(a.manifest);
  int failures = 0;
  for (int sev : a.severities) {
    auto spec = perturb::PerturbationSpec::make(kind, sev, a.seed, table);
    auto res = harness::materialize_scenario(manifest, spec, a.out, banks, {a.workers, a.float32, 16000});
    failures += static_cast<int>(res.failures.size());
    std::cout << perturb::kind_name(kind) << " severity " << sev << ": " << res.written << " written, "
              << res.unchanged << " unchanged, " << res.failures.size() << " failed -> " << res.manifest_path
              << "\n";
  }
  return failures ? 2 : 0;
}

int run_transcribe(const TranscribeArgs& a) {
  harness::ModelAdapter adapter;
  adapter.id = a.model_id;
  adapter.command = {a.adapter};
  adapter.timeout_seconds = a.timeout;
  auto manifest = harness::load_manifest(a.manifest);
  harness::TranscriptCache cache =
      a.cache.empty() ? harness::TranscriptCache() : harness::TranscriptCache(a.cache);
  harness::TranscribeStats stats;
  auto hyps = harness::transcribe(adapter, manifest, cache, &stats);
  std::ofstream out(a.out, std::ios::trunc);
  if (!out) throw Error("cannot write " + a.out);
  for (const auto& u : manifest.entries) out << nlohmann::json{{"id", u.id}, {"text", hyps.at(u.id)}}.dump() << '\n';
  std::cout << manifest.entries.size() << " transcripts (" << stats.requests << " requests, " << stats.cache_hits
            << " cache hits) -> " << a.out << "\n";
  return 0;
}

int run_pgd(const PgdArgs& a) {
  adv::ToyOracle oracle(toy::ToyCtcModel::load(a.model));
  auto set = load_labeled(a.manifest, oracle.sample_rate());
  adv::PgdConfig cfg;
  cfg.snr_db = a.severity ? adv::kAdversarialSnrGrid.at(static_cast<std::size_t>(a.severity - 1)) : a.snr;
  cfg.steps = a.steps;
  if (a.step_size > 0) cfg.step_size = a.step_size;
  auto deltas = adv::pgd_attack_all(oracle, set, cfg, a.workers);

  fs::create_directories(a.out);
  auto source = harness::load_manifest(a.manifest);
  harness::Manifest derived;
  nlohmann::json summary = nlohmann::json::array();
  double loss_up = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& x = set[i].audio;
    audio::AudioBuffer adv_audio = x.with_samples(x.samples() + deltas[i].delta.samples());
    const std::string path = (fs::path(a.out) / (harness::file_stem_for(set[i].id) + ".wav")).string();
    audio::write_wav(path, adv_audio, audio::WavEncoding::Float32);
    derived.entries.push_back(relocate(source.entries[i], path));
    double before = oracle.loss(x.samples(), set[i].reference);
    double after = oracle.loss(adv_audio.samples(), set[i].reference);
    loss_up += after > before;
    summary.push_back({{"id", set[i].id},
                       {"epsilon", deltas[i].epsilon},
                       {"delta_l2", deltas[i].delta.samples().norm()},
                       {"loss_clean", before},
                       {"loss_adv", after},
                       {"hyp_clean", oracle.transcribe(x.samples())},
                       {"hyp_adv", oracle.transcribe(adv_audio.samples())}});
  }
  harness::write_manifest((fs::path(a.out) / "manifest.jsonl").string(), derived);
  std::ofstream((fs::path(a.out) / "pgd.json").string()) << summary.dump(2) << '\n';
  std::cout << "pgd at " << format_number(cfg.snr_db) << " dB: loss increased on " << loss_up << "/" << set.size()
            << " utterances -> " << a.out << "\n";
  return 0;
}

int run_universal(const UniversalArgs& a) {
  adv::ToyOracle oracle(toy::ToyCtcModel::load(a.model));
  auto dev = load_labeled(a.dev, oracle.sample_rate());
  adv::UniversalConfig cfg;
  cfg.snr_db = a.snr;
  cfg.e_max = a.e_max;
  cfg.i_max = a.i_max;
  cfg.t_sr = a.t_sr;
  cfg.t_cer = a.t_cer;
  if (a.alpha > 0) cfg.alpha = a.alpha;
  auto v = adv::universal_attack(oracle, dev, cfg, [](const adv::EpochStat& s) {
    std::cout << "epoch " << s.epoch << ": success rate " << format_number(s.success_rate) << "\n";
  });
  v.provenance["dev_manifest_hash"] = to_hex(hash_file(a.dev));
  fs::create_directories(a.out);
  const std::string v_path = (fs::path(a.out) / "universal.wav").string();
  v.save(v_path);
  std::cout << "universal perturbation after " << v.epochs << " epochs, dev success rate "
            << format_number(v.success_rate) << " -> " << v_path << "\n";
  if (a.manifest.empty()) return 0;

  auto source = harness::load_manifest(a.manifest);
  auto test = load_labeled(a.manifest, oracle.sample_rate());
  std::vector<audio::AudioBuffer> clean;
  for (const auto& t : test) clean.push_back(t.audio);
  for (std::size_t s = 0; s < a.apply_snr.size(); ++s) {
    auto perturbed = adv::apply_universal(clean, v.v, a.apply_snr[s]);
    const fs::path dir = fs::path(a.out) / std::to_string(s + 1);
    fs::create_directories(dir);
    harness::Manifest derived;
    for (std::size_t i = 0; i < perturbed.size(); ++i) {
      const std::string path = (dir / (harness::file_stem_for(test[i].id) + ".wav")).string();
      audio::write_wav(path, perturbed[i], audio::WavEncoding::Float32);
      derived.entries.push_back(relocate(source.entries[i], path));
    }
    harness::write_manifest((dir / "manifest.jsonl").string(), derived);
    std::cout << "applied at " << format_number(a.apply_snr[s]) << " dB -> " << (dir / "manifest.jsonl").string()
              << "\n";
  }
  return 0;
}

int run_evaluate(const EvaluateArgs& a, bool seed_given, bool workers_given) {
  auto cfg = harness::load_run_config(a.config);
  if (seed_given) cfg.run_seed = a.seed;
  if (!a.out.empty()) cfg.output_dir = a.out;
  if (workers_given) cfg.workers = a.workers;
  auto summary = harness::evaluate_run(cfg);
  std::cout << summary.results.size() << " result cells, " << summary.records.size() << " records, "
            << summary.adapter_requests << " adapter requests, " << summary.cache_hits << " cache hits, "
            << summary.failures << " perturbation failures -> " << cfg.output_dir << "\n";
  return 0;
}

int run_report(const ReportArgs& a) {
  std::string path = a.results;
  if (path.empty()) path = (fs::path(a.out.empty() ? "." : a.out) / "results.jsonl").string();
  auto by = harness::parse_group_by(a.group_by);
  auto rows = harness::group_results(harness::read_results_jsonl(path), by);
  std::cout << harness::render_table(rows, by);
  if (!a.csv.empty()) {
    std::ofstream out(a.csv, std::ios::trunc);
    if (!out) throw Error("cannot write " + a.csv);
    out << harness::render_csv(rows, by);
  }
  return 0;
}

int run_toy(const ToyArgs& a) {
  toy::TrainOptions opts;
  opts.max_steps = a.steps;
  auto res = toy::train_toy(a.seed, a.n_utts, a.alphabet, opts);
  fs::create_directories(fs::path(a.out) / "wav");
  res.model.save((fs::path(a.out) / "model.json").string());
  harness::Manifest m;
  for (const auto& u : res.corpus) {
    const std::string path = (fs::path(a.out) / "wav" / (u.id + ".wav")).string();
    audio::write_wav(path, audio::AudioBuffer(u.audio, res.model.sample_rate), audio::WavEncoding::Float32);
    m.entries.push_back({u.id, path, u.text, "", metrics::Gender::Unknown, "und", "toy"});
  }
  harness::write_manifest((fs::path(a.out) / "manifest.jsonl").string(), m);
  std::cout << "trained in " << res.steps << " steps, train CER " << format_number(res.train_cer) << " -> "
            << a.out << "\n";
  return 0;
}

int run_difficulty(const DifficultyArgs& a) {
  auto obs = metrics::read_mos_csv(a.scores);
  metrics::DifficultyTable table(metrics::normalize_difficulty(metrics::aggregate_mos(obs)));
  std::ofstream out(a.out, std::ios::trunc);
  if (!out) throw Error("cannot write " + a.out);
  out << table.to_csv();
  std::cout << table.cells().size() << " cells -> " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speech recognition robustness benchmark"};
  app.require_subcommand(1);

  PerturbArgs pa;
  auto* perturb_cmd = app.add_subcommand("perturb", "Write perturbed copies of a manifest");
  perturb_cmd->add_option("--manifest", pa.manifest, "Clean manifest (JSONL)")->required();
  perturb_cmd->add_option("--kind", pa.kind, "Perturbation kind, e.g. gaussian_noise")->required();
  perturb_cmd->add_option("--severity", pa.severities, "Severities 1-4")->check(CLI::Range(1, 4));
  perturb_cmd->add_option("--seed", pa.seed, "Run seed");
  perturb_cmd->add_option("--out", pa.out, "Output directory")->required();
  perturb_cmd->add_option("--config", pa.config, "TOML/JSON with severities, noise_banks, rir_bank");
  perturb_cmd->add_option("--noise-bank", pa.noise_bank, "Noise clip directory for this kind");
  perturb_cmd->add_option("--rir-bank", pa.rir_bank, "Impulse response directory");
  perturb_cmd->add_flag("--float32", pa.float32, "Write float32 WAV instead of PCM16");
  perturb_cmd->add_option("--workers", pa.workers, "Worker threads (0 = all cores)");

  TranscribeArgs ta;
  auto* transcribe_cmd = app.add_subcommand("transcribe", "Run an adapter over a manifest");
  transcribe_cmd->add_option("--manifest", ta.manifest, "Manifest (JSONL)")->required();
  transcribe_cmd->add_option("--adapter", ta.adapter, "Adapter command line")->required();
  transcribe_cmd->add_option("--model-id", ta.model_id, "Model id used for caching");
  transcribe_cmd->add_option("--cache", ta.cache, "Transcript cache file");
  transcribe_cmd->add_option("--out", ta.out, "Hypotheses JSONL")->required();
  transcribe_cmd->add_option("--timeout", ta.timeout, "Seconds per request");

  auto* attack_cmd = app.add_subcommand("attack", "Adversarial attacks against the toy model");
  attack_cmd->require_subcommand(1);
  PgdArgs pg;
  auto* pgd_cmd = attack_cmd->add_subcommand("pgd", "Utterance-specific L2 PGD");
  pgd_cmd->add_option("--model", pg.model, "Toy model JSON")->required();
  pgd_cmd->add_option("--manifest", pg.manifest, "Utterances to attack")->required();
  pgd_cmd->add_option("--snr", pg.snr, "SNR bound in dB");
  pgd_cmd->add_option("--severity", pg.severity, "Severity 1-4 (overrides --snr)")->check(CLI::Range(1, 4));
  pgd_cmd->add_option("--steps", pg.steps, "Iterations");
  pgd_cmd->add_option("--step-size", pg.step_size, "Step size (default epsilon/5)");
  pgd_cmd->add_option("--out", pg.out, "Output directory")->required();
  pgd_cmd->add_option("--workers", pg.workers, "Worker threads (0 = all cores)");
  UniversalArgs ua;
  auto* uni_cmd = attack_cmd->add_subcommand("universal", "Utterance-agnostic perturbation");
  uni_cmd->add_option("--model", ua.model, "Toy model JSON")->required();
  uni_cmd->add_option("--dev", ua.dev, "Dev manifest used to fit the perturbation")->required();
  uni_cmd->add_option("--manifest", ua.manifest, "Test manifest to perturb");
  uni_cmd->add_option("--snr", ua.snr, "SNR bound used for epsilon, dB");
  uni_cmd->add_option("--apply-snr", ua.apply_snr, "SNRs at which to apply to the test set");
  uni_cmd->add_option("--alpha", ua.alpha, "Step size (default epsilon/1000)");
  uni_cmd->add_option("--e-max", ua.e_max, "Maximum epochs");
  uni_cmd->add_option("--i-max", ua.i_max, "Maximum iterations per utterance");
  uni_cmd->add_option("--t-sr", ua.t_sr, "Target success rate");
  uni_cmd->add_option("--t-cer", ua.t_cer, "CER threshold");
  uni_cmd->add_option("--out", ua.out, "Output directory")->required();

  EvaluateArgs ea;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Run a full evaluation from a config");
  evaluate_cmd->add_option("--config", ea.config, "Run config (TOML or JSON)")->required();
  auto* seed_opt = evaluate_cmd->add_option("--seed", ea.seed, "Override the run seed");
  evaluate_cmd->add_option("--out", ea.out, "Override the output directory");
  auto* workers_opt = evaluate_cmd->add_option("--workers", ea.workers, "Worker threads (0 = all cores)");

  ReportArgs ra;
  auto* report_cmd = app.add_subcommand("report", "Summarize results.jsonl");
  report_cmd->add_option("--results", ra.results, "results.jsonl path");
  report_cmd->add_option("--out", ra.out, "Run output directory holding results.jsonl");
  report_cmd->add_option("--group-by", ra.group_by, "cell, scenario, category or model");
  report_cmd->add_option("--csv", ra.csv, "Also write the grouped table as CSV");

  ToyArgs ya;
  auto* toy_cmd = app.add_subcommand("train-toy", "Train the toy CTC model and write its corpus");
  toy_cmd->add_option("--seed", ya.seed, "Seed");
  toy_cmd->add_option("--n-utts", ya.n_utts, "Training utterances");
  toy_cmd->add_option("--alphabet", ya.alphabet, "Symbols (at most 8)");
  toy_cmd->add_option("--steps", ya.steps, "Step budget");
  toy_cmd->add_option("--out", ya.out, "Output directory")->required();

  DifficultyArgs da;
  auto* diff_cmd = app.add_subcommand("difficulty", "Build a difficulty table from per-recording MOS");
  diff_cmd->add_option("--scores", da.scores, "CSV scenario,severity,dnsmos,pesq")->required();
  diff_cmd->add_option("--out", da.out, "Output table CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    if (rc == 0) return 0;
    for (auto* sub : app.get_subcommands()) {
      auto* leaf = sub;
      while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
      std::cerr << leaf->help();
    }
    if (app.get_subcommands().empty()) std::cerr << app.help();
    return 1;
  }

  try {
    if (*perturb_cmd) return run_perturb(pa);
    if (*transcribe_cmd) return run_transcribe(ta);
    if (*pgd_cmd) return run_pgd(pg);
    if (*uni_cmd) return run_universal(ua);
    if (*evaluate_cmd) return run_evaluate(ea, seed_opt->count() > 0, workers_opt->count() > 0);
    if (*report_cmd) return run_report(ra);
    if (*toy_cmd) return run_toy(ya);
    if (*diff_cmd) return run_difficulty(da);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
