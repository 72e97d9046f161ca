#include "srb/harness/evaluate.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <tuple>

#include "srb/error.hpp"
#include "srb/format.hpp"
#include "srb/harness/scenario.hpp"
#include "srb/log.hpp"
#include "srb/perturb/kinds.hpp"

namespace srb::harness {

namespace fs = std::filesystem;
using metrics::EvalRecord;

namespace {

using CellKey = std::tuple<std::string, std::string, std::string, int>;  // model, dataset, scenario, severity

std::map<CellKey, std::vector<EvalRecord>> group_cells(std::span<const EvalRecord> records) {
  std::map<CellKey, std::vector<EvalRecord>> cells;
  for (const auto& r : records) cells[{r.model_id, r.dataset, r.scenario, r.severity}].push_back(r);
  return cells;
}

std::int64_t ref_total(std::span<const EvalRecord> rs) {
  std::int64_t n = 0;
  for (const auto& r : rs) n += r.ref_len;
  return n;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

bool row_order(const ResultRow& a, const ResultRow& b) {
  auto key = [](const ResultRow& r) {
    return std::make_tuple(std::cref(r.model), std::cref(r.dataset), r.scenario != "clean",
                           std::cref(r.scenario), r.severity);
  };
  return key(a) < key(b);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

}  // namespace

std::string scenario_category(const std::string& scenario, bool adversarial) {
  if (adversarial) return "adversarial";
  if (scenario == "clean") return "clean";
  try {
    return std::string(perturb::kind_category(perturb::parse_kind(scenario)));
  } catch (const ValidationError&) {
    return "real_world";
  }
}

void to_json(nlohmann::json& j, const ResultRow& r) {
  j = nlohmann::json{{"model", r.model},       {"dataset", r.dataset},   {"scenario", r.scenario},
                     {"category", r.category}, {"severity", r.severity}, {"n_utts", r.n_utts},
                     {"wer", r.wer},           {"adversarial", r.adversarial}};
  j["werd"] = opt_json(r.werd);
  j["difficulty"] = opt_json(r.difficulty);
  j["nwerd"] = opt_json(r.nwerd);
}

void from_json(const nlohmann::json& j, ResultRow& r) {
  r.model = j.at("model").get<std::string>();
  r.dataset = j.at("dataset").get<std::string>();
  r.scenario = j.at("scenario").get<std::string>();
  r.adversarial = j.value("adversarial", false);
  r.category = j.value("category", scenario_category(r.scenario, r.adversarial));
  r.severity = j.at("severity").get<int>();
  r.n_utts = j.at("n_utts").get<std::size_t>();
  r.wer = j.at("wer").get<double>();
  r.werd = opt_from(j, "werd");
  r.difficulty = opt_from(j, "difficulty");
  r.nwerd = opt_from(j, "nwerd");
}

std::vector<ResultRow> summarize(std::span<const EvalRecord> records, const metrics::DifficultyTable& difficulty,
                                 const std::set<std::string>& adversarial_scenarios) {
  auto cells = group_cells(records);
  std::map<std::pair<std::string, std::string>, double> clean_wer;
  for (const auto& [key, rs] : cells)
    if (std::get<2>(key) == "clean")
      clean_wer[{std::get<0>(key), std::get<1>(key)}] = metrics::corpus_error_rate(rs);

  std::vector<ResultRow> rows;
  for (const auto& [key, rs] : cells) {
    const auto& [model, dataset, scenario, severity] = key;
    ResultRow row;
    row.model = model;
    row.dataset = dataset;
    row.scenario = scenario;
    row.severity = severity;
    row.adversarial = adversarial_scenarios.count(scenario) > 0;
    row.category = scenario_category(scenario, row.adversarial);
    row.n_utts = rs.size();
    row.wer = metrics::corpus_error_rate(rs);
    auto base = clean_wer.find({model, dataset});
    if (base == clean_wer.end())
      throw ValidationError("no clean baseline for model '" + model + "' on dataset '" + dataset + "'");
    row.werd = metrics::werd(row.wer, base->second);
    if (scenario != "clean" && !row.adversarial) {
      row.difficulty = difficulty.avg(scenario, severity);
      if (row.difficulty) {
        row.nwerd = metrics::nwerd(*row.werd, *row.difficulty);
      } else {
        log_warning("no difficulty for " + scenario + " severity " + std::to_string(severity) +
                    "; NWERD omitted");
      }
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), row_order);
  return rows;
}

std::vector<FairnessRow> fairness(std::span<const EvalRecord> records) {
  std::vector<FairnessRow> rows;
  for (const auto& [key, rs] : group_cells(records)) {
    std::vector<EvalRecord> male, female;
    for (const auto& r : rs) {
      if (r.gender == metrics::Gender::Male) male.push_back(r);
      if (r.gender == metrics::Gender::Female) female.push_back(r);
    }
    FairnessRow row;
    std::tie(row.model, row.dataset, row.scenario, row.severity) = key;
    if (ref_total(male) > 0) row.wer_m = metrics::corpus_error_rate(male);
    if (ref_total(female) > 0) row.wer_f = metrics::corpus_error_rate(female);
    row.lwerr = metrics::lwerr(female, male);
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const FairnessRow& a, const FairnessRow& b) {
    auto key = [](const FairnessRow& r) {
      return std::make_tuple(std::cref(r.model), std::cref(r.dataset), r.scenario != "clean",
                             std::cref(r.scenario), r.severity);
    };
    return key(a) < key(b);
  });
  return rows;
}

void write_results_csv(const std::string& path, std::span<const ResultRow> rows) {
  auto out = open_out(path);
  out << "model,dataset,scenario_kind,severity,n_utts,wer,werd,difficulty,nwerd\n";
  for (const auto& r : rows) {
    out << csv_field(r.model) << ',' << csv_field(r.dataset) << ',' << csv_field(r.scenario) << ','
        << r.severity << ',' << r.n_utts << ',' << format_number(r.wer) << ',' << opt_number(r.werd) << ','
        << opt_number(r.difficulty) << ',' << opt_number(r.nwerd) << '\n';
  }
}

void write_results_jsonl(const std::string& path, std::span<const ResultRow> rows) {
  auto out = open_out(path);
  for (const auto& r : rows) out << nlohmann::json(r).dump() << '\n';
}

void write_fairness_csv(const std::string& path, std::span<const FairnessRow> rows) {
  auto out = open_out(path);
  out << "model,dataset,scenario_kind,severity,wer_m,wer_f,lwerr\n";
  for (const auto& r : rows) {
    out << csv_field(r.model) << ',' << csv_field(r.dataset) << ',' << csv_field(r.scenario) << ','
        << r.severity << ',' << opt_number(r.wer_m) << ',' << opt_number(r.wer_f) << ',' << opt_number(r.lwerr)
        << '\n';
  }
}

std::vector<ResultRow> read_results_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::vector<ResultRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(nlohmann::json::parse(line).get<ResultRow>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

namespace {

struct Job {
  Manifest manifest;
  std::string scenario;
  int severity = 0;
};

// Fills empty dataset fields so every record lands in a named dataset.
void label_dataset(Manifest& m, const std::string& fallback) {
  for (auto& u : m.entries)
    if (u.dataset.empty()) u.dataset = fallback;
}

}  // namespace

RunSummary evaluate_run(const RunConfig& config) {
  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);

  const perturb::SeverityTable table =
      config.severity_table ? perturb::SeverityTable::load(*config.severity_table) : perturb::SeverityTable::defaults();
  const metrics::DifficultyTable difficulty = config.difficulty_table
                                                  ? metrics::DifficultyTable::load(*config.difficulty_table)
                                                  : metrics::DifficultyTable::shipped();
  const ScenarioBanks banks = load_banks(config.noise_banks, config.rir_bank.value_or(""), table);

  RunSummary summary;
  std::vector<Job> jobs;
  std::string first_dataset;
  std::map<std::string, int> stems;
  for (const auto& path : config.manifests) {
    Manifest clean = load_manifest(path);
    const std::string stem = fs::path(path).stem().string();
    label_dataset(clean, stem);
    if (first_dataset.empty() && !clean.entries.empty()) first_dataset = clean.entries.front().dataset;
    int seen = stems[stem]++;
    const std::string audio_dir = (out_dir / "audio" / (seen ? stem + "-" + std::to_string(seen + 1) : stem)).string();
    jobs.push_back({clean, "clean", 0});

    for (const auto& sc : config.scenarios) {
      if (sc.manifest) continue;
      const auto kind = perturb::parse_kind(sc.name);
      for (int sev : sc.severities) {
        auto spec = perturb::PerturbationSpec::make(kind, sev, config.run_seed, table);
        auto res = materialize_scenario(clean, spec, audio_dir, banks, {config.workers, config.float_wav, 16000});
        summary.failures += res.failures.size();
        jobs.push_back({std::move(res.manifest), sc.name, sev});
      }
    }
  }

  std::set<std::string> adversarial;
  for (const auto& sc : config.scenarios) {
    if (!sc.manifest) continue;
    Manifest m = load_manifest(*sc.manifest);
    const std::string base = sc.baseline_dataset.empty() ? first_dataset : sc.baseline_dataset;
    for (auto& u : m.entries) u.dataset = base;
    if (sc.adversarial) adversarial.insert(sc.name);
    jobs.push_back({std::move(m), sc.name, sc.severity});
  }

  TranscriptCache cache((out_dir / "cache" / "transcripts.jsonl").string());
  for (const auto& model : config.models) {
    for (const auto& job : jobs) {
      TranscribeStats stats;
      auto hyps = transcribe(model, job.manifest, cache, &stats);
      summary.adapter_requests += stats.requests;
      summary.cache_hits += stats.cache_hits;
      for (const auto& u : job.manifest.entries) {
        auto score = metrics::score_pair(u.text, hyps.at(u.id), config.token_level);
        summary.records.push_back({u.id, model.id, u.dataset, job.scenario, job.severity, score.edit_distance,
                                   score.ref_len, u.gender, u.language});
      }
    }
  }

  summary.results = summarize(summary.records, difficulty, adversarial);
  summary.fairness = fairness(summary.records);
  metrics::write_records_jsonl((out_dir / "records.jsonl").string(), summary.records);
  write_results_csv((out_dir / "results.csv").string(), summary.results);
  write_results_jsonl((out_dir / "results.jsonl").string(), summary.results);
  write_fairness_csv((out_dir / "fairness.csv").string(), summary.fairness);
  return summary;
}

}  // namespace srb::harness
