#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "srb/harness/config.hpp"
#include "srb/metrics/difficulty.hpp"
#include "srb/metrics/error_rate.hpp"

namespace srb::harness {

// One (model, dataset, scenario, severity) cell.
struct ResultRow {
  std::string model;
  std::string dataset;
  std::string scenario;
  std::string category;  // kind category, "adversarial", "real_world" or "clean"
  int severity = 0;
  std::size_t n_utts = 0;
  double wer = 0.0;
  std::optional<double> werd;
  std::optional<double> difficulty;
  std::optional<double> nwerd;
  bool adversarial = false;
};

struct FairnessRow {
  std::string model;
  std::string dataset;
  std::string scenario;
  int severity = 0;
  std::optional<double> wer_m;
  std::optional<double> wer_f;
  std::optional<double> lwerr;
};

void to_json(nlohmann::json& j, const ResultRow& r);
void from_json(const nlohmann::json& j, ResultRow& r);

// Category of a scenario name as used in reports.
std::string scenario_category(const std::string& scenario, bool adversarial);

/// Per-cell WER, WERD against the same model and dataset's clean cell,
/// difficulty and NWERD. NWERD is only computed for non-adversarial cells;
/// a missing difficulty cell leaves it empty with a warning. Throws when a
/// cell has no clean baseline. Rows come out in a canonical order.
std::vector<ResultRow> summarize(std::span<const metrics::EvalRecord> records,
                                 const metrics::DifficultyTable& difficulty,
                                 const std::set<std::string>& adversarial_scenarios);

// Per-cell male and female WER and their LWERR (empty when undefined).
std::vector<FairnessRow> fairness(std::span<const metrics::EvalRecord> records);

void write_results_csv(const std::string& path, std::span<const ResultRow> rows);
void write_results_jsonl(const std::string& path, std::span<const ResultRow> rows);
void write_fairness_csv(const std::string& path, std::span<const FairnessRow> rows);
std::vector<ResultRow> read_results_jsonl(const std::string& path);

struct RunSummary {
  std::vector<metrics::EvalRecord> records;
  std::vector<ResultRow> results;
  std::vector<FairnessRow> fairness;
  std::size_t adapter_requests = 0;
  std::size_t cache_hits = 0;
  std::size_t failures = 0;
};

/// Materializes every scenario, transcribes everything with every model
/// (through the transcript cache in output_dir/cache), scores and writes
/// records.jsonl, results.csv, results.jsonl and fairness.csv to output_dir.
RunSummary evaluate_run(const RunConfig& config);

}  // namespace srb::harness
