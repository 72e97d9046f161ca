#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "srb/metrics/text.hpp"

namespace srb::metrics {

enum class Gender { Male, Female, Unknown };

std::string_view gender_name(Gender g);  // "m", "f", "unknown"
// Accepts "m", "f", "unknown" (and null/empty as unknown); throws otherwise.
Gender parse_gender(std::string_view token);

/// One scored utterance. `scenario` is a perturbation kind name, "clean",
/// an adversarial attack name, or a named real-world scenario; `severity` is
/// 0 for clean and 1-4 otherwise.
struct EvalRecord {
  std::string utterance_id;
  std::string model_id;
  std::string dataset;
  std::string scenario;
  int severity = 0;
  std::int64_t edit_distance = 0;
  std::int64_t ref_len = 0;
  Gender gender = Gender::Unknown;
  std::string language;
};

void to_json(nlohmann::json& j, const EvalRecord& r);
void from_json(const nlohmann::json& j, EvalRecord& r);

std::vector<EvalRecord> read_records_jsonl(const std::string& path);
void write_records_jsonl(const std::string& path, std::span<const EvalRecord> records);

struct PairScore {
  std::int64_t edit_distance = 0;
  std::int64_t ref_len = 0;
};

// Normalizes both strings and returns (edit distance, reference length).
PairScore score_pair(std::string_view reference, std::string_view hypothesis,
                     TokenLevel level = TokenLevel::Word);

// 100 * sum(edits) / sum(ref_len) over the whole corpus.
double corpus_error_rate(std::span<const EvalRecord> records);

// CER(a, b) = EditDistance(a, b) / len(b) on normalized characters, as a
// fraction. Empty b: 0 when a is also empty, else +inf.
double cer(std::string_view a, std::string_view b);

inline double werd(double scenario_wer, double clean_wer) { return scenario_wer - clean_wer; }
double werd(std::span<const EvalRecord> scenario, std::span<const EvalRecord> clean);

// 100 * werd / difficulty; difficulty must be positive.
double nwerd(double werd_value, double difficulty);

// log2(WER_f / WER_m). Missing (nullopt) when either WER is zero or either
// subset has no reference tokens.
std::optional<double> lwerr(double wer_female, double wer_male);
std::optional<double> lwerr(std::span<const EvalRecord> female, std::span<const EvalRecord> male);

}  // namespace srb::metrics
