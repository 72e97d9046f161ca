#include "srb/metrics/error_rate.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "srb/error.hpp"
#include "srb/metrics/edit_distance.hpp"

namespace srb::metrics {

std::string_view gender_name(Gender g) {
  switch (g) {
    case Gender::Male: return "m";
    case Gender::Female: return "f";
    case Gender::Unknown: return "unknown";
  }
  return "unknown";
}

Gender parse_gender(std::string_view token) {
  if (token == "m") return Gender::Male;
  if (token == "f") return Gender::Female;
  if (token.empty() || token == "unknown") return Gender::Unknown;
  throw ValidationError("unknown gender token '" + std::string(token) + "' (expected m, f or null)");
}

void to_json(nlohmann::json& j, const EvalRecord& r) {
  j = nlohmann::json{{"utterance_id", r.utterance_id},
                     {"model_id", r.model_id},
                     {"dataset", r.dataset},
                     {"scenario", r.scenario},
                     {"severity", r.severity},
                     {"edit_distance", r.edit_distance},
                     {"ref_len", r.ref_len},
                     {"gender", gender_name(r.gender)},
                     {"language", r.language}};
}

void from_json(const nlohmann::json& j, EvalRecord& r) {
  r.utterance_id = j.at("utterance_id").get<std::string>();
  r.model_id = j.value("model_id", "");
  r.dataset = j.value("dataset", "");
  r.scenario = j.value("scenario", "clean");
  r.severity = j.value("severity", 0);
  r.edit_distance = j.at("edit_distance").get<std::int64_t>();
  r.ref_len = j.at("ref_len").get<std::int64_t>();
  if (r.edit_distance < 0 || r.ref_len < 0)
    throw ValidationError("record " + r.utterance_id + " has negative counts");
  const auto& g = j.contains("gender") ? j.at("gender") : nlohmann::json();
  r.gender = g.is_null() ? Gender::Unknown : parse_gender(g.get<std::string>());
  r.language = j.value("language", "");
}

std::vector<EvalRecord> read_records_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::vector<EvalRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<EvalRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_records_jsonl(const std::string& path, std::span<const EvalRecord> records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  for (const auto& r : records) out << nlohmann::json(r).dump() << '\n';
}

PairScore score_pair(std::string_view reference, std::string_view hypothesis, TokenLevel level) {
  Tokens ref = normalize_text(reference, level);
  Tokens hyp = normalize_text(hypothesis, level);
  return {static_cast<std::int64_t>(edit_distance(hyp, ref)), static_cast<std::int64_t>(ref.size())};
}

double corpus_error_rate(std::span<const EvalRecord> records) {
  std::int64_t edits = 0, ref = 0;
  for (const auto& r : records) {
    edits += r.edit_distance;
    ref += r.ref_len;
  }
  if (ref == 0) throw ValidationError("error rate undefined: total reference length is zero");
  return 100.0 * static_cast<double>(edits) / static_cast<double>(ref);
}

double cer(std::string_view a, std::string_view b) {
  Tokens ta = normalize_text(a, TokenLevel::Character);
  Tokens tb = normalize_text(b, TokenLevel::Character);
  std::size_t ed = edit_distance(ta, tb);
  if (tb.empty()) return ed == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return static_cast<double>(ed) / static_cast<double>(tb.size());
}

double werd(std::span<const EvalRecord> scenario, std::span<const EvalRecord> clean) {
  if (scenario.empty() || clean.empty()) throw ValidationError("WERD needs non-empty corpora");
  return werd(corpus_error_rate(scenario), corpus_error_rate(clean));
}

double nwerd(double werd_value, double difficulty) {
  if (!(difficulty > 0.0)) throw ValidationError("NWERD needs a positive difficulty");
  return 100.0 * werd_value / difficulty;
}

std::optional<double> lwerr(double wer_female, double wer_male) {
  if (!(wer_female > 0.0) || !(wer_male > 0.0)) return std::nullopt;
  // Difference of logs keeps lwerr(a, b) == -lwerr(b, a) bit-exact.
  return std::log2(wer_female) - std::log2(wer_male);
}

std::optional<double> lwerr(std::span<const EvalRecord> female, std::span<const EvalRecord> male) {
  auto total_ref = [](std::span<const EvalRecord> rs) {
    std::int64_t n = 0;
    for (const auto& r : rs) n += r.ref_len;
    return n;
  };
  if (total_ref(female) == 0 || total_ref(male) == 0) return std::nullopt;
  return lwerr(corpus_error_rate(female), corpus_error_rate(male));
}

}  // namespace srb::metrics
