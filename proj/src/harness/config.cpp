#include "srb/harness/config.hpp"

#include <filesystem>

#include "srb/error.hpp"
#include "srb/perturb/kinds.hpp"

namespace srb::harness {

namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = fs::path(base) / path;
  return path.lexically_normal().string();
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* what) {
  if (j.is_string()) return {j.get<std::string>()};
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be a string or an array of strings");
  return j.get<std::vector<std::string>>();
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw ValidationError("run config must be an object");
  RunConfig cfg;
  try {
    if (doc.contains("manifests"))
      for (const auto& m : string_list(doc["manifests"], "manifests")) cfg.manifests.push_back(resolve(base_dir, m));
    if (doc.contains("manifest")) cfg.manifests.push_back(resolve(base_dir, doc["manifest"].get<std::string>()));
    if (doc.contains("seed")) cfg.run_seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("output_dir")) cfg.output_dir = resolve(base_dir, doc["output_dir"].get<std::string>());
    if (doc.contains("difficulty_table"))
      cfg.difficulty_table = resolve(base_dir, doc["difficulty_table"].get<std::string>());
    if (doc.contains("severity_table"))
      cfg.severity_table = resolve(base_dir, doc["severity_table"].get<std::string>());
    if (doc.contains("rir_bank")) cfg.rir_bank = resolve(base_dir, doc["rir_bank"].get<std::string>());
    if (doc.contains("workers")) cfg.workers = doc["workers"].get<unsigned>();
    if (doc.contains("float_wav")) cfg.float_wav = doc["float_wav"].get<bool>();
    if (doc.contains("token_level")) {
      auto level = doc["token_level"].get<std::string>();
      if (level == "word")
        cfg.token_level = metrics::TokenLevel::Word;
      else if (level == "character" || level == "char")
        cfg.token_level = metrics::TokenLevel::Character;
      else
        throw ValidationError("token_level must be 'word' or 'character'");
    }
    if (doc.contains("noise_banks")) {
      for (const auto& [kind, dir] : doc["noise_banks"].items()) {
        auto k = perturb::parse_kind(kind);
        cfg.noise_banks[std::string(perturb::kind_name(k))] = resolve(base_dir, dir.get<std::string>());
      }
    }
    for (const auto& s : doc.value("scenarios", nlohmann::json::array())) {
      ScenarioConfig sc;
      if (s.contains("kind")) {
        sc.name = std::string(perturb::kind_name(perturb::parse_kind(s["kind"].get<std::string>())));
        sc.severities = s.value("severities", std::vector<int>{1, 2, 3, 4});
        if (s.contains("severity")) sc.severities = {s["severity"].get<int>()};
        for (int sev : sc.severities)
          if (sev < 1 || sev > 4) throw ValidationError("scenario " + sc.name + ": severity must be 1-4");
      } else if (s.contains("name") && s.contains("manifest")) {
        sc.name = s["name"].get<std::string>();
        sc.manifest = resolve(base_dir, s["manifest"].get<std::string>());
        sc.severity = s.value("severity", 1);
        sc.adversarial = s.value("adversarial", false);
        sc.baseline_dataset = s.value("baseline_dataset", "");
        if (sc.name == "clean") throw ValidationError("'clean' is reserved for the baseline");
      } else {
        throw ValidationError("each scenario needs either 'kind' or both 'name' and 'manifest'");
      }
      cfg.scenarios.push_back(std::move(sc));
    }
    for (const auto& m : doc.value("models", nlohmann::json::array())) {
      ModelAdapter a;
      a.id = m.at("id").get<std::string>();
      a.command = string_list(m.at("command"), "model command");
      a.timeout_seconds = m.value("timeout", 60.0);
      a.max_in_flight = m.value("max_in_flight", std::size_t{16});
      if (a.command.empty()) throw ValidationError("model " + a.id + ": empty command");
      cfg.models.push_back(std::move(a));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("run config: ") + e.what());
  }
  if (cfg.manifests.empty()) throw ValidationError("run config lists no manifests");
  if (cfg.scenarios.empty()) throw ValidationError("run config lists no scenarios");
  if (cfg.models.empty()) throw ValidationError("run config lists no models");
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(load_config_document(path), fs::path(path).parent_path().string());
}

}  // namespace srb::harness
