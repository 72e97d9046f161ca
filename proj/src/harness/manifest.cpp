#include "srb/harness/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "srb/error.hpp"

namespace srb::harness {

namespace fs = std::filesystem;

namespace {

std::string optional_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  return j.at(key).get<std::string>();
}

}  // namespace

void check_unique_ids(const Manifest& manifest) {
  std::unordered_set<std::string> seen;
  for (const auto& u : manifest.entries)
    if (!seen.insert(u.id).second) throw ValidationError("duplicate utterance id '" + u.id + "'");
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest " + path);
  const fs::path base = fs::path(path).parent_path();
  Manifest m;
  std::unordered_set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    Utterance u;
    try {
      auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
      u.id = j.at("id").get<std::string>();
      u.audio_path = j.at("audio_path").get<std::string>();
      u.text = optional_string(j, "text");
      u.speaker_id = optional_string(j, "speaker_id");
      u.gender = metrics::parse_gender(optional_string(j, "gender"));
      u.language = optional_string(j, "language");
      u.dataset = optional_string(j, "dataset");
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    if (u.id.empty()) throw ValidationError(where + ": empty id");
    if (!seen.insert(u.id).second) throw ValidationError(where + ": duplicate utterance id '" + u.id + "'");
    fs::path audio(u.audio_path);
    if (audio.is_relative()) u.audio_path = (base / audio).lexically_normal().string();
    m.entries.push_back(std::move(u));
  }
  return m;
}

void write_manifest(const std::string& path, const Manifest& manifest) {
  const fs::path base = fs::path(path).parent_path();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write manifest " + path);
  for (const auto& u : manifest.entries) {
    std::string audio = u.audio_path;
    if (!base.empty()) {
      fs::path rel = fs::path(u.audio_path).lexically_relative(base);
      if (!rel.empty() && *rel.begin() != "..") audio = rel.string();
    }
    nlohmann::json j = {{"id", u.id},
                        {"audio_path", audio},
                        {"text", u.text},
                        {"speaker_id", u.speaker_id},
                        {"language", u.language},
                        {"dataset", u.dataset}};
    j["gender"] = u.gender == metrics::Gender::Unknown ? nlohmann::json()
                                                        : nlohmann::json(metrics::gender_name(u.gender));
    out << j.dump() << '\n';
  }
}

std::string dataset_of(const Utterance& u, const std::string& fallback) {
  return u.dataset.empty() ? fallback : u.dataset;
}

}  // namespace srb::harness
