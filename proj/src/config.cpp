#include "srb/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "srb/error.hpp"
#include "toml.hpp"

namespace srb {

namespace {

nlohmann::json to_json_value(const toml::node& node) {
  if (auto t = node.as_table()) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [k, v] : *t) obj[std::string(k.str())] = to_json_value(v);
    return obj;
  }
  if (auto a = node.as_array()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : *a) arr.push_back(to_json_value(v));
    return arr;
  }
  if (auto s = node.as_string()) return s->get();
  if (auto i = node.as_integer()) return i->get();
  if (auto f = node.as_floating_point()) return f->get();
  if (auto b = node.as_boolean()) return b->get();
  std::ostringstream ss;
  node.visit([&](const auto& leaf) { ss << leaf; });
  return ss.str();
}

}  // namespace

nlohmann::json load_config_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  if (std::filesystem::path(path).extension() == ".toml") {
    try {
      return to_json_value(toml::parse(text.str(), path));
    } catch (const toml::parse_error& e) {
      std::ostringstream msg;
      msg << path << ":" << e.source().begin.line << ": " << e.description();
      throw ValidationError(msg.str());
    }
  }
  try {
    return nlohmann::json::parse(text.str());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace srb
