#pragma once

#include <string>

#include "json.hpp"

namespace srb {

// Parses a TOML (.toml) or JSON (anything else) file into a JSON document.
// TOML dates and times become strings.
nlohmann::json load_config_document(const std::string& path);

}  // namespace srb
