#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace srb::metrics {

enum class TokenLevel { Word, Character };

using Tokens = std::vector<std::string>;

// Lowercase, drop Unicode punctuation (general category P*), collapse
// whitespace. Input is UTF-8; invalid sequences become U+FFFD.
std::string normalize_string(std::string_view raw);

// normalize_string, then split into words, or into code points with spaces
// removed at character level.
Tokens normalize_text(std::string_view raw, TokenLevel level = TokenLevel::Word);

}  // namespace srb::metrics
