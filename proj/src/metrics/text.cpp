#include "srb/metrics/text.hpp"

#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

namespace srb::metrics {

namespace {

void append_utf8(std::string& out, UChar32 cp) {
  icu::UnicodeString one(cp);
  one.toUTF8String(out);
}

}  // namespace

std::string normalize_string(std::string_view raw) {
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  text.toLower(icu::Locale::getRoot());

  std::string out;
  bool pending_space = false;
  for (int32_t i = 0; i < text.length(); i = text.moveIndex32(i, 1)) {
    UChar32 cp = text.char32At(i);
    if (u_ispunct(cp)) continue;
    if (u_isUWhiteSpace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    append_utf8(out, cp);
  }
  return out;
}

Tokens normalize_text(std::string_view raw, TokenLevel level) {
  std::string clean = normalize_string(raw);
  Tokens tokens;
  if (level == TokenLevel::Word) {
    std::size_t start = 0;
    while (start < clean.size()) {
      std::size_t end = clean.find(' ', start);
      if (end == std::string::npos) end = clean.size();
      if (end > start) tokens.emplace_back(clean.substr(start, end - start));
      start = end + 1;
    }
    return tokens;
  }
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(clean);
  for (int32_t i = 0; i < text.length(); i = text.moveIndex32(i, 1)) {
    UChar32 cp = text.char32At(i);
    if (cp == ' ') continue;
    std::string ch;
    append_utf8(ch, cp);
    tokens.push_back(std::move(ch));
  }
  return tokens;
}

}  // namespace srb::metrics
