#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace srb::metrics {

// Unit-cost Levenshtein distance between two sequences of comparable
// tokens (strings, chars, token vectors). O(|a||b|) time, O(|b|) memory.
template <typename SeqA, typename SeqB>
std::size_t edit_distance(const SeqA& a, const SeqB& b) {
  const std::size_t n = std::size(b);
  std::vector<std::size_t> prev(n + 1), cur(n + 1);
  for (std::size_t j = 0; j <= n; ++j) prev[j] = j;
  std::size_t i = 0;
  for (const auto& ta : a) {
    ++i;
    cur[0] = i;
    std::size_t j = 0;
    for (const auto& tb : b) {
      ++j;
      std::size_t sub = prev[j - 1] + (ta == tb ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

}  // namespace srb::metrics
