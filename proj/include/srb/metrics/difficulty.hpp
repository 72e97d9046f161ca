#pragma once

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace srb::metrics {

struct DifficultyKey {
  std::string scenario;
  int severity = 1;

  friend auto operator<=>(const DifficultyKey&, const DifficultyKey&) = default;
};

// Per-cell quality degradation before normalization. Both entries are
// negated MOS values, so larger means harder.
struct RawDifficulty {
  std::optional<double> dnsmos;
  std::optional<double> pesq;
};

struct DifficultyCell {
  std::optional<double> dnsmos;
  std::optional<double> pesq;
  double avg = 0.0;
};

// z -> 50 + 25 (z - mean) / sd with the population sd. Throws when fewer
// than two values are given or all values are equal.
std::vector<double> normalize_scores(std::span<const double> raw);

// Normalizes each metric independently over the cells that have it; the
// per-cell avg is the mean of whichever normalized metrics exist.
std::map<DifficultyKey, DifficultyCell> normalize_difficulty(
    const std::map<DifficultyKey, RawDifficulty>& raw);

// One quality measurement of one perturbed recording (raw MOS, not negated).
struct MosObservation {
  DifficultyKey cell;
  std::optional<double> dnsmos;
  std::optional<double> pesq;
};

// Mean MOS per cell, negated, ready for normalize_difficulty.
std::map<DifficultyKey, RawDifficulty> aggregate_mos(std::span<const MosObservation> observations);

// Reads CSV rows scenario,severity,dnsmos,pesq (header required, empty
// fields allowed).
std::vector<MosObservation> read_mos_csv(const std::string& path);

/// Normalized difficulty per (scenario, severity) cell.
///
/// Scenario names are canonical perturbation kind names ("gaussian_noise",
/// "env_noise", ...) or named real-world scenarios ("accent", "itw_nf").
class DifficultyTable {
 public:
  DifficultyTable() = default;
  explicit DifficultyTable(std::map<DifficultyKey, DifficultyCell> cells) : cells_(std::move(cells)) {}

  // Built-in per-cell difficulty.
  static const DifficultyTable& shipped();

  // CSV with header scenario,severity,avg,dnsmos,pesq. An empty avg is
  // filled from the metric columns.
  static DifficultyTable parse_csv(const std::string& text, const std::string& origin = "<string>");
  static DifficultyTable load(const std::string& path);

  std::optional<double> avg(const std::string& scenario, int severity) const;
  const DifficultyCell* find(const std::string& scenario, int severity) const;
  const std::map<DifficultyKey, DifficultyCell>& cells() const { return cells_; }

  std::string to_csv() const;

 private:
  std::map<DifficultyKey, DifficultyCell> cells_;
};

}  // namespace srb::metrics
