#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srb/harness/evaluate.hpp"

namespace srb::harness {

enum class GroupBy { Cell, Scenario, Category, Model };

// "cell", "scenario", "category" or "model".
GroupBy parse_group_by(const std::string& name);

struct ReportRow {
  std::string model;
  std::string group;
  std::size_t cells = 0;
  double wer = 0.0;
  std::optional<double> werd;
  std::optional<double> nwerd;
};

/// Unweighted means of per-cell WER, WERD and NWERD per (model, group).
/// Datasets count equally: cells are averaged within each dataset first,
/// then dataset means are averaged. Category grouping follows the order
/// clean, noise_white, noise_env, sfx, audio_proc, spatial, real_world,
/// adversarial.
std::vector<ReportRow> group_results(std::span<const ResultRow> rows, GroupBy by);

std::string render_table(std::span<const ReportRow> rows, GroupBy by);
std::string render_csv(std::span<const ReportRow> rows, GroupBy by);

}  // namespace srb::harness
