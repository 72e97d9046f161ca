#include "srb/harness/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "srb/error.hpp"
#include "srb/format.hpp"

namespace srb::harness {

namespace {

int category_rank(const std::string& c) {
  static const char* order[] = {"clean", "noise_white", "noise_env", "sfx",
                                "audio_proc", "spatial", "real_world", "adversarial"};
  for (int i = 0; i < 8; ++i)
    if (c == order[i]) return i;
  return 8;
}

std::string group_name(const ResultRow& r, GroupBy by) {
  switch (by) {
    case GroupBy::Cell: return r.scenario + "/" + std::to_string(r.severity);
    case GroupBy::Scenario: return r.scenario;
    case GroupBy::Category: return r.category;
    case GroupBy::Model: return "all";
  }
  return r.scenario;
}

std::string by_label(GroupBy by) {
  switch (by) {
    case GroupBy::Cell: return "cell";
    case GroupBy::Scenario: return "scenario";
    case GroupBy::Category: return "category";
    case GroupBy::Model: return "group";
  }
  return "group";
}

struct Mean {
  double sum = 0;
  int n = 0;
  void add(double v) { sum += v, ++n; }
  std::optional<double> get() const { return n ? std::optional<double>(sum / n) : std::nullopt; }
};

std::string fixed(const std::optional<double>& v, int prec = 2) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", prec, *v);
  return buf;
}

}  // namespace

GroupBy parse_group_by(const std::string& name) {
  if (name == "cell") return GroupBy::Cell;
  if (name == "scenario") return GroupBy::Scenario;
  if (name == "category") return GroupBy::Category;
  if (name == "model") return GroupBy::Model;
  throw ValidationError("unknown grouping '" + name + "' (expected cell, scenario, category or model)");
}

std::vector<ReportRow> group_results(std::span<const ResultRow> rows, GroupBy by) {
  struct PerDataset {
    Mean wer, werd, nwerd;
    std::size_t cells = 0;
  };
  std::map<std::pair<std::string, std::string>, std::map<std::string, PerDataset>> acc;
  for (const auto& r : rows) {
    auto& d = acc[{r.model, group_name(r, by)}][r.dataset];
    d.wer.add(r.wer);
    if (r.werd) d.werd.add(*r.werd);
    if (r.nwerd) d.nwerd.add(*r.nwerd);
    ++d.cells;
  }
  std::vector<ReportRow> out;
  for (const auto& [key, datasets] : acc) {
    Mean wer, werd, nwerd;
    ReportRow row;
    row.model = key.first;
    row.group = key.second;
    for (const auto& [_, d] : datasets) {
      wer.add(*d.wer.get());
      if (auto v = d.werd.get()) werd.add(*v);
      if (auto v = d.nwerd.get()) nwerd.add(*v);
      row.cells += d.cells;
    }
    row.wer = *wer.get();
    row.werd = werd.get();
    row.nwerd = nwerd.get();
    out.push_back(std::move(row));
  }
  if (by == GroupBy::Category) {
    std::stable_sort(out.begin(), out.end(), [](const ReportRow& a, const ReportRow& b) {
      return std::make_pair(a.model, category_rank(a.group)) < std::make_pair(b.model, category_rank(b.group));
    });
  }
  return out;
}

std::string render_table(std::span<const ReportRow> rows, GroupBy by) {
  std::size_t wm = 5, wg = by_label(by).size();
  for (const auto& r : rows) {
    wm = std::max(wm, r.model.size());
    wg = std::max(wg, r.group.size());
  }
  std::string out;
  char line[512];
  std::snprintf(line, sizeof line, "%-*s  %-*s  %5s  %8s  %8s  %8s\n", static_cast<int>(wm), "model",
                static_cast<int>(wg), by_label(by).c_str(), "cells", "WER", "WERD", "NWERD");
  out += line;
  out += std::string(wm + wg + 45, '-') + "\n";
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-*s  %-*s  %5zu  %8s  %8s  %8s\n", static_cast<int>(wm), r.model.c_str(),
                  static_cast<int>(wg), r.group.c_str(), r.cells, fixed(r.wer).c_str(), fixed(r.werd).c_str(),
                  fixed(r.nwerd).c_str());
    out += line;
  }
  return out;
}

std::string render_csv(std::span<const ReportRow> rows, GroupBy by) {
  std::string out = "model," + by_label(by) + ",cells,wer,werd,nwerd\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& r : rows)
    out += r.model + "," + r.group + "," + std::to_string(r.cells) + "," + format_number(r.wer) + "," +
           opt(r.werd) + "," + opt(r.nwerd) + "\n";
  return out;
}

}  // namespace srb::harness
