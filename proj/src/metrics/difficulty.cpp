#include "srb/metrics/difficulty.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "srb/error.hpp"
#include "srb/format.hpp"

namespace srb::metrics {

namespace {

// Built-in per-cell difficulty; blank fields are cells without a score.
constexpr const char* kShippedTable = R"(scenario,severity,avg,dnsmos,pesq
accent,1,31.6,31.6,
bass,1,18.3,22.5,11.6
bass,2,23.0,27.4,14.5
bass,3,35.0,38.0,30.5
bass,4,55.2,56.7,54.6
chorus,1,39.1,29.8,63.7
chorus,2,48.2,39.7,71.1
chorus,3,54.4,47.1,74.2
chorus,4,55.9,48.2,75.7
crosstalk,1,22.3,23.3,22.4
crosstalk,2,38.2,31.6,46.2
crosstalk,3,52.3,36.7,70.0
crosstalk,4,59.1,39.4,81.4
echo,1,54.1,39.0,71.2
echo,2,53.4,36.3,72.6
echo,3,52.8,36.0,71.7
echo,4,50.6,34.9,67.9
env_noise,1,50.5,51.8,39.7
env_noise,2,61.5,59.2,58.7
env_noise,3,76.0,72.7,76.6
env_noise,4,88.5,91.4,84.1
env_noise_esc50,1,26.1,37.7,20.3
env_noise_esc50,2,40.9,43.7,43.2
env_noise_esc50,3,57.5,53.3,65.9
env_noise_esc50,4,72.8,71.3,79.7
env_noise_musan,1,24.3,24.8,25.0
env_noise_musan,2,42.3,37.2,48.7
env_noise_musan,3,62.1,55.3,70.3
env_noise_musan,4,75.4,71.2,80.9
env_noise_wham,1,22.4,22.3,23.3
env_noise_wham,2,45.4,39.7,52.0
env_noise_wham,3,73.2,70.5,76.5
env_noise_wham,4,92.2,99.5,85.2
gain,1,50.0,45.1,61.3
gain,2,68.9,65.9,75.9
gain,3,76.6,76.4,79.8
gain,4,80.7,82.6,81.6
gaussian_noise,1,52.4,70.3,42.2
gaussian_noise,2,75.6,87.5,69.1
gaussian_noise,3,90.5,101.6,82.8
gaussian_noise,4,100.9,117.3,86.1
highpass,1,40.2,34.3,46.2
highpass,2,55.4,43.4,68.3
highpass,3,67.5,64.9,71.5
highpass,4,77.5,81.0,74.8
itw_ff,1,100.1,100.1,
itw_ff_ami,1,83.9,83.9,
itw_nf,1,78.1,78.1,
itw_nf_ami,1,35.8,35.8,
lowpass,1,33.1,47.3,20.5
lowpass,2,37.1,46.7,29.3
lowpass,3,50.8,62.5,40.5
lowpass,4,78.0,97.9,58.4
music,1,22.3,25.5,20.2
music,2,43.1,41.4,45.4
music,3,65.8,62.2,70.0
music,4,78.9,76.7,81.7
phaser,1,15.0,21.4,10.9
phaser,2,32.3,34.7,32.0
phaser,3,59.8,58.1,63.5
phaser,4,79.5,76.7,83.4
pitch_down,1,60.9,38.0,85.7
pitch_down,2,67.3,49.2,86.3
pitch_down,3,53.4,65.5,55.5
pitch_down,4,83.3,80.8,86.6
pitch_up,1,58.0,32.2,85.7
pitch_up,2,61.2,38.1,86.2
pitch_up,3,64.3,44.1,86.3
pitch_up,4,65.1,45.9,86.3
real_rir,1,38.7,34.2,43.2
real_rir,2,53.8,44.8,62.7
real_rir,3,68.9,59.9,77.9
real_rir,4,84.2,87.1,81.3
resample,1,14.4,23.8,7.0
resample,2,27.3,42.1,18.3
resample,3,49.0,61.5,38.2
resample,4,63.3,75.5,52.5
rir,1,50.3,40.4,64.9
rir,2,63.1,56.3,74.5
rir,3,68.3,64.3,78.0
rir,4,68.0,64.7,78.0
slow_down,1,50.7,17.6,85.7
slow_down,2,57.0,29.7,85.9
slow_down,3,64.3,43.6,85.8
slow_down,4,72.7,66.7,86.2
speed_up,1,51.5,21.7,83.6
speed_up,2,58.7,36.1,83.4
speed_up,3,66.3,50.9,83.1
speed_up,4,72.9,63.7,82.8
tempo_down,1,48.7,18.4,81.3
tempo_down,2,51.8,21.6,84.5
tempo_down,3,54.5,26.7,85.1
tempo_down,4,50.1,35.1,85.5
tempo_up,1,50.2,24.3,78.9
tempo_up,2,57.1,34.6,82.1
tempo_up,3,63.2,46.1,82.3
tempo_up,4,69.7,58.3,82.3
treble,1,11.6,19.4,2.4
treble,2,21.6,29.7,12.4
treble,3,40.5,43.2,42.3
treble,4,62.4,60.6,72.4
tremolo,1,16.8,23.1,9.9
tremolo,2,29.0,37.2,17.8
tremolo,3,59.0,72.1,37.1
tremolo,4,98.7,111.4,75.5
universal_adv,1,10.3,11.7,8.8
synth_speech,1,49.6,15.7,83.4
)";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    std::string field = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(std::move(field));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(const std::string& field, const std::string& where) {
  if (field.empty() || field == "-") return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value))
    throw ValidationError(where + ": not a number: '" + field + "'");
  return value;
}

int parse_severity(const std::string& field, const std::string& where) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || value < 1 || value > 4)
    throw ValidationError(where + ": severity must be 1-4, got '" + field + "'");
  return value;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Yields (line number, fields) for each non-blank, non-comment line after
// the header, which must start with `expected`.
template <typename Fn>
void for_each_csv_row(const std::string& text, const std::string& origin,
                      const std::vector<std::string>& expected, Fn&& fn) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    auto fields = split_fields(line);
    std::string where = origin + ":" + std::to_string(lineno);
    if (!header) {
      if (fields.size() < expected.size() ||
          !std::equal(expected.begin(), expected.end(), fields.begin()))
        throw ValidationError(where + ": expected header starting with " + expected.front());
      header = true;
      continue;
    }
    if (fields.size() != expected.size())
      throw ValidationError(where + ": expected " + std::to_string(expected.size()) + " fields");
    fn(where, fields);
  }
  if (!header) throw ValidationError(origin + ": missing header");
}

}  // namespace

std::vector<double> normalize_scores(std::span<const double> raw) {
  if (raw.size() < 2) throw ValidationError("normalization needs at least two values");
  double mean = 0.0;
  for (double v : raw) mean += v;
  mean /= static_cast<double>(raw.size());
  double var = 0.0;
  for (double v : raw) var += (v - mean) * (v - mean);
  var /= static_cast<double>(raw.size());
  double sd = std::sqrt(var);
  if (!(sd > 0.0)) throw ValidationError("normalization undefined: all values are equal");
  std::vector<double> out;
  out.reserve(raw.size());
  for (double v : raw) out.push_back(50.0 + 25.0 * (v - mean) / sd);
  return out;
}

std::map<DifficultyKey, DifficultyCell> normalize_difficulty(
    const std::map<DifficultyKey, RawDifficulty>& raw) {
  std::map<DifficultyKey, DifficultyCell> out;
  for (const auto& [key, _] : raw) out[key];

  auto normalize_metric = [&](std::optional<double> RawDifficulty::*src,
                              std::optional<double> DifficultyCell::*dst) {
    std::vector<const DifficultyKey*> keys;
    std::vector<double> values;
    for (const auto& [key, cell] : raw) {
      if (!(cell.*src)) continue;
      keys.push_back(&key);
      values.push_back(*(cell.*src));
    }
    if (values.empty()) return;
    auto z = normalize_scores(values);
    for (std::size_t i = 0; i < keys.size(); ++i) out[*keys[i]].*dst = z[i];
  };
  normalize_metric(&RawDifficulty::dnsmos, &DifficultyCell::dnsmos);
  normalize_metric(&RawDifficulty::pesq, &DifficultyCell::pesq);

  for (auto& [key, cell] : out) {
    if (cell.dnsmos && cell.pesq)
      cell.avg = 0.5 * (*cell.dnsmos + *cell.pesq);
    else if (cell.dnsmos || cell.pesq)
      cell.avg = cell.dnsmos ? *cell.dnsmos : *cell.pesq;
    else
      throw ValidationError("cell " + key.scenario + "/" + std::to_string(key.severity) +
                            " has no scores");
  }
  return out;
}

std::map<DifficultyKey, RawDifficulty> aggregate_mos(std::span<const MosObservation> observations) {
  struct Acc {
    double dnsmos = 0, pesq = 0;
    int n_dnsmos = 0, n_pesq = 0;
  };
  std::map<DifficultyKey, Acc> acc;
  for (const auto& o : observations) {
    Acc& a = acc[o.cell];
    if (o.dnsmos) a.dnsmos += *o.dnsmos, ++a.n_dnsmos;
    if (o.pesq) a.pesq += *o.pesq, ++a.n_pesq;
  }
  std::map<DifficultyKey, RawDifficulty> out;
  for (const auto& [key, a] : acc) {
    RawDifficulty r;
    if (a.n_dnsmos) r.dnsmos = -a.dnsmos / a.n_dnsmos;
    if (a.n_pesq) r.pesq = -a.pesq / a.n_pesq;
    out[key] = r;
  }
  return out;
}

std::vector<MosObservation> read_mos_csv(const std::string& path) {
  std::vector<MosObservation> out;
  for_each_csv_row(read_text(path), path, {"scenario", "severity", "dnsmos", "pesq"},
                   [&](const std::string& where, const std::vector<std::string>& f) {
                     out.push_back({{f[0], parse_severity(f[1], where)},
                                    parse_number(f[2], where),
                                    parse_number(f[3], where)});
                   });
  return out;
}

const DifficultyTable& DifficultyTable::shipped() {
  static const DifficultyTable table = parse_csv(kShippedTable, "<shipped>");
  return table;
}

DifficultyTable DifficultyTable::parse_csv(const std::string& text, const std::string& origin) {
  std::map<DifficultyKey, DifficultyCell> cells;
  for_each_csv_row(text, origin, {"scenario", "severity", "avg", "dnsmos", "pesq"},
                   [&](const std::string& where, const std::vector<std::string>& f) {
                     DifficultyKey key{f[0], parse_severity(f[1], where)};
                     DifficultyCell cell;
                     cell.dnsmos = parse_number(f[3], where);
                     cell.pesq = parse_number(f[4], where);
                     auto avg = parse_number(f[2], where);
                     if (avg) {
                       cell.avg = *avg;
                     } else if (cell.dnsmos && cell.pesq) {
                       cell.avg = 0.5 * (*cell.dnsmos + *cell.pesq);
                     } else if (cell.dnsmos || cell.pesq) {
                       cell.avg = cell.dnsmos ? *cell.dnsmos : *cell.pesq;
                     } else {
                       throw ValidationError(where + ": row has no difficulty values");
                     }
                     if (!cells.emplace(key, cell).second)
                       throw ValidationError(where + ": duplicate cell " + key.scenario);
                   });
  return DifficultyTable(std::move(cells));
}

DifficultyTable DifficultyTable::load(const std::string& path) {
  return parse_csv(read_text(path), path);
}

const DifficultyCell* DifficultyTable::find(const std::string& scenario, int severity) const {
  auto it = cells_.find(DifficultyKey{scenario, severity});
  return it == cells_.end() ? nullptr : &it->second;
}

std::optional<double> DifficultyTable::avg(const std::string& scenario, int severity) const {
  const DifficultyCell* cell = find(scenario, severity);
  if (!cell) return std::nullopt;
  return cell->avg;
}

std::string DifficultyTable::to_csv() const {
  std::string out = "scenario,severity,avg,dnsmos,pesq\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& [key, cell] : cells_) {
    out += key.scenario + "," + std::to_string(key.severity) + "," + format_number(cell.avg) + "," +
           opt(cell.dnsmos) + "," + opt(cell.pesq) + "\n";
  }
  return out;
}

}  // namespace srb::metrics
