#include "srb/perturb/banks.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "json.hpp"
#include "srb/audio/dsp.hpp"
#include "srb/audio/wav.hpp"
#include "srb/error.hpp"

namespace srb::perturb {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> wav_files(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("bank directory not found: " + dir);
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".wav") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

NoiseBank load_noise_bank(const std::string& dir, int target_rate) {
  NoiseBank bank;
  for (const auto& path : wav_files(dir)) {
    auto clip = audio::resample(audio::read_wav(path.string()), target_rate);
    bank.clips.push_back({std::move(clip), fs::relative(path, dir).string()});
  }
  if (bank.clips.empty()) throw ValidationError("noise bank " + dir + " contains no WAV files");
  return bank;
}

std::vector<ImpulseResponse> load_rir_bank(const std::string& dir, int target_rate) {
  std::map<std::string, nlohmann::json> meta;
  fs::path sidecar = fs::path(dir) / "metadata.jsonl";
  if (fs::exists(sidecar)) {
    std::ifstream in(sidecar);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError(sidecar.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
      if (!j.contains("file") || !j["file"].is_string())
        throw ValidationError(sidecar.string() + ":" + std::to_string(lineno) + ": missing 'file'");
      meta[j["file"].get<std::string>()] = j;
    }
  }

  std::vector<ImpulseResponse> bank;
  for (const auto& path : wav_files(dir)) {
    ImpulseResponse ir;
    std::string rel = fs::relative(path, dir).string();
    ir.audio = audio::resample(audio::read_wav(path.string()), target_rate);
    ir.source_tag = rel;
    if (auto it = meta.find(rel); it != meta.end()) {
      const auto& j = it->second;
      if (j.contains("rt60") && !j["rt60"].is_null()) ir.rt60_seconds = j["rt60"].get<double>();
      if (j.contains("srmr") && !j["srmr"].is_null()) ir.srmr = j["srmr"].get<double>();
      if (j.contains("room") && j["room"].is_object()) {
        const auto& r = j["room"];
        ir.room = audio::RoomMeta{r.at("volume_m3").get<double>(), r.at("surface_m2").get<double>(),
                                  r.at("absorption").get<double>()};
      }
    }
    bank.push_back(std::move(ir));
  }
  if (bank.empty()) throw ValidationError("RIR bank " + dir + " contains no WAV files");
  return bank;
}

double sabine_rt60(const audio::RoomMeta& room) {
  double sa = room.surface_m2 * room.absorption;
  if (room.volume_m3 <= 0.0 || sa <= 0.0)
    throw ValidationError("room metadata needs positive volume, surface and absorption");
  return 0.161 * room.volume_m3 / sa;
}

double estimate_rt60(const ImpulseResponse& ir) {
  if (ir.room) return sabine_rt60(*ir.room);

  const auto& h = ir.audio.samples();
  const double rate = ir.audio.sample_rate();
  if (h.size() < static_cast<audio::Index>(0.1 * rate))
    throw ValidationError("impulse response shorter than 0.1 s; cannot fit a decay curve");

  // Schroeder backward integration.
  const audio::Index n = h.size();
  std::vector<double> edc(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (audio::Index i = n - 1; i >= 0; --i) {
    acc += h[i] * h[i];
    edc[static_cast<std::size_t>(i)] = acc;
  }
  if (acc <= 0.0) throw ValidationError("impulse response has zero energy");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  bool reached_floor = false;
  for (std::size_t i = 0; i < edc.size(); ++i) {
    double db = 10.0 * std::log10(edc[i] / acc);
    if (db < -35.0) {
      reached_floor = true;
      break;
    }
    if (db <= -5.0) {
      double t = static_cast<double>(i) / rate;
      sx += t;
      sy += db;
      sxx += t * t;
      sxy += t * db;
      ++count;
    }
  }
  if (!reached_floor || count < 2)
    throw ValidationError("decay curve does not span -5 to -35 dB; cannot estimate RT60");
  double denom = count * sxx - sx * sx;
  double slope = (count * sxy - sx * sy) / denom;  // dB per second
  if (!(slope < 0.0)) throw ValidationError("non-decaying energy curve");
  return -60.0 / slope;
}

int nearest_severity(const std::array<double, kSeverityLevels>& anchors, double value) {
  int best = 1;
  double best_dist = std::abs(value - anchors[0]);
  for (int s = 2; s <= kSeverityLevels; ++s) {
    double d = std::abs(value - anchors[s - 1]);
    if (d < best_dist) {
      best = s;
      best_dist = d;
    }
  }
  return best;
}

std::vector<LabeledRir> assign_rir_severity(const std::vector<ImpulseResponse>& bank,
                                            const SeverityTable& table) {
  std::vector<LabeledRir> out;
  out.reserve(bank.size());
  for (const auto& ir : bank) {
    LabeledRir labeled{ir, RirFamily::Simulated, 1};
    if (ir.rt60_seconds || ir.room) {
      double rt60 = ir.rt60_seconds ? *ir.rt60_seconds : sabine_rt60(*ir.room);
      labeled.ir.rt60_seconds = rt60;
      labeled.severity = nearest_severity(table.row(PerturbationKind::Rir), rt60);
    } else if (ir.srmr) {
      labeled.family = RirFamily::Real;
      labeled.severity = nearest_severity(table.row(PerturbationKind::RealRir), *ir.srmr);
    } else {
      throw ValidationError("impulse response '" + ir.source_tag +
                            "' has neither rt60/room metadata nor srmr");
    }
    out.push_back(std::move(labeled));
  }
  return out;
}

}  // namespace srb::perturb
