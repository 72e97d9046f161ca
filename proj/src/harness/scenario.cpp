#include "srb/harness/scenario.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "srb/audio/dsp.hpp"
#include "srb/audio/wav.hpp"
#include "srb/error.hpp"
#include "srb/hash.hpp"
#include "srb/log.hpp"
#include "srb/parallel.hpp"

namespace srb::harness {

namespace fs = std::filesystem;
using perturb::PerturbationKind;

const perturb::NoiseBank* ScenarioBanks::noise_for(PerturbationKind kind) const {
  auto it = noise.find(kind);
  return it == noise.end() ? nullptr : &it->second;
}

ScenarioBanks load_banks(const std::map<std::string, std::string>& noise_dirs, const std::string& rir_dir,
                         const perturb::SeverityTable& table, int sample_rate) {
  ScenarioBanks banks;
  for (const auto& [name, dir] : noise_dirs) {
    auto kind = perturb::parse_kind(name);
    if (!perturb::needs_noise_bank(kind))
      throw ValidationError("noise bank given for '" + name + "', which does not use one");
    banks.noise[kind] = perturb::load_noise_bank(dir, sample_rate);
  }
  if (!rir_dir.empty())
    banks.rirs = perturb::assign_rir_severity(perturb::load_rir_bank(rir_dir, sample_rate), table);
  return banks;
}

std::string file_stem_for(const std::string& id) {
  std::string out;
  bool changed = false;
  for (char c : id) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
    changed |= !ok;
  }
  if (out.empty() || out[0] == '.') {
    out.insert(out.begin(), '_');
    changed = true;
  }
  if (changed) out += "-" + to_hex(fnv1a64(id)).substr(0, 8);
  return out;
}

namespace {

bool same_content(const fs::path& path, const std::vector<unsigned char>& bytes) {
  std::error_code ec;
  if (!fs::exists(path, ec) || fs::file_size(path, ec) != bytes.size()) return false;
  return hash_file(path.string()) == fnv1a64(std::span<const unsigned char>(bytes));
}

void write_bytes(const fs::path& path, const std::vector<unsigned char>& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

MaterializeResult materialize_scenario(const Manifest& manifest, const perturb::PerturbationSpec& spec,
                                       const std::string& out_dir, const ScenarioBanks& banks,
                                       const MaterializeOptions& opts) {
  const std::string kind = std::string(perturb::kind_name(spec.kind));
  const fs::path dir = fs::path(out_dir) / kind / std::to_string(spec.severity);
  fs::create_directories(dir);

  const perturb::NoiseBank* noise = banks.noise_for(spec.kind);
  const std::vector<perturb::LabeledRir>* rirs = banks.rirs.empty() ? nullptr : &banks.rirs;
  const auto encoding = opts.float_wav ? audio::WavEncoding::Float32 : audio::WavEncoding::Pcm16;

  const std::size_t n = manifest.entries.size();
  std::vector<std::optional<Utterance>> done(n);
  std::vector<std::optional<std::string>> errors(n);
  std::vector<char> rewritten(n, 0);

  parallel_for(n, opts.workers, [&](std::size_t i) {
    const Utterance& u = manifest.entries[i];
    try {
      auto clean = audio::resample(audio::read_wav(u.audio_path), opts.sample_rate);
      perturb::PerturbationSpec local = spec;
      local.seed = derive_seed(spec.seed, u.id, kind, spec.severity);
      auto bytes = audio::encode_wav(perturb::apply_perturbation(local, clean, noise, rirs), encoding);
      const fs::path target = dir / (file_stem_for(u.id) + ".wav");
      if (!same_content(target, bytes)) {
        write_bytes(target, bytes);
        rewritten[i] = 1;
      }
      Utterance out = u;
      out.audio_path = target.string();
      done[i] = std::move(out);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  MaterializeResult res;
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) {
      res.manifest.entries.push_back(*done[i]);
      (rewritten[i] ? res.written : res.unchanged)++;
    } else {
      res.failures.push_back({manifest.entries[i].id, *errors[i]});
      log_warning(kind + "/" + std::to_string(spec.severity) + ": " + manifest.entries[i].id + ": " + *errors[i]);
    }
  }

  res.manifest_path = (dir / "manifest.jsonl").string();
  write_manifest(res.manifest_path, res.manifest);
  std::ofstream side(dir / "failures.jsonl", std::ios::trunc);
  for (const auto& f : res.failures) side << nlohmann::json{{"id", f.id}, {"error", f.message}}.dump() << '\n';
  return res;
}

}  // namespace srb::harness
