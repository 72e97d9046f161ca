// Reference adapter for tests and demos. Answers every request with fixed
// text, a per-id mapping, or the manifest reference, and can misbehave on
// purpose (die, stall, answer out of order).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>
#include <unordered_map>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

std::unordered_map<std::string, std::string> load_map(const std::string& path, const char* text_key) {
  std::unordered_map<std::string, std::string> out;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    out[j.at("id").get<std::string>()] = j.value(text_key, std::string());
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Echo adapter"};
  std::string text = "test", map_path, manifest_path, log_path;
  int die_after = -1, delay_ms = 0, hang_after = -1;
  bool swap_pairs = false;
  app.add_option("--text", text, "Fixed response text");
  app.add_option("--map", map_path, "JSONL of {id, text} responses");
  app.add_option("--from-manifest", manifest_path, "Answer with each utterance's reference text");
  app.add_option("--log", log_path, "Append each request id to this file");
  app.add_option("--die-after", die_after, "Exit after this many responses");
  app.add_option("--hang-after", hang_after, "Stop answering after this many responses");
  app.add_option("--delay-ms", delay_ms, "Sleep before each response");
  app.add_flag("--swap-pairs", swap_pairs, "Answer requests two at a time in reverse order");
  CLI11_PARSE(app, argc, argv);

  std::unordered_map<std::string, std::string> answers;
  if (!map_path.empty()) answers = load_map(map_path, "text");
  if (!manifest_path.empty()) answers = load_map(manifest_path, "text");

  std::ofstream log;
  if (!log_path.empty()) log.open(log_path, std::ios::app);

  int answered = 0;
  std::vector<std::string> held;
  auto respond = [&](const std::string& id) {
    if (die_after >= 0 && answered >= die_after) std::exit(3);
    if (hang_after >= 0 && answered >= hang_after)
      for (;;) std::this_thread::sleep_for(std::chrono::seconds(1));
    if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    auto it = answers.find(id);
    std::cout << nlohmann::json{{"id", id}, {"text", it == answers.end() ? text : it->second}}.dump() << std::endl;
    ++answered;
  };

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    auto id = nlohmann::json::parse(line).at("id").get<std::string>();
    if (log.is_open()) log << id << std::endl;
    if (!swap_pairs) {
      respond(id);
      continue;
    }
    held.push_back(id);
    if (held.size() == 2) {
      respond(held[1]);
      respond(held[0]);
      held.clear();
    }
  }
  for (const auto& id : held) respond(id);
  return 0;
}
