// Adapter that transcribes with a trained toy CTC model.

#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "srb/audio/dsp.hpp"
#include "srb/audio/wav.hpp"
#include "srb/toy/model.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Toy model adapter"};
  std::string model_path;
  app.add_option("--model", model_path, "Toy model JSON")->required();
  CLI11_PARSE(app, argc, argv);

  auto model = srb::toy::ToyCtcModel::load(model_path);
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    auto req = nlohmann::json::parse(line);
    std::string id = req.at("id").get<std::string>(), text;
    try {
      auto audio = srb::audio::resample(srb::audio::read_wav(req.at("audio").get<std::string>()), model.sample_rate);
      text = srb::toy::transcribe(model, audio.samples());
    } catch (const std::exception& e) {
      std::cerr << id << ": " << e.what() << "\n";
    }
    std::cout << nlohmann::json{{"id", id}, {"text", text}}.dump() << std::endl;
  }
  return 0;
}
