#pragma once

#include <string>

#include "srb/audio/buffer.hpp"
#include "srb/toy/model.hpp"

namespace srb::adv {

using audio::Signal;

/// What an attack needs from a model: transcription, the training loss and
/// its gradient with respect to the input samples.
///
/// Implementations must be safe to call concurrently from several threads.
class GradientOracle {
 public:
  virtual ~GradientOracle() = default;

  virtual std::string id() const = 0;
  virtual int sample_rate() const = 0;
  virtual std::string transcribe(const Signal& x) const = 0;
  virtual double loss(const Signal& x, const std::string& reference) const = 0;
  // Same length as x.
  virtual Signal grad_input(const Signal& x, const std::string& reference) const = 0;
};

class ToyOracle final : public GradientOracle {
 public:
  explicit ToyOracle(toy::ToyCtcModel model);

  std::string id() const override { return id_; }
  int sample_rate() const override { return model_.sample_rate; }
  std::string transcribe(const Signal& x) const override;
  double loss(const Signal& x, const std::string& reference) const override;
  Signal grad_input(const Signal& x, const std::string& reference) const override;

  const toy::ToyCtcModel& model() const { return model_; }

 private:
  toy::ToyCtcModel model_;
  std::string id_;
};

}  // namespace srb::adv
