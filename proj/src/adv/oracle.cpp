#include "srb/adv/oracle.hpp"

#include "srb/hash.hpp"
#include "srb/toy/ctc.hpp"

namespace srb::adv {

ToyOracle::ToyOracle(toy::ToyCtcModel model) : model_(std::move(model)) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(model_.weights.data());
  const auto n = static_cast<std::size_t>(model_.weights.size()) * sizeof(double);
  id_ = "toy-" + to_hex(fnv1a64(std::span<const unsigned char>(bytes, n), fnv1a64(model_.alphabet)));
}

std::string ToyOracle::transcribe(const Signal& x) const { return toy::transcribe(model_, x); }

double ToyOracle::loss(const Signal& x, const std::string& reference) const {
  return toy::ctc_loss(toy::forward(model_, x), model_.encode(reference));
}

Signal ToyOracle::grad_input(const Signal& x, const std::string& reference) const {
  return toy::ctc_grad_input(model_, x, model_.encode(reference));
}

}  // namespace srb::adv
