#pragma once

#include <vector>

#include <Eigen/Dense>

#include "srb/toy/model.hpp"

namespace srb::toy {

// Frames needed to emit `target`: one per label plus one blank between
// each pair of equal neighbours.
Index ctc_min_frames(const std::vector<int>& target);

// -log P(target | logprobs) by the forward recursion in log space.
// logprobs is T x C with the blank in the last column. Throws
// ValidationError when the target cannot be aligned to T frames.
double ctc_loss(const Eigen::MatrixXd& logprobs, const std::vector<int>& target);

struct CtcGradient {
  double loss = 0.0;
  Eigen::MatrixXd dlogits;  // d loss / d pre-softmax logits, T x C
};

// Forward-backward: loss and gradient with respect to the logits that
// produced `logprobs` through a row-wise log-softmax.
CtcGradient ctc_loss_grad(const Eigen::MatrixXd& logprobs, const std::vector<int>& target);

// d loss / d input samples for the toy model.
Signal ctc_grad_input(const ToyCtcModel& model, const Signal& x, const std::vector<int>& target);

struct WeightGradient {
  double loss = 0.0;
  Eigen::MatrixXd dweights;
};

WeightGradient ctc_grad_weights(const ToyCtcModel& model, const Signal& x,
                                const std::vector<int>& target);

}  // namespace srb::toy
