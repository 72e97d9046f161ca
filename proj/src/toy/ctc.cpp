#include "srb/toy/ctc.hpp"

#include <cmath>
#include <limits>

#include "srb/error.hpp"

namespace srb::toy {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

// Blank-interleaved label sequence: _ l1 _ l2 _ ... lU _
std::vector<Index> extend(const std::vector<int>& target, Index blank) {
  std::vector<Index> ext(2 * target.size() + 1, blank);
  for (std::size_t u = 0; u < target.size(); ++u) ext[2 * u + 1] = target[u];
  return ext;
}

void check_target(const Eigen::MatrixXd& logprobs, const std::vector<int>& target) {
  const Index blank = logprobs.cols() - 1;
  for (int label : target)
    if (label < 0 || label >= blank) throw ValidationError("CTC target label out of range");
  if (ctc_min_frames(target) > logprobs.rows())
    throw ValidationError("CTC target of length " + std::to_string(target.size()) +
                          " cannot be aligned to " + std::to_string(logprobs.rows()) + " frames");
}

bool can_skip(const std::vector<Index>& ext, Index s, Index blank) {
  return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2];
}

Eigen::MatrixXd alphas(const Eigen::MatrixXd& lp, const std::vector<Index>& ext, Index blank) {
  const Index T = lp.rows(), S = static_cast<Index>(ext.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(T, S, kNegInf);
  a(0, 0) = lp(0, ext[0]);
  if (S > 1) a(0, 1) = lp(0, ext[1]);
  for (Index t = 1; t < T; ++t) {
    for (Index s = 0; s < S; ++s) {
      double v = a(t - 1, s);
      if (s >= 1) v = log_add(v, a(t - 1, s - 1));
      if (can_skip(ext, s, blank)) v = log_add(v, a(t - 1, s - 2));
      a(t, s) = v == kNegInf ? kNegInf : v + lp(t, ext[s]);
    }
  }
  return a;
}

// beta(t, s): log probability of emitting frames t+1.. given state s at t.
Eigen::MatrixXd betas(const Eigen::MatrixXd& lp, const std::vector<Index>& ext, Index blank) {
  const Index T = lp.rows(), S = static_cast<Index>(ext.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Constant(T, S, kNegInf);
  b(T - 1, S - 1) = 0.0;
  if (S > 1) b(T - 1, S - 2) = 0.0;
  for (Index t = T - 2; t >= 0; --t) {
    for (Index s = 0; s < S; ++s) {
      double v = b(t + 1, s) + lp(t + 1, ext[s]);
      if (s + 1 < S) v = log_add(v, b(t + 1, s + 1) + lp(t + 1, ext[s + 1]));
      if (s + 2 < S && can_skip(ext, s + 2, blank))
        v = log_add(v, b(t + 1, s + 2) + lp(t + 1, ext[s + 2]));
      b(t, s) = v;
    }
  }
  return b;
}

double total_log_prob(const Eigen::MatrixXd& a) {
  const Index T = a.rows(), S = a.cols();
  double ll = a(T - 1, S - 1);
  if (S > 1) ll = log_add(ll, a(T - 1, S - 2));
  return ll;
}

}  // namespace

Index ctc_min_frames(const std::vector<int>& target) {
  Index n = static_cast<Index>(target.size());
  for (std::size_t u = 1; u < target.size(); ++u)
    if (target[u] == target[u - 1]) ++n;
  return n;
}

double ctc_loss(const Eigen::MatrixXd& logprobs, const std::vector<int>& target) {
  check_target(logprobs, target);
  const Index blank = logprobs.cols() - 1;
  const double ll = total_log_prob(alphas(logprobs, extend(target, blank), blank));
  if (ll == kNegInf) throw ValidationError("CTC target has zero probability");
  return -ll;
}

CtcGradient ctc_loss_grad(const Eigen::MatrixXd& logprobs, const std::vector<int>& target) {
  check_target(logprobs, target);
  const Index blank = logprobs.cols() - 1;
  const auto ext = extend(target, blank);
  const Eigen::MatrixXd a = alphas(logprobs, ext, blank);
  const Eigen::MatrixXd b = betas(logprobs, ext, blank);
  const double ll = total_log_prob(a);
  if (ll == kNegInf) throw ValidationError("CTC target has zero probability");

  const Index T = logprobs.rows(), C = logprobs.cols(), S = static_cast<Index>(ext.size());
  CtcGradient g;
  g.loss = -ll;
  g.dlogits = logprobs.array().exp();
  for (Index t = 0; t < T; ++t) {
    Eigen::RowVectorXd occ = Eigen::RowVectorXd::Constant(C, kNegInf);
    for (Index s = 0; s < S; ++s) occ(ext[s]) = log_add(occ(ext[s]), a(t, s) + b(t, s));
    for (Index k = 0; k < C; ++k)
      if (occ(k) != kNegInf) g.dlogits(t, k) -= std::exp(occ(k) - ll);
  }
  return g;
}

Signal ctc_grad_input(const ToyCtcModel& model, const Signal& x, const std::vector<int>& target) {
  auto g = ctc_loss_grad(forward(model, x), target);
  Eigen::MatrixXd dframes = g.dlogits * model.weights.transpose();
  return overlap_add(dframes, model.hop, x.size());
}

WeightGradient ctc_grad_weights(const ToyCtcModel& model, const Signal& x,
                                const std::vector<int>& target) {
  Eigen::MatrixXd frames = frame_signal(x, model.frame_len, model.hop);
  auto g = ctc_loss_grad(log_softmax_rows(frames * model.weights), target);
  return {g.loss, frames.transpose() * g.dlogits};
}

}  // namespace srb::toy
