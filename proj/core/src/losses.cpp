#include "rrscale/losses.hpp"

#include <algorithm>
#include <cmath>

#include "rrscale/errors.hpp"

namespace rrscale {

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) {
    return -INFINITY;
  }
  const double m = *std::max_element(xs.begin(), xs.end());
  double total = 0.0;
  for (double x : xs) {
    total += std::exp(x - m);
  }
  return m + std::log(total);
}

PointLoss pointwise_loss(double score, int label) {
  if (label != 0 && label != 1) {
    throw ArgumentError("pointwise label must be 0 or 1, got " + std::to_string(label));
  }
  // softplus(s) - y s, written per label so the small loss is not a difference of large terms.
  return {softplus(label == 1 ? -score : score), sigmoid(score) - static_cast<double>(label)};
}

PairLoss pairwise_ranknet_loss(double score_pos, double score_neg) {
  const double margin = score_pos - score_neg;
  const double g = sigmoid(-margin);
  return {softplus(-margin), -g, g};
}

ListLoss listwise_listnet_loss(std::span<const double> scores, std::span<const int> grades) {
  if (scores.size() != grades.size()) {
    throw PreconditionError("listnet: scores and grades differ in length");
  }
  if (scores.size() < 2) {
    throw PreconditionError("listnet: list needs at least 2 entries");
  }
  std::vector<double> target(grades.size());
  double gain_total = 0.0;
  for (std::size_t i = 0; i < grades.size(); ++i) {
    if (grades[i] < 0) {
      throw PreconditionError("listnet: negative grade");
    }
    target[i] = std::exp2(static_cast<double>(grades[i])) - 1.0;
    gain_total += target[i];
  }
  if (gain_total <= 0.0) {
    throw PreconditionError("listnet: all grades are zero");
  }
  for (auto& p : target) {
    p /= gain_total;
  }
  const double lse = log_sum_exp(scores);
  ListLoss out;
  out.grads.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (target[i] > 0.0) {
      out.loss -= target[i] * (scores[i] - lse);
    }
    out.grads[i] = std::exp(scores[i] - lse) - target[i];
  }
  return out;
}

}  // namespace rrscale
