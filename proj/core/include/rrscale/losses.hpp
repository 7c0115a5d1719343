#pragma once

#include <span>
#include <vector>

namespace rrscale {

struct PointLoss {
  double loss = 0.0;
  double grad = 0.0;  // d loss / d score
};

struct PairLoss {
  double loss = 0.0;
  double grad_pos = 0.0;
  double grad_neg = 0.0;
};

struct ListLoss {
  double loss = 0.0;
  std::vector<double> grads;
};

/// Logistic sigmoid evaluated without overflow for any finite input.
double sigmoid(double x);
/// log(1 + exp(x)) without overflow.
double softplus(double x);
/// log(sum(exp(x))) with max-shift.
double log_sum_exp(std::span<const double> xs);

/// Binary cross-entropy on a logit: -y log s(x) - (1-y) log(1 - s(x)) = softplus(x) - y x.
/// Throws ArgumentError for labels other than 0 or 1.
PointLoss pointwise_loss(double score, int label);

/// RankNet: log(1 + exp(-(s_pos - s_neg))). The two gradients always sum to zero.
PairLoss pairwise_ranknet_loss(double score_pos, double score_neg);

/// Top-one ListNet cross-entropy H(p, q) with q = softmax(scores) and target
/// p_i = gain_i / sum(gain), gain = 2^grade - 1. Gradients are q - p.
/// Throws PreconditionError for mismatched or short lists and for all-zero grades.
ListLoss listwise_listnet_loss(std::span<const double> scores, std::span<const int> grades);

}  // namespace rrscale
