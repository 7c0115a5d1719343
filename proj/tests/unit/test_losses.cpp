#include <gtest/gtest.h>

#include <cmath>

#include "rrscale/errors.hpp"
#include "rrscale/losses.hpp"
#include "rrscale/metrics.hpp"
#include "rrscale/rng.hpp"

namespace rrscale {
namespace {

double rel_err(double a, double b) { return std::fabs(a - b) / std::max(1e-8, std::max(std::fabs(a), std::fabs(b))); }

TEST(PointwiseLoss, SymmetricPoint) {
  const auto p = pointwise_loss(0.0, 1);
  EXPECT_NEAR(p.loss, std::log(2.0), 1e-15);
  EXPECT_NEAR(p.grad, -0.5, 1e-15);
  const auto n = pointwise_loss(0.0, 0);
  EXPECT_NEAR(n.loss, std::log(2.0), 1e-15);
  EXPECT_NEAR(n.grad, 0.5, 1e-15);
}

TEST(PointwiseLoss, ScalarValue) {
  EXPECT_NEAR(pointwise_loss(2.0, 1).loss, std::log1p(std::exp(-2.0)), 1e-15);
  EXPECT_NEAR(pointwise_loss(2.0, 1).loss, 0.126928011, 1e-9);
}

TEST(PointwiseLoss, StableAtLargeLogits) {
  for (double s : {-500.0, -50.0, 50.0, 500.0}) {
    for (int y : {0, 1}) {
      const auto r = pointwise_loss(s, y);
      ASSERT_TRUE(std::isfinite(r.loss));
      ASSERT_TRUE(std::isfinite(r.grad));
      ASSERT_GE(r.loss, 0.0);
    }
  }
  EXPECT_NEAR(pointwise_loss(500.0, 0).loss, 500.0, 1e-9);
  EXPECT_NEAR(pointwise_loss(-500.0, 1).loss, 500.0, 1e-9);
}

TEST(PointwiseLoss, RejectsNonBinaryLabels) {
  EXPECT_THROW(pointwise_loss(0.0, 2), ArgumentError);
  EXPECT_THROW(pointwise_loss(0.0, -1), ArgumentError);
}

TEST(PointwiseLoss, GradientMatchesFiniteDifferences) {
  Rng rng(1);
  const double h = 1e-5;
  for (int i = 0; i < 200; ++i) {
    const double s = 6.0 * rng.normal();
    const int y = static_cast<int>(rng.below(2));
    const double fd = (pointwise_loss(s + h, y).loss - pointwise_loss(s - h, y).loss) / (2 * h);
    ASSERT_LT(rel_err(pointwise_loss(s, y).grad, fd), 1e-4) << s << " " << y;
  }
}

TEST(RankNet, ZeroMarginAndScalarValue) {
  EXPECT_NEAR(pairwise_ranknet_loss(0.3, 0.3).loss, std::log(2.0), 1e-15);
  EXPECT_NEAR(pairwise_ranknet_loss(1.0, 0.0).loss, 0.313261688, 1e-9);
}

TEST(RankNet, LossDecreasesMonotonicallyToZero) {
  double prev = 1e300;
  for (double d = -20.0; d <= 60.0; d += 0.5) {
    const double l = pairwise_ranknet_loss(d, 0.0).loss;
    ASSERT_LT(l, prev);
    ASSERT_GE(l, 0.0);
    prev = l;
  }
  EXPECT_LT(pairwise_ranknet_loss(60.0, 0.0).loss, 1e-25);
  EXPECT_TRUE(std::isfinite(pairwise_ranknet_loss(-800.0, 0.0).loss));
}

TEST(RankNet, GradientsSumToZeroAndMatchFiniteDifferences) {
  Rng rng(2);
  const double h = 1e-5;
  for (int i = 0; i < 200; ++i) {
    const double a = 4.0 * rng.normal(), b = 4.0 * rng.normal();
    const auto r = pairwise_ranknet_loss(a, b);
    ASSERT_EQ(r.grad_pos + r.grad_neg, 0.0);
    const double fa = (pairwise_ranknet_loss(a + h, b).loss - pairwise_ranknet_loss(a - h, b).loss) / (2 * h);
    const double fb = (pairwise_ranknet_loss(a, b + h).loss - pairwise_ranknet_loss(a, b - h).loss) / (2 * h);
    ASSERT_LT(rel_err(r.grad_pos, fa), 1e-4);
    ASSERT_LT(rel_err(r.grad_neg, fb), 1e-4);
  }
}

TEST(ListNet, UniformGradesEqualScoresGiveLogN) {
  for (int n : {2, 5, 11}) {
    std::vector<double> s(n, 0.7);
    std::vector<int> g(n, 2);
    EXPECT_NEAR(listwise_listnet_loss(s, g).loss, std::log(double(n)), 1e-12);
  }
}

TEST(ListNet, TwoElementExample) {
  // Gains [1, 0] give a one-hot target, so the loss is the softmax cross-entropy of the first.
  const std::vector<double> s{1.0, 0.0};
  const std::vector<int> g{1, 0};
  EXPECT_NEAR(listwise_listnet_loss(s, g).loss, 0.313261688, 1e-9);
}

TEST(ListNet, SinglePositiveEqualsContrastiveEntropy) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + rng.below(20);
    std::vector<double> s(n);
    for (auto& v : s) v = 3.0 * rng.normal();
    std::vector<int> g(n, 0);
    const auto pos = rng.below(n);
    g[pos] = 1;
    std::vector<double> negs;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != pos) negs.push_back(s[j]);
    }
    ASSERT_NEAR(listwise_listnet_loss(s, g).loss, contrastive_entropy(s[pos], negs), 1e-9);
  }
}

TEST(ListNet, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  const double h = 1e-5;
  for (int i = 0; i < 150; ++i) {
    const std::size_t n = 2 + rng.below(10);
    std::vector<double> s(n);
    std::vector<int> g(n);
    for (auto& v : s) v = 2.0 * rng.normal();
    for (auto& v : g) v = static_cast<int>(rng.below(4));
    if (std::all_of(g.begin(), g.end(), [](int v) { return v == 0; })) g[0] = 1;
    const auto r = listwise_listnet_loss(s, g);
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      auto p = s, m = s;
      p[k] += h;
      m[k] -= h;
      const double fd = (listwise_listnet_loss(p, g).loss - listwise_listnet_loss(m, g).loss) / (2 * h);
      ASSERT_LT(rel_err(r.grads[k], fd), 1e-4) << i << " " << k;
      sum += r.grads[k];
    }
    ASSERT_NEAR(sum, 0.0, 1e-12);
  }
}

TEST(ListNet, Preconditions) {
  const std::vector<double> s2{1.0, 2.0}, s1{1.0};
  const std::vector<int> zeros{0, 0}, g1{1}, g3{1, 0, 0};
  EXPECT_THROW(listwise_listnet_loss(s2, zeros), PreconditionError);
  EXPECT_THROW(listwise_listnet_loss(s1, g1), PreconditionError);
  EXPECT_THROW(listwise_listnet_loss(s2, g3), PreconditionError);
}

TEST(Helpers, SoftplusSigmoidLogSumExp) {
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(softplus(800.0), 800.0, 1e-12);
  EXPECT_NEAR(softplus(-800.0), 0.0, 1e-300);
  EXPECT_NEAR(sigmoid(0.0), 0.5, 1e-15);
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  const std::vector<double> xs{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(xs), 1000.0 + std::log(2.0), 1e-12);
}

}  // namespace
}  // namespace rrscale
