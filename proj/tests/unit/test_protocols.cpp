#include <gtest/gtest.h>

#include <cmath>

#include "rrscale/errors.hpp"
#include "rrscale/protocols.hpp"

namespace rrscale {
namespace {

const std::vector<std::int64_t> kSizes{271, 613, 1513, 4177, 12961, 44353};

// Known joint surface on a (sizes x 20 checkpoints) grid for every metric.
std::vector<LedgerRecord> synthetic_ledger(const std::vector<std::int64_t>& sizes, int n_ckpt = 20,
                                           const std::string& dataset = "synthetic") {
  std::vector<LedgerRecord> out;
  for (const char* obj : {"pointwise", "pairwise", "listwise"}) {
    for (auto m : sizes) {
      for (int i = 1; i <= n_ckpt; ++i) {
        const std::int64_t s = 100 * i;
        const double base = 0.2 * std::pow(double(m), -0.3) + 0.5 * std::pow(double(s), -0.4);
        for (const char* metric : {"ndcg@10", "map", "mrr", "ce"}) {
          const bool ce = std::string(metric) == "ce";
          out.push_back({obj, m, s, s * 160, metric, ce ? 1.5 + base : 0.85 - base, dataset, "t"});
        }
      }
    }
  }
  return out;
}

TEST(Protocols, SeriesShapes) {
  const auto ledger = synthetic_ledger(kSizes);
  EXPECT_EQ(model_sizes(ledger, "pairwise"), kSizes);
  const auto ms = model_series(ledger, "pairwise", "ndcg@10");
  ASSERT_EQ(ms.points.size(), 6u);
  for (const auto& p : ms.points) EXPECT_EQ(p.step, 2000);
  const auto ds = data_series(ledger, "pairwise", "ndcg@10", 4177);
  ASSERT_EQ(ds.points.size(), 20u);
  EXPECT_EQ(ds.points.front().step, 100);
  EXPECT_EQ(ds.axis, ScalingAxis::DataExposure);
  EXPECT_EQ(joint_series(ledger, "pairwise", "ndcg@10").points.size(), 120u);
}

TEST(Protocols, ModelProtocolHoldsOutLargestSize) {
  const auto ledger = synthetic_ledger(kSizes);
  const auto r = model_scaling_protocol(ledger, "pointwise", "ndcg@10");
  ASSERT_EQ(r.held_out.size(), 1u);
  EXPECT_EQ(r.held_out[0].at.model_size, 44353);
  EXPECT_EQ(r.training.size(), 5u);
  EXPECT_EQ(r.axis, ScalingAxis::ModelSize);
  EXPECT_EQ(r.objective, "pointwise");
  const auto again = model_scaling_protocol(ledger, "pointwise", "ndcg@10");
  EXPECT_EQ(again.rmse, r.rmse);
  EXPECT_EQ(again.fit.params, r.fit.params);
}

TEST(Protocols, DataProtocolSplitsFifteenFive) {
  const auto ledger = synthetic_ledger(kSizes);
  EXPECT_EQ(default_data_size(ledger, "listwise"), 4177);
  const auto r = data_scaling_protocol(ledger, "listwise", "ndcg@10", 4177);
  EXPECT_EQ(r.training.size(), 15u);
  ASSERT_EQ(r.held_out.size(), 5u);
  EXPECT_EQ(r.held_out.front().at.step, 1600);
  EXPECT_LT(r.rmse, 1e-4);
  EXPECT_GE(r.rmse, r.mae);
  double prev = -1;
  for (double s = 100; s <= 4000; s += 100) {
    const double y = predict(r.fit, s);
    EXPECT_GE(y, prev);
    prev = y;
  }
}

TEST(Protocols, JointProtocolCardinality) {
  const auto ledger = synthetic_ledger(kSizes);
  const auto r = joint_scaling_protocol(ledger, "pairwise", "ndcg@10");
  EXPECT_EQ(r.training.size(), 90u);
  EXPECT_EQ(r.held_out.size(), 30u);
  EXPECT_LT(r.rmse, 1e-5);
}

TEST(Protocols, CeFitsTheMirroredForm) {
  const auto ledger = synthetic_ledger(kSizes);
  const auto r = joint_scaling_protocol(ledger, "pairwise", "ce");
  EXPECT_EQ(r.fit.trend, Trend::Decreasing);
  EXPECT_LT(r.rmse, 1e-5);
}

TEST(Protocols, RaggedGridIsDataErrorListingCells) {
  auto ledger = synthetic_ledger(kSizes);
  std::erase_if(ledger, [](const LedgerRecord& r) {
    return r.objective == "pairwise" && r.model_params == 1513 && r.step == 700;
  });
  try {
    joint_scaling_protocol(ledger, "pairwise", "ndcg@10");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("1513"), std::string::npos) << what;
    EXPECT_NE(what.find("700"), std::string::npos) << what;
  }
}

TEST(Protocols, TooFewSizesOrCheckpoints) {
  const auto three = synthetic_ledger({100, 200, 400});
  EXPECT_THROW(model_scaling_protocol(three, "pointwise", "ndcg@10"), PreconditionError);
  const auto short_run = synthetic_ledger(kSizes, 9);
  EXPECT_THROW(data_scaling_protocol(short_run, "pointwise", "ndcg@10", 4177), PreconditionError);
  const auto ledger = synthetic_ledger(kSizes);
  EXPECT_THROW(data_scaling_protocol(ledger, "pointwise", "ndcg@10", 999), Error);
  EXPECT_THROW(model_scaling_protocol(ledger, "lambdamart", "ndcg@10"), Error);
}

TEST(Protocols, MixedDatasetsNeedAName) {
  auto ledger = synthetic_ledger(kSizes);
  const auto other = synthetic_ledger(kSizes, 20, "other");
  ledger.insert(ledger.end(), other.begin(), other.end());
  EXPECT_THROW(select_records(ledger, "pointwise", "map"), DataError);
  EXPECT_EQ(select_records(ledger, "pointwise", "map", "other").size(), 120u);
  EXPECT_NO_THROW(run_protocol(ScalingAxis::Joint, ledger, "pointwise", "map", 5, "synthetic"));
}

}  // namespace
}  // namespace rrscale
