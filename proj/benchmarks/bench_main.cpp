#include <benchmark/benchmark.h>

#include <cmath>

#include "rrscale/bm25.hpp"
#include "rrscale/rng.hpp"
#include "rrscale/scaling_fit.hpp"
#include "rrscale/scorer.hpp"
#include "rrscale/synth.hpp"

namespace {

using namespace rrscale;

const Benchmark& corpus() {
  static const Benchmark bench = [] {
    BenchmarkConfig c;
    c.n_docs = 3000;
    c.n_queries = 200;
    return generate_benchmark(c);
  }();
  return bench;
}

void BM_Bm25TopK(benchmark::State& state) {
  const auto& bench = corpus();
  const auto index = InvertedIndex::build(std::span<const SynthDoc>(bench.corpus));
  std::size_t q = 0;
  for (auto _ : state) {
    const auto& query = bench.queries[q++ % bench.queries.size()];
    benchmark::DoNotOptimize(index.retrieve_topk(query.query_id, query.tokens, 100));
  }
}
BENCHMARK(BM_Bm25TopK);

void BM_Bm25Build(benchmark::State& state) {
  const auto& bench = corpus();
  for (auto _ : state) {
    benchmark::DoNotOptimize(InvertedIndex::build(std::span<const SynthDoc>(bench.corpus)));
  }
}
BENCHMARK(BM_Bm25Build)->Unit(benchmark::kMillisecond);

void BM_ScorerBatch(benchmark::State& state) {
  ScorerConfig c;
  c.width = static_cast<int>(state.range(0));
  c.depth = 2;
  const Scorer scorer(c);
  FeatureBatch batch(c.feature_dim, 160);
  Rng rng(1);
  for (auto& v : batch.data) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(scorer.score_batch(batch));
  state.SetItemsProcessed(state.iterations() * 160);
}
BENCHMARK(BM_ScorerBatch)->Arg(6)->Arg(48)->Arg(192);

void BM_ScorerBackward(benchmark::State& state) {
  ScorerConfig c;
  c.width = static_cast<int>(state.range(0));
  c.depth = 2;
  const Scorer scorer(c);
  FeatureBatch batch(c.feature_dim, 160);
  Rng rng(2);
  for (auto& v : batch.data) v = rng.normal();
  const std::vector<double> dscores(160, 1.0 / 160);
  ForwardCache cache;
  ScorerGradients grads;
  for (auto _ : state) {
    scorer.forward(batch, cache);
    scorer.backward(cache, dscores, grads);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_ScorerBackward)->Arg(6)->Arg(48)->Arg(192);

void BM_FitModelPower(benchmark::State& state) {
  ObservationSeries s;
  s.axis = ScalingAxis::ModelSize;
  for (int i = 0; i < 6; ++i) {
    const double m = 300.0 * std::pow(3.0, i);
    s.points.push_back({m, 1.0, 0.8 - 0.4 * std::pow(m, -0.3)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit(s, ScalingForm::ModelPower));
}
BENCHMARK(BM_FitModelPower);

void BM_FitJoint(benchmark::State& state) {
  ObservationSeries s;
  s.axis = ScalingAxis::Joint;
  for (int i = 0; i < 6; ++i) {
    const double m = 300.0 * std::pow(3.0, i);
    for (int k = 1; k <= 15; ++k) {
      const double st = 100.0 * k;
      s.points.push_back({m, st, 0.8 - 0.4 * std::pow(m, -0.3) - 0.6 * std::pow(st, -0.4)});
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit(s, ScalingForm::JointAdditive));
}
BENCHMARK(BM_FitJoint)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
