#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rrscale/features.hpp"
#include "rrscale/metrics.hpp"
#include "rrscale/scorer.hpp"

namespace rrscale {

/// Scores a query's candidate docs; must return one score per doc id, in order.
using BatchScoreFn =
    std::function<std::vector<double>(std::string_view query_id, std::span<const std::string>)>;

/// Adapts a Scorer to BatchScoreFn using the data's feature extractor.
BatchScoreFn make_score_fn(const Scorer& scorer, const RankingData& data);

struct EvalOptions {
  int ndcg_cutoff = 10;
  int candidate_depth = 100;
  int ce_negatives = 64;
  std::uint64_t seed = 0;
  bool keep_reranked_runs = false;
};

struct MetricReport {
  std::map<std::string, double, std::less<>> values;  // ndcg@10, map, mrr, ce
  std::map<std::string, std::map<std::string, double>, std::less<>> per_query;
  int ce_skipped = 0;
  std::vector<RankedRun> reranked;

  double at(std::string_view metric) const;
};

/// CE for one query over its first-stage candidates (see contrastive_entropy_from_scores).
/// nullopt means the query was skipped for lack of a judged positive in the candidates.
std::optional<double> ce_over_candidates(const BatchScoreFn& score, std::string_view query_id,
                                         const RankedRun& candidates, const Qrels& qrels,
                                         int n_negatives, std::uint64_t seed);

/// Reranks each evaluation query's top candidates by score (ties by ascending doc_id) and
/// averages NDCG@k, MAP and MRR over all queries and CE over the non-skipped ones.
/// Throws DataError when a query has no candidate run.
MetricReport evaluate_checkpoint(const BatchScoreFn& score,
                                 std::span<const std::string> eval_query_ids,
                                 const RankingData& data, const EvalOptions& options);
MetricReport evaluate_checkpoint(const Scorer& scorer, const RankingData& data,
                                 const EvalOptions& options);

}  // namespace rrscale
