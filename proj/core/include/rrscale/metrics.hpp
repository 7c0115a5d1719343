#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rrscale/qrels.hpp"
#include "rrscale/ranked_run.hpp"

namespace rrscale {

namespace metric {
inline constexpr std::string_view kNdcg10 = "ndcg@10";
inline constexpr std::string_view kMap = "map";
inline constexpr std::string_view kMrr = "mrr";
inline constexpr std::string_view kCe = "ce";
inline constexpr std::string_view kAll[] = {kNdcg10, kMap, kMrr, kCe};

bool is_known(std::string_view name);
/// Ranking metrics live in [0, 1]; contrastive entropy is unbounded above.
bool is_bounded(std::string_view name);
/// True for metrics that improve by going up (everything but CE).
bool higher_is_better(std::string_view name);
}  // namespace metric

/// Graded NDCG@k. The ideal DCG is taken over every judged doc of the query, not only the
/// retrieved ones; unjudged docs count as grade 0 and IDCG = 0 yields 0.
/// Throws ArgumentError when k < 1.
double ndcg_at_k(const RankedRun& run, const Qrels& qrels, int k);

/// Binary relevance (grade > 0). The denominator is the number of judged-relevant docs for the
/// query, retrieved or not.
double average_precision(const RankedRun& run, const Qrels& qrels);
double mean_average_precision(std::span<const RankedRun> runs, const Qrels& qrels);

double reciprocal_rank(const RankedRun& run, const Qrels& qrels);
double mean_reciprocal_rank(std::span<const RankedRun> runs, const Qrels& qrels);

/// Population z-score; all zeros when the standard deviation is below 1e-12.
/// Throws PreconditionError for fewer than two scores.
std::vector<double> normalize_scores(std::span<const double> scores);

/// -log(e^{s+} / (e^{s+} + sum_j e^{s-_j})), evaluated with log-sum-exp. 0 with no negatives.
double contrastive_entropy(double positive_score, std::span<const double> negative_scores);

/// Contrastive entropy averaged over the judged positives found in `candidates`, given the
/// reranker's score for every candidate (aligned with candidates.entries).
///
/// Per positive, up to `n_negatives` grade-0 candidates are drawn without replacement (all of
/// them when fewer exist) from a stream seeded by hash(seed, query_id); the positive and its
/// negatives are z-scored jointly before the entropy is taken. Returns nullopt when no judged
/// positive is among the candidates.
std::optional<double> contrastive_entropy_from_scores(const RankedRun& candidates,
                                                      std::span<const double> scores,
                                                      const Qrels& qrels, int n_negatives,
                                                      std::uint64_t seed);

}  // namespace rrscale
