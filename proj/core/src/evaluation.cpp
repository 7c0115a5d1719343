#include "rrscale/evaluation.hpp"

#include <algorithm>

#include "rrscale/errors.hpp"

namespace rrscale {

namespace {

RankedRun truncated(const RankedRun& run, int depth) {
  RankedRun out{run.query_id, {}};
  const auto n = std::min(run.entries.size(), static_cast<std::size_t>(std::max(depth, 0)));
  out.entries.assign(run.entries.begin(), run.entries.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

}  // namespace

double MetricReport::at(std::string_view metric) const {
  const auto it = values.find(metric);
  if (it == values.end()) {
    throw LookupError("metric report has no '" + std::string(metric) + "'");
  }
  return it->second;
}

BatchScoreFn make_score_fn(const Scorer& scorer, const RankingData& data) {
  return [&scorer, &data](std::string_view query_id, std::span<const std::string> docs) {
    return scorer.score_batch(data.feature_batch(query_id, docs));
  };
}

std::optional<double> ce_over_candidates(const BatchScoreFn& score, std::string_view query_id,
                                         const RankedRun& candidates, const Qrels& qrels,
                                         int n_negatives, std::uint64_t seed) {
  if (candidates.entries.empty()) {
    throw PreconditionError("ce_over_candidates needs at least one candidate for query " +
                            std::string(query_id));
  }
  std::vector<std::string> docs;
  docs.reserve(candidates.entries.size());
  for (const auto& e : candidates.entries) {
    docs.push_back(e.doc_id);
  }
  const auto scores = score(query_id, docs);
  return contrastive_entropy_from_scores(candidates, scores, qrels, n_negatives, seed);
}

MetricReport evaluate_checkpoint(const BatchScoreFn& score,
                                 std::span<const std::string> eval_query_ids,
                                 const RankingData& data, const EvalOptions& options) {
  MetricReport report;
  std::vector<RankedRun> reranked;
  reranked.reserve(eval_query_ids.size());
  double ce_total = 0.0;
  int ce_count = 0;
  const auto& qrels = data.qrels();
  for (const auto& qid : eval_query_ids) {
    const RankedRun candidates = truncated(data.candidates(qid), options.candidate_depth);
    std::vector<std::string> docs;
    docs.reserve(candidates.entries.size());
    for (const auto& e : candidates.entries) {
      docs.push_back(e.doc_id);
    }
    const auto scores = score(qid, docs);
    if (scores.size() != docs.size()) {
      throw ShapeError("score function returned wrong number of scores for " + qid);
    }
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
      scored.emplace_back(docs[i], scores[i]);
    }
    RankedRun run = make_ranked_run(qid, std::move(scored));

    const double ndcg = ndcg_at_k(run, qrels, options.ndcg_cutoff);
    const double ap = average_precision(run, qrels);
    const double rr = reciprocal_rank(run, qrels);
    report.per_query[std::string(metric::kNdcg10)][qid] = ndcg;
    report.per_query[std::string(metric::kMap)][qid] = ap;
    report.per_query[std::string(metric::kMrr)][qid] = rr;

    const auto ce = contrastive_entropy_from_scores(candidates, scores, qrels,
                                                    options.ce_negatives, options.seed);
    if (ce) {
      report.per_query[std::string(metric::kCe)][qid] = *ce;
      ce_total += *ce;
      ++ce_count;
    } else {
      ++report.ce_skipped;
    }
    reranked.push_back(std::move(run));
  }
  if (eval_query_ids.empty()) {
    throw DataError("no evaluation queries");
  }
  if (ce_count == 0) {
    throw DataError("no evaluation query has a judged positive among its candidates");
  }
  const auto n = static_cast<double>(eval_query_ids.size());
  for (auto name : {metric::kNdcg10, metric::kMap, metric::kMrr}) {
    double total = 0.0;
    for (const auto& [qid, v] : report.per_query[std::string(name)]) {
      total += v;
    }
    report.values[std::string(name)] = total / n;
  }
  report.values[std::string(metric::kCe)] = ce_total / static_cast<double>(ce_count);
  if (options.keep_reranked_runs) {
    report.reranked = std::move(reranked);
  }
  return report;
}

MetricReport evaluate_checkpoint(const Scorer& scorer, const RankingData& data,
                                 const EvalOptions& options) {
  return evaluate_checkpoint(make_score_fn(scorer, data), data.eval_query_ids(), data, options);
}

}  // namespace rrscale
