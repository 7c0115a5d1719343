#include "rrscale/batching.hpp"

#include <algorithm>

#include "rrscale/errors.hpp"

namespace rrscale {

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::Pointwise:
      return "pointwise";
    case Objective::Pairwise:
      return "pairwise";
    case Objective::Listwise:
      return "listwise";
  }
  return "unknown";
}

Objective parse_objective(std::string_view name) {
  for (auto o : kAllObjectives) {
    if (to_string(o) == name) {
      return o;
    }
  }
  throw ArgumentError("unknown objective '" + std::string(name) + "'");
}

void BatchConfig::validate() const {
  if (pointwise_batch_size < 1) throw ConfigError("pointwise_batch_size", "must be >= 1");
  if (pointwise_negatives_per_positive < 0) {
    throw ConfigError("pointwise_negatives_per_positive", "must be >= 0");
  }
  if (queries_per_batch < 1) throw ConfigError("queries_per_batch", "must be >= 1");
  if (negatives_per_query < 1) throw ConfigError("negatives_per_query", "must be >= 1");
  if (candidate_depth < 1) throw ConfigError("candidate_depth", "must be >= 1");
}

int BatchConfig::effective_batch_size(Objective objective) const {
  return objective == Objective::Pointwise ? pointwise_batch_size
                                           : queries_per_batch * negatives_per_query;
}

BatchStream::BatchStream(Objective objective, const RankingData& data, const BatchConfig& config,
                         std::uint64_t seed)
    : objective_(objective), config_(config), rng_(derive_seed(seed, to_string(objective))) {
  config.validate();
  const auto& qrels = data.qrels();
  for (const auto& qid : data.train_query_ids()) {
    QueryPool pool;
    pool.query_id = qid;
    for (const auto& [doc, g] : qrels.judgments(qid)) {
      if (g > 0) {
        pool.positives.push_back(doc);
        pool.positive_grades.push_back(g);
      }
    }
    if (pool.positives.empty()) {
      continue;
    }
    const auto& run = data.candidates(qid);
    const std::size_t depth = std::min(run.entries.size(), static_cast<std::size_t>(config.candidate_depth));
    for (std::size_t i = 0; i < depth; ++i) {
      if (qrels.grade(qid, run.entries[i].doc_id) == 0) {
        pool.negatives.push_back(run.entries[i].doc_id);
      }
    }
    if (pool.negatives.empty()) {
      // No grade-0 candidate in the first-stage list: fall back to judged non-relevant docs.
      for (const auto& [doc, g] : qrels.judgments(qid)) {
        if (g == 0) {
          pool.negatives.push_back(doc);
        }
      }
    }
    if (pool.negatives.empty()) {
      throw DataError("training query " + qid + " has no grade-0 document to sample");
    }
    pools_.push_back(std::move(pool));
  }
  if (pools_.empty()) {
    throw DataError("no training query has a positive judgment");
  }
  order_.resize(pools_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    order_[i] = i;
  }
  rng_.shuffle(order_);
}

const BatchStream::QueryPool& BatchStream::next_query() {
  if (cursor_ == order_.size()) {
    rng_.shuffle(order_);
    cursor_ = 0;
  }
  return pools_[order_[cursor_++]];
}

std::vector<std::size_t> BatchStream::draw_negatives(const QueryPool& pool, std::size_t count) {
  const std::size_t available = pool.negatives.size();
  if (available >= count) {
    return rng_.sample_without_replacement(available, count);
  }
  std::vector<std::size_t> picks(count);
  for (auto& p : picks) {
    p = rng_.below(available);
  }
  return picks;
}

Batch BatchStream::next() {
  Batch batch;
  batch.objective = objective_;
  if (objective_ == Objective::Pointwise) {
    const auto target = static_cast<std::size_t>(config_.pointwise_batch_size);
    const auto n_neg = static_cast<std::size_t>(config_.pointwise_negatives_per_positive);
    while (batch.pointwise.size() < target) {
      const auto& pool = next_query();
      const std::size_t pos = rng_.below(pool.positives.size());
      batch.pointwise.push_back({pool.query_id, pool.positives[pos], 1});
      for (std::size_t idx : draw_negatives(pool, n_neg)) {
        if (batch.pointwise.size() == target) {
          break;
        }
        batch.pointwise.push_back({pool.query_id, pool.negatives[idx], 0});
      }
    }
    return batch;
  }

  const auto n_neg = static_cast<std::size_t>(config_.negatives_per_query);
  for (int q = 0; q < config_.queries_per_batch; ++q) {
    const auto& pool = next_query();
    const std::size_t pos = rng_.below(pool.positives.size());
    const auto negs = draw_negatives(pool, n_neg);
    if (objective_ == Objective::Pairwise) {
      for (std::size_t idx : negs) {
        batch.pairwise.push_back({pool.query_id, pool.positives[pos], pool.negatives[idx]});
      }
    } else {
      ListwiseInstance list{pool.query_id, {pool.positives[pos]}, {pool.positive_grades[pos]}};
      for (std::size_t idx : negs) {
        list.docs.push_back(pool.negatives[idx]);
        list.grades.push_back(0);
      }
      batch.listwise.push_back(std::move(list));
    }
  }
  return batch;
}

}  // namespace rrscale
