#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rrscale/bm25.hpp"
#include "rrscale/corpus.hpp"
#include "rrscale/qrels.hpp"
#include "rrscale/ranked_run.hpp"

namespace rrscale {

/// Interaction features fed to the reranker, F = 2L + 4 entries:
///   [0, L)     L * (q o d)          elementwise latent product
///   [L, 2L)    sqrt(L) * |q - d|    absolute latent difference
///   2L         bm25(q, d) / 10
///   2L + 1     log(1 + term overlap)  (query token occurrences present in the doc)
///   2L + 2     log(query length)
///   2L + 3     log(doc length)
constexpr int feature_dim_for(int latent_dim) { return 2 * latent_dim + 4; }

/// Column block of feature vectors stored feature-major: value(k, s) = data[k * n + s].
struct FeatureBatch {
  int dim = 0;
  std::size_t n = 0;
  std::vector<double> data;

  FeatureBatch() = default;
  FeatureBatch(int dim_, std::size_t n_)
      : dim(dim_), n(n_), data(static_cast<std::size_t>(dim_) * n_, 0.0) {}

  double& at(int k, std::size_t s) { return data[static_cast<std::size_t>(k) * n + s]; }
  double at(int k, std::size_t s) const { return data[static_cast<std::size_t>(k) * n + s]; }
  void set_column(std::size_t s, std::span<const double> values);
  std::vector<double> column(std::size_t s) const;
};

/// Owns the corpus, queries, BM25 index, judgments and first-stage candidate runs, plus the
/// train/eval query split. Immutable after construction and shared by reference.
class RankingData {
 public:
  RankingData(std::vector<SynthDoc> corpus, std::vector<SynthQuery> queries, Qrels qrels,
              std::vector<RankedRun> candidate_runs, std::vector<std::string> train_query_ids,
              std::vector<std::string> eval_query_ids, Bm25Params params = {});
  RankingData(const RankingData&) = delete;
  RankingData& operator=(const RankingData&) = delete;

  int latent_dim() const { return latent_dim_; }
  int feature_dim() const { return feature_dim_for(latent_dim_); }

  const std::vector<SynthDoc>& corpus() const { return corpus_; }
  const std::vector<SynthQuery>& queries() const { return queries_; }
  const InvertedIndex& index() const { return index_; }
  const Qrels& qrels() const { return qrels_; }
  const std::vector<std::string>& train_query_ids() const { return train_ids_; }
  const std::vector<std::string>& eval_query_ids() const { return eval_ids_; }

  /// Throws DataError naming the query when it has no candidate run.
  const RankedRun& candidates(std::string_view query_id) const;
  bool has_candidates(std::string_view query_id) const;
  const std::map<std::string, RankedRun, std::less<>>& candidate_runs() const { return runs_; }

  /// Throws LookupError for unknown ids.
  const SynthQuery& query(std::string_view query_id) const;
  const SynthDoc& doc(std::string_view doc_id) const;

  void features(std::string_view query_id, std::string_view doc_id, std::span<double> out) const;
  std::vector<double> features(std::string_view query_id, std::string_view doc_id) const;
  FeatureBatch feature_batch(std::string_view query_id, std::span<const std::string> doc_ids) const;

 private:
  int latent_dim_ = 0;
  std::vector<SynthDoc> corpus_;
  std::vector<SynthQuery> queries_;
  Qrels qrels_;
  std::map<std::string, RankedRun, std::less<>> runs_;
  std::vector<std::string> train_ids_;
  std::vector<std::string> eval_ids_;
  InvertedIndex index_;
  std::unordered_map<std::string, std::size_t> query_lookup_;
  std::vector<std::size_t> doc_by_dense_;  // dense index -> position in corpus_
};

}  // namespace rrscale
