#include "rrscale/features.hpp"

#include <cmath>

#include <fmt/format.h>

#include "rrscale/errors.hpp"

namespace rrscale {

void FeatureBatch::set_column(std::size_t s, std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(dim)) {
    throw ShapeError(fmt::format("feature column has {} values, batch dimension is {}",
                                 values.size(), dim));
  }
  for (int k = 0; k < dim; ++k) {
    at(k, s) = values[static_cast<std::size_t>(k)];
  }
}

std::vector<double> FeatureBatch::column(std::size_t s) const {
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    out[static_cast<std::size_t>(k)] = at(k, s);
  }
  return out;
}

RankingData::RankingData(std::vector<SynthDoc> corpus, std::vector<SynthQuery> queries,
                         Qrels qrels, std::vector<RankedRun> candidate_runs,
                         std::vector<std::string> train_query_ids,
                         std::vector<std::string> eval_query_ids, Bm25Params params)
    : corpus_(std::move(corpus)),
      queries_(std::move(queries)),
      qrels_(std::move(qrels)),
      train_ids_(std::move(train_query_ids)),
      eval_ids_(std::move(eval_query_ids)),
      index_(InvertedIndex::build(std::span<const SynthDoc>(corpus_), params)) {
  if (corpus_.empty()) {
    throw DataError("empty corpus");
  }
  latent_dim_ = static_cast<int>(corpus_.front().latent.size());
  for (const auto& d : corpus_) {
    if (d.latent.size() != static_cast<std::size_t>(latent_dim_)) {
      throw ShapeError("doc " + d.doc_id + " latent dimension differs from corpus");
    }
  }
  for (std::size_t i = 0; i < queries_.size(); ++i) {
    if (queries_[i].latent.size() != static_cast<std::size_t>(latent_dim_)) {
      throw ShapeError("query " + queries_[i].query_id + " latent dimension differs from corpus");
    }
    query_lookup_.emplace(queries_[i].query_id, i);
  }
  doc_by_dense_.resize(corpus_.size());
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    doc_by_dense_[*index_.find_doc(corpus_[i].doc_id)] = i;
  }
  for (auto& run : candidate_runs) {
    auto id = run.query_id;
    runs_.insert_or_assign(std::move(id), std::move(run));
  }
}

const RankedRun& RankingData::candidates(std::string_view query_id) const {
  const auto it = runs_.find(query_id);
  if (it == runs_.end()) {
    throw DataError("no candidate run for query " + std::string(query_id));
  }
  return it->second;
}

bool RankingData::has_candidates(std::string_view query_id) const {
  return runs_.find(query_id) != runs_.end();
}

const SynthQuery& RankingData::query(std::string_view query_id) const {
  const auto it = query_lookup_.find(std::string(query_id));
  if (it == query_lookup_.end()) {
    throw LookupError("unknown query_id " + std::string(query_id));
  }
  return queries_[it->second];
}

const SynthDoc& RankingData::doc(std::string_view doc_id) const {
  const auto dense = index_.find_doc(doc_id);
  if (!dense) {
    throw LookupError("unknown doc_id " + std::string(doc_id));
  }
  return corpus_[doc_by_dense_[*dense]];
}

void RankingData::features(std::string_view query_id, std::string_view doc_id,
                           std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(feature_dim())) {
    throw ShapeError(fmt::format("feature buffer has {} slots, need {}", out.size(),
                                 feature_dim()));
  }
  const auto& q = query(query_id);
  const auto dense = index_.find_doc(doc_id);
  if (!dense) {
    throw LookupError("unknown doc_id " + std::string(doc_id));
  }
  const auto& d = corpus_[doc_by_dense_[*dense]];
  const auto dim = static_cast<std::size_t>(latent_dim_);
  const double product_scale = static_cast<double>(latent_dim_);
  const double diff_scale = std::sqrt(static_cast<double>(latent_dim_));
  for (std::size_t i = 0; i < dim; ++i) {
    out[i] = product_scale * q.latent[i] * d.latent[i];
    out[dim + i] = diff_scale * std::abs(q.latent[i] - d.latent[i]);
  }
  std::size_t overlap = 0;
  for (int t : q.tokens) {
    overlap += index_.term_frequency(t, *dense) > 0 ? 1 : 0;
  }
  out[2 * dim] = index_.bm25_score(q.tokens, *dense) / 10.0;
  out[2 * dim + 1] = std::log1p(static_cast<double>(overlap));
  out[2 * dim + 2] = std::log(static_cast<double>(std::max<std::size_t>(q.tokens.size(), 1)));
  out[2 * dim + 3] =
      std::log(static_cast<double>(std::max<std::uint32_t>(index_.doc_length(*dense), 1)));
}

std::vector<double> RankingData::features(std::string_view query_id,
                                          std::string_view doc_id) const {
  std::vector<double> out(static_cast<std::size_t>(feature_dim()));
  features(query_id, doc_id, out);
  return out;
}

FeatureBatch RankingData::feature_batch(std::string_view query_id,
                                        std::span<const std::string> doc_ids) const {
  FeatureBatch batch(feature_dim(), doc_ids.size());
  std::vector<double> column(static_cast<std::size_t>(feature_dim()));
  for (std::size_t s = 0; s < doc_ids.size(); ++s) {
    features(query_id, doc_ids[s], column);
    batch.set_column(s, column);
  }
  return batch;
}

}  // namespace rrscale
