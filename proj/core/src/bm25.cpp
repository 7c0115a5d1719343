#include "rrscale/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "rrscale/errors.hpp"

namespace rrscale {

InvertedIndex InvertedIndex::build(std::span<const Document> docs, Bm25Params params) {
  if (docs.empty()) {
    throw ConfigError("corpus", "cannot index an empty corpus");
  }
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return docs[x].doc_id < docs[y].doc_id; });

  InvertedIndex index;
  index.params_ = params;
  index.doc_ids_.reserve(docs.size());
  index.doc_lengths_.reserve(docs.size());
  double total_length = 0.0;
  for (std::size_t i : order) {
    const auto& doc = docs[i];
    if (!index.doc_ids_.empty() && index.doc_ids_.back() == doc.doc_id) {
      throw ConfigError("corpus", "duplicate doc_id " + std::string(doc.doc_id));
    }
    const auto dense = static_cast<std::uint32_t>(index.doc_ids_.size());
    index.doc_ids_.emplace_back(doc.doc_id);
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(doc.tokens.size()));
    total_length += static_cast<double>(doc.tokens.size());

    std::map<int, std::uint32_t> counts;
    for (int t : doc.tokens) {
      ++counts[t];
    }
    for (const auto& [term, tf] : counts) {
      index.postings_[term].push_back({dense, tf});
    }
  }
  index.avg_doc_length_ = total_length / static_cast<double>(index.doc_ids_.size());
  for (std::uint32_t i = 0; i < index.doc_ids_.size(); ++i) {
    index.doc_lookup_.emplace(index.doc_ids_[i], i);
  }
  return index;
}

InvertedIndex InvertedIndex::build(std::span<const SynthDoc> corpus, Bm25Params params) {
  std::vector<Document> docs;
  docs.reserve(corpus.size());
  for (const auto& d : corpus) {
    docs.push_back({d.doc_id, d.tokens});
  }
  return build(std::span<const Document>(docs), params);
}

std::optional<std::uint32_t> InvertedIndex::find_doc(std::string_view doc_id) const {
  const auto it = doc_lookup_.find(std::string(doc_id));
  if (it == doc_lookup_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::uint32_t InvertedIndex::doc_length(std::string_view doc_id) const {
  const auto index = find_doc(doc_id);
  if (!index) {
    throw LookupError("unknown doc_id " + std::string(doc_id));
  }
  return doc_lengths_[*index];
}

std::span<const Posting> InvertedIndex::postings(int term) const {
  const auto it = postings_.find(term);
  if (it == postings_.end()) {
    return {};
  }
  return it->second;
}

std::uint32_t InvertedIndex::term_frequency(int term, std::uint32_t doc_index) const {
  const auto list = postings(term);
  const auto it = std::lower_bound(list.begin(), list.end(), doc_index,
                                   [](const Posting& p, std::uint32_t d) { return p.doc < d; });
  return (it != list.end() && it->doc == doc_index) ? it->tf : 0;
}

double InvertedIndex::idf(int term) const {
  const auto n = static_cast<double>(n_docs());
  const auto df = static_cast<double>(document_frequency(term));
  return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

std::vector<int> InvertedIndex::terms() const {
  std::vector<int> out;
  out.reserve(postings_.size());
  for (const auto& [term, _] : postings_) {
    out.push_back(term);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double InvertedIndex::term_weight(double idf, std::uint32_t tf, std::uint32_t doc_length) const {
  const double f = static_cast<double>(tf);
  const double norm =
      1.0 - params_.b + params_.b * static_cast<double>(doc_length) / avg_doc_length_;
  return idf * f * (params_.k1 + 1.0) / (f + params_.k1 * norm);
}

double InvertedIndex::bm25_score(std::span<const int> query, std::string_view doc_id) const {
  const auto index = find_doc(doc_id);
  if (!index) {
    throw LookupError("unknown doc_id " + std::string(doc_id));
  }
  return bm25_score(query, *index);
}

double InvertedIndex::bm25_score(std::span<const int> query, std::uint32_t doc_index) const {
  double score = 0.0;
  for (int term : query) {
    const std::uint32_t tf = term_frequency(term, doc_index);
    if (tf > 0) {
      score += term_weight(idf(term), tf, doc_lengths_[doc_index]);
    }
  }
  return score;
}

RankedRun InvertedIndex::retrieve_topk(std::string query_id, std::span<const int> query,
                                       int k) const {
  if (k < 1) {
    throw ArgumentError("retrieve_topk requires k >= 1, got " + std::to_string(k));
  }
  // Term-at-a-time accumulation in query order; each document sees the same sequence of
  // additions as bm25_score, so both paths agree bit for bit.
  std::vector<double> acc(n_docs(), 0.0);
  std::vector<std::uint32_t> touched;
  for (int term : query) {
    const double w = idf(term);
    for (const Posting& p : postings(term)) {
      if (acc[p.doc] == 0.0) {
        touched.push_back(p.doc);
      }
      acc[p.doc] += term_weight(w, p.tf, doc_lengths_[p.doc]);
    }
  }
  auto better = [&](std::uint32_t x, std::uint32_t y) {
    if (acc[x] != acc[y]) {
      return acc[x] > acc[y];
    }
    return x < y;
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(k), touched.size());
  std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(n),
                    touched.end(), better);

  RankedRun run{std::move(query_id), {}};
  run.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto doc = touched[i];
    run.entries.push_back({doc_ids_[doc], acc[doc], static_cast<int>(i) + 1});
  }
  return run;
}

}  // namespace rrscale
