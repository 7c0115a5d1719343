#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rrscale/corpus.hpp"
#include "rrscale/ranked_run.hpp"

namespace rrscale {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct Posting {
  std::uint32_t doc = 0;  // dense index into the doc_id-sorted document table
  std::uint32_t tf = 0;

  bool operator==(const Posting&) const = default;
};

/// Okapi BM25 over a static corpus of term-id documents.
///
/// Documents are numbered in ascending doc_id order, so posting lists sorted by dense index
/// are also sorted by doc_id and index order doubles as the tie-break order.
/// idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1), which is strictly positive.
class InvertedIndex {
 public:
  struct Document {
    std::string_view doc_id;
    std::span<const int> tokens;
  };

  static InvertedIndex build(std::span<const Document> docs, Bm25Params params = {});
  static InvertedIndex build(std::span<const SynthDoc> corpus, Bm25Params params = {});

  std::size_t n_docs() const { return doc_ids_.size(); }
  double avg_doc_length() const { return avg_doc_length_; }
  const Bm25Params& params() const { return params_; }

  const std::string& doc_id(std::uint32_t index) const { return doc_ids_.at(index); }
  std::optional<std::uint32_t> find_doc(std::string_view doc_id) const;
  std::uint32_t doc_length(std::uint32_t index) const { return doc_lengths_.at(index); }
  /// Throws LookupError for unknown ids.
  std::uint32_t doc_length(std::string_view doc_id) const;

  std::span<const Posting> postings(int term) const;
  std::size_t document_frequency(int term) const { return postings(term).size(); }
  std::uint32_t term_frequency(int term, std::uint32_t doc_index) const;
  double idf(int term) const;
  std::vector<int> terms() const;

  /// Sum over query term occurrences (with multiplicity) of the BM25 term weight.
  /// Throws LookupError when doc_id is not indexed.
  double bm25_score(std::span<const int> query, std::string_view doc_id) const;
  double bm25_score(std::span<const int> query, std::uint32_t doc_index) const;

  /// Top-k documents with a non-zero score; ties broken by ascending doc_id.
  /// Throws ArgumentError when k < 1.
  RankedRun retrieve_topk(std::string query_id, std::span<const int> query, int k) const;

 private:
  double term_weight(double idf, std::uint32_t tf, std::uint32_t doc_length) const;

  Bm25Params params_;
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  double avg_doc_length_ = 0.0;
  std::unordered_map<std::string, std::uint32_t> doc_lookup_;
  std::unordered_map<int, std::vector<Posting>> postings_;
};

}  // namespace rrscale
