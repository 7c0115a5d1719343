#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rrscale {

/// Graded relevance judgments: query_id -> doc_id -> grade in {0,1,2,3}.
///
/// Pairs that were never judged read back as grade 0. Iteration order is sorted by
/// query_id, then doc_id (the TREC qrels serialization order).
class Qrels {
 public:
  static constexpr int kMaxGrade = 3;
  using Judgments = std::map<std::string, int, std::less<>>;

  /// Throws ArgumentError for grades outside {0..3}.
  void set(std::string_view query_id, std::string_view doc_id, int grade);

  int grade(std::string_view query_id, std::string_view doc_id) const;
  bool has_query(std::string_view query_id) const;

  /// Judgments for one query; empty when the query is unknown.
  const Judgments& judgments(std::string_view query_id) const;

  /// Doc ids with grade > 0, sorted.
  std::vector<std::string> positives(std::string_view query_id) const;
  std::size_t num_positives(std::string_view query_id) const;

  std::vector<std::string> query_ids() const;
  std::size_t num_queries() const { return table_.size(); }
  std::size_t num_judgments() const;

  const std::map<std::string, Judgments, std::less<>>& table() const { return table_; }

  bool operator==(const Qrels&) const = default;

 private:
  std::map<std::string, Judgments, std::less<>> table_;
};

}  // namespace rrscale
