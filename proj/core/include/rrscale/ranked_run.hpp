#pragma once

#include <string>
#include <utility>
#include <vector>

namespace rrscale {

struct RunEntry {
  std::string doc_id;
  double score = 0.0;
  int rank = 0;  // 1-based

  bool operator==(const RunEntry&) const = default;
};

/// One query's ranked candidate list: scores non-increasing with rank, ranks 1..n, distinct docs.
struct RankedRun {
  std::string query_id;
  std::vector<RunEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool operator==(const RankedRun&) const = default;
};

/// Sorts (doc_id, score) pairs by descending score, ties by ascending doc_id, and assigns ranks.
RankedRun make_ranked_run(std::string query_id, std::vector<std::pair<std::string, double>> scored);

/// Throws ValidationError (line 0) naming the query when an invariant is broken.
void validate_run(const RankedRun& run);

}  // namespace rrscale
