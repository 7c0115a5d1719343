#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rrscale/features.hpp"
#include "rrscale/rng.hpp"

namespace rrscale {

enum class Objective { Pointwise, Pairwise, Listwise };

std::string_view to_string(Objective objective);
/// Throws ArgumentError for unknown names.
Objective parse_objective(std::string_view name);
inline constexpr Objective kAllObjectives[] = {Objective::Pointwise, Objective::Pairwise,
                                               Objective::Listwise};

struct BatchConfig {
  int pointwise_batch_size = 128;
  int pointwise_negatives_per_positive = 4;
  int queries_per_batch = 16;
  int negatives_per_query = 10;
  int candidate_depth = 100;  // negatives come from this many first-stage candidates

  void validate() const;
  /// Examples consumed per step: 128 (pointwise) or queries x negatives = 160 (pair/listwise).
  int effective_batch_size(Objective objective) const;
};

struct PointwiseInstance {
  std::string query_id;
  std::string doc_id;
  int label = 0;

  bool operator==(const PointwiseInstance&) const = default;
};

struct PairwiseInstance {
  std::string query_id;
  std::string positive;
  std::string negative;

  bool operator==(const PairwiseInstance&) const = default;
};

struct ListwiseInstance {
  std::string query_id;
  std::vector<std::string> docs;
  std::vector<int> grades;

  bool operator==(const ListwiseInstance&) const = default;
};

/// One training batch. Exactly one of the three instance vectors is populated.
struct Batch {
  Objective objective = Objective::Pointwise;
  std::vector<PointwiseInstance> pointwise;
  std::vector<PairwiseInstance> pairwise;
  std::vector<ListwiseInstance> listwise;

  bool operator==(const Batch&) const = default;
};

/// Endless seeded stream of training batches over the training queries.
///
/// Queries are visited in a seeded shuffled order that is reshuffled at every pass. For each
/// visited query one positive (grade > 0, uniform over judged positives) is drawn together with
/// negatives sampled uniformly without replacement from the grade-0 docs among the query's top
/// `candidate_depth` first-stage candidates; when fewer than needed exist, they are sampled
/// with replacement.
class BatchStream {
 public:
  BatchStream(Objective objective, const RankingData& data, const BatchConfig& config,
              std::uint64_t seed);

  Batch next();

 private:
  struct QueryPool {
    std::string query_id;
    std::vector<std::string> positives;
    std::vector<int> positive_grades;
    std::vector<std::string> negatives;
  };

  const QueryPool& next_query();
  std::vector<std::size_t> draw_negatives(const QueryPool& pool, std::size_t count);

  Objective objective_;
  BatchConfig config_;
  Rng rng_;
  std::vector<QueryPool> pools_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

}  // namespace rrscale
