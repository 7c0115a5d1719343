#include "rrscale/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "rrscale/errors.hpp"
#include "rrscale/losses.hpp"
#include "rrscale/rng.hpp"

namespace rrscale {

namespace metric {

bool is_known(std::string_view name) {
  return std::find(std::begin(kAll), std::end(kAll), name) != std::end(kAll);
}

bool is_bounded(std::string_view name) { return name != kCe; }

bool higher_is_better(std::string_view name) { return name != kCe; }

}  // namespace metric

namespace {

double gain(int grade) { return std::exp2(static_cast<double>(grade)) - 1.0; }

double discount(std::size_t rank) { return 1.0 / std::log2(static_cast<double>(rank) + 1.0); }

}  // namespace

double ndcg_at_k(const RankedRun& run, const Qrels& qrels, int k) {
  if (k < 1) {
    throw ArgumentError("ndcg cutoff must be >= 1, got " + std::to_string(k));
  }
  const auto cutoff = static_cast<std::size_t>(k);
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(cutoff, run.entries.size()); ++i) {
    dcg += gain(qrels.grade(run.query_id, run.entries[i].doc_id)) * discount(i + 1);
  }
  std::vector<int> ideal;
  for (const auto& [doc, g] : qrels.judgments(run.query_id)) {
    ideal.push_back(g);
  }
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(cutoff, ideal.size()); ++i) {
    idcg += gain(ideal[i]) * discount(i + 1);
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

double average_precision(const RankedRun& run, const Qrels& qrels) {
  const std::size_t relevant = qrels.num_positives(run.query_id);
  if (relevant == 0) {
    return 0.0;
  }
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < run.entries.size(); ++i) {
    if (qrels.grade(run.query_id, run.entries[i].doc_id) > 0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(relevant);
}

double reciprocal_rank(const RankedRun& run, const Qrels& qrels) {
  for (std::size_t i = 0; i < run.entries.size(); ++i) {
    if (qrels.grade(run.query_id, run.entries[i].doc_id) > 0) {
      return 1.0 / static_cast<double>(i + 1);
    }
  }
  return 0.0;
}

double mean_average_precision(std::span<const RankedRun> runs, const Qrels& qrels) {
  if (runs.empty()) {
    return 0.0;
  }
  double total = 0.0;
  for (const auto& run : runs) {
    total += average_precision(run, qrels);
  }
  return total / static_cast<double>(runs.size());
}

double mean_reciprocal_rank(std::span<const RankedRun> runs, const Qrels& qrels) {
  if (runs.empty()) {
    return 0.0;
  }
  double total = 0.0;
  for (const auto& run : runs) {
    total += reciprocal_rank(run, qrels);
  }
  return total / static_cast<double>(runs.size());
}

std::vector<double> normalize_scores(std::span<const double> scores) {
  if (scores.size() < 2) {
    throw PreconditionError("normalize_scores needs at least 2 scores");
  }
  const auto n = static_cast<double>(scores.size());
  double mean = 0.0;
  for (double s : scores) {
    mean += s;
  }
  mean /= n;
  double var = 0.0;
  for (double s : scores) {
    var += (s - mean) * (s - mean);
  }
  const double sd = std::sqrt(var / n);
  std::vector<double> out(scores.size(), 0.0);
  if (sd < 1e-12) {
    return out;
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = (scores[i] - mean) / sd;
  }
  return out;
}

double contrastive_entropy(double positive_score, std::span<const double> negative_scores) {
  if (negative_scores.empty()) {
    return 0.0;
  }
  std::vector<double> all;
  all.reserve(negative_scores.size() + 1);
  all.push_back(positive_score);
  all.insert(all.end(), negative_scores.begin(), negative_scores.end());
  return log_sum_exp(all) - positive_score;
}

std::optional<double> contrastive_entropy_from_scores(const RankedRun& candidates,
                                                      std::span<const double> scores,
                                                      const Qrels& qrels, int n_negatives,
                                                      std::uint64_t seed) {
  if (scores.size() != candidates.entries.size()) {
    throw ShapeError("one score per candidate required");
  }
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < candidates.entries.size(); ++i) {
    const int g = qrels.grade(candidates.query_id, candidates.entries[i].doc_id);
    (g > 0 ? positives : negatives).push_back(i);
  }
  if (positives.empty()) {
    return std::nullopt;
  }
  Rng rng(derive_seed(seed, candidates.query_id));
  const std::size_t take =
      std::min(negatives.size(), static_cast<std::size_t>(std::max(n_negatives, 0)));
  double total = 0.0;
  for (std::size_t p : positives) {
    std::vector<double> joint{scores[p]};
    for (std::size_t idx : rng.sample_without_replacement(negatives.size(), take)) {
      joint.push_back(scores[negatives[idx]]);
    }
    if (joint.size() < 2) {
      continue;  // no negatives: entropy 0
    }
    const auto z = normalize_scores(joint);
    total += contrastive_entropy(z[0], std::span<const double>(z).subspan(1));
  }
  return total / static_cast<double>(positives.size());
}

}  // namespace rrscale
