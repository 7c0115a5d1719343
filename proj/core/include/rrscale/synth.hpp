#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rrscale/corpus.hpp"
#include "rrscale/qrels.hpp"
#include "rrscale/rng.hpp"

namespace rrscale {

struct BenchmarkConfig {
  int n_docs = 1000;
  int n_queries = 50;
  int vocab_size = 2000;
  int latent_dim = 16;
  int hidden_width = 64;
  std::uint64_t seed = 7;

  int min_doc_length = 40;
  int max_doc_length = 120;
  int min_query_length = 3;
  int max_query_length = 8;

  // Judgment pool per query: BM25 top-`qrels_pool_depth` plus `qrels_random_docs` random docs.
  int qrels_pool_depth = 200;
  int qrels_random_docs = 50;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Fixed two-layer relevance teacher.
///
/// signal(q, d) = v . tanh(W x + c) + similarity_weight * <q, d>, where
/// x = [L * (q o d), sqrt(L) * |q - d|] is the scaled interaction of the two latents.
/// Grades quantize the signal against three thresholds.
class TeacherModel {
 public:
  static constexpr double kDefaultSimilarityWeight = 2.0;
  static constexpr double kInputGain = 1.5;

  TeacherModel(std::uint64_t seed, int latent_dim, int hidden_width);

  /// Teacher with zero hidden weights and unit similarity weight: signal = <q, d>.
  static TeacherModel identity_like(int latent_dim);

  double signal(std::span<const double> query_latent, std::span<const double> doc_latent) const;
  /// Number of thresholds the signal reaches: 0..3.
  int quantize(double signal) const;

  void set_thresholds(const std::array<double, 3>& thresholds);
  const std::array<double, 3>& thresholds() const { return thresholds_; }

  std::uint64_t seed() const { return seed_; }
  int latent_dim() const { return latent_dim_; }
  int hidden_width() const { return hidden_width_; }
  int input_dim() const { return 2 * latent_dim_; }
  /// Row-major hidden_width x input_dim.
  const std::vector<double>& input_weights() const { return input_weights_; }
  const std::vector<double>& hidden_bias() const { return hidden_bias_; }
  const std::vector<double>& output_weights() const { return output_weights_; }
  double similarity_weight() const { return similarity_weight_; }

  bool operator==(const TeacherModel&) const = default;

 private:
  TeacherModel() = default;

  std::uint64_t seed_ = 0;
  int latent_dim_ = 0;
  int hidden_width_ = 0;
  std::vector<double> input_weights_;
  std::vector<double> hidden_bias_;
  std::vector<double> output_weights_;
  double similarity_weight_ = kDefaultSimilarityWeight;
  std::array<double, 3> thresholds_{0.0, 0.0, 0.0};
};

/// Lexical generator: term distributions conditioned on a latent through softmax topic weights.
///
/// There are 2L topics, one per signed latent axis; each owns a disjoint block of the vocabulary
/// with Zipfian term weights, and a shared background block supplies common words.
class TopicModel {
 public:
  TopicModel(std::uint64_t seed, int latent_dim, int vocab_size);

  std::vector<int> sample_tokens(std::span<const double> latent, int length,
                                 double background_prob, Rng& rng) const;

  int n_topics() const { return static_cast<int>(topic_cdfs_.size()); }
  int vocab_size() const { return vocab_size_; }
  std::vector<double> topic_weights(std::span<const double> latent) const;

 private:
  int latent_dim_ = 0;
  int vocab_size_ = 0;
  double temperature_ = 1.0;
  std::vector<int> background_terms_;
  std::vector<double> background_cdf_;
  std::vector<std::vector<int>> topic_terms_;
  std::vector<std::vector<double>> topic_cdfs_;
};

struct Benchmark {
  BenchmarkConfig config;
  std::vector<SynthDoc> corpus;
  std::vector<SynthQuery> queries;
  TeacherModel teacher;
  TopicModel topics;
};

/// Deterministic in config (including seed). Teacher thresholds are calibrated at the
/// 80th/93rd/99th percentiles of the signal over a seeded sample of random (query, doc) pairs.
Benchmark generate_benchmark(const BenchmarkConfig& config);

/// Throws ShapeError when a latent's dimension differs from the teacher's.
int grade(const TeacherModel& teacher, const SynthQuery& query, const SynthDoc& doc);

/// Grades each query's judgment pool (BM25 top-200 plus 50 random docs). Queries without any
/// positive are regenerated in place (fresh latent and tokens) until they have one.
Qrels build_qrels(Benchmark& benchmark);

/// Regenerates query `index` using resampling attempt `attempt` (attempt 0 is the original).
SynthQuery make_query(const BenchmarkConfig& config, const TopicModel& topics, int index,
                      int attempt);

std::string format_doc_id(int index);
std::string format_query_id(int index);

/// Calibration percentiles for grades 1, 2 and 3.
inline constexpr std::array<double, 3> kGradePercentiles{0.80, 0.93, 0.99};
inline constexpr int kCalibrationPairs = 20000;

}  // namespace rrscale
