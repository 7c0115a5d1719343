#include "rrscale/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "rrscale/bm25.hpp"
#include "rrscale/errors.hpp"
#include "rrscale/rng.hpp"

namespace rrscale {

namespace {

constexpr double kDocBackgroundProb = 0.4;
constexpr double kQueryBackgroundProb = 0.1;
constexpr int kMaxQueryAttempts = 1000;

std::vector<double> unit_gaussian(int dim, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  double norm2 = 0.0;
  for (auto& x : v) {
    x = rng.normal();
    norm2 += x * x;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : v) {
    x *= inv;
  }
  return v;
}

std::vector<double> zipf_cdf(std::size_t n) {
  std::vector<double> cdf(n);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    total += 1.0 / static_cast<double>(r + 1);
    cdf[r] = total;
  }
  for (auto& c : cdf) {
    c /= total;
  }
  return cdf;
}

std::size_t draw(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.below(static_cast<std::size_t>(hi - lo + 1)));
}

}  // namespace

void BenchmarkConfig::validate() const {
  if (n_docs < 100) throw ConfigError("n_docs", "must be >= 100, got " + std::to_string(n_docs));
  if (n_queries < 10) {
    throw ConfigError("n_queries", "must be >= 10, got " + std::to_string(n_queries));
  }
  if (vocab_size < 1000) {
    throw ConfigError("vocab_size", "must be >= 1000, got " + std::to_string(vocab_size));
  }
  if (latent_dim < 1) throw ConfigError("latent_dim", "must be >= 1");
  if (hidden_width < 1) throw ConfigError("hidden_width", "must be >= 1");
  if (min_doc_length < 1 || max_doc_length < min_doc_length) {
    throw ConfigError("min_doc_length", "need 1 <= min_doc_length <= max_doc_length");
  }
  if (min_query_length < 1 || max_query_length < min_query_length) {
    throw ConfigError("min_query_length", "need 1 <= min_query_length <= max_query_length");
  }
  if (qrels_pool_depth < 1) throw ConfigError("qrels_pool_depth", "must be >= 1");
  if (qrels_random_docs < 0) throw ConfigError("qrels_random_docs", "must be >= 0");
}

// ---------------------------------------------------------------------------------------------
// TeacherModel

TeacherModel::TeacherModel(std::uint64_t seed, int latent_dim, int hidden_width)
    : seed_(seed), latent_dim_(latent_dim), hidden_width_(hidden_width) {
  if (latent_dim < 1 || hidden_width < 1) {
    throw ConfigError("latent_dim", "teacher dimensions must be positive");
  }
  Rng rng(derive_seed(seed, "teacher"));
  const auto in = static_cast<std::size_t>(input_dim());
  const auto hidden = static_cast<std::size_t>(hidden_width);
  const double w_scale = kInputGain / std::sqrt(static_cast<double>(in));
  input_weights_.resize(hidden * in);
  for (auto& w : input_weights_) {
    w = w_scale * rng.normal();
  }
  hidden_bias_.resize(hidden);
  for (auto& b : hidden_bias_) {
    b = 0.5 * rng.normal();
  }
  output_weights_.resize(hidden);
  const double v_scale = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (auto& v : output_weights_) {
    v = v_scale * rng.normal();
  }
}

TeacherModel TeacherModel::identity_like(int latent_dim) {
  TeacherModel t;
  t.seed_ = 0;
  t.latent_dim_ = latent_dim;
  t.hidden_width_ = 1;
  t.input_weights_.assign(static_cast<std::size_t>(2 * latent_dim), 0.0);
  t.hidden_bias_.assign(1, 0.0);
  t.output_weights_.assign(1, 0.0);
  t.similarity_weight_ = 1.0;
  t.thresholds_ = {0.25, 0.5, 0.9};
  return t;
}

double TeacherModel::signal(std::span<const double> q, std::span<const double> d) const {
  const auto dim = static_cast<std::size_t>(latent_dim_);
  if (q.size() != dim || d.size() != dim) {
    throw ShapeError(fmt::format("teacher expects latents of dimension {}, got {} and {}", dim,
                                 q.size(), d.size()));
  }
  const double product_scale = static_cast<double>(latent_dim_);
  const double diff_scale = std::sqrt(static_cast<double>(latent_dim_));
  std::vector<double> x(2 * dim);
  double dot = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    x[i] = product_scale * q[i] * d[i];
    x[dim + i] = diff_scale * std::abs(q[i] - d[i]);
    dot += q[i] * d[i];
  }
  double out = 0.0;
  const std::size_t in = 2 * dim;
  for (std::size_t h = 0; h < static_cast<std::size_t>(hidden_width_); ++h) {
    double pre = hidden_bias_[h];
    const double* row = input_weights_.data() + h * in;
    for (std::size_t j = 0; j < in; ++j) {
      pre += row[j] * x[j];
    }
    out += output_weights_[h] * std::tanh(pre);
  }
  return out + similarity_weight_ * dot;
}

int TeacherModel::quantize(double signal) const {
  int g = 0;
  for (double t : thresholds_) {
    g += signal >= t ? 1 : 0;
  }
  return g;
}

void TeacherModel::set_thresholds(const std::array<double, 3>& thresholds) {
  if (!(thresholds[0] <= thresholds[1] && thresholds[1] <= thresholds[2])) {
    throw ArgumentError("teacher thresholds must be non-decreasing");
  }
  thresholds_ = thresholds;
}

int grade(const TeacherModel& teacher, const SynthQuery& query, const SynthDoc& doc) {
  return teacher.quantize(teacher.signal(query.latent, doc.latent));
}

// ---------------------------------------------------------------------------------------------
// TopicModel

TopicModel::TopicModel(std::uint64_t seed, int latent_dim, int vocab_size)
    : latent_dim_(latent_dim),
      vocab_size_(vocab_size),
      temperature_(3.0 * std::sqrt(static_cast<double>(latent_dim))) {
  Rng rng(derive_seed(seed, "topics"));
  std::vector<int> terms(static_cast<std::size_t>(vocab_size));
  for (int i = 0; i < vocab_size; ++i) {
    terms[static_cast<std::size_t>(i)] = i;
  }
  rng.shuffle(terms);

  const auto n_topics = static_cast<std::size_t>(2 * latent_dim);
  const std::size_t n_background = terms.size() / 10;
  const std::size_t block = (terms.size() - n_background) / n_topics;
  background_terms_.assign(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(n_background));
  background_cdf_ = zipf_cdf(background_terms_.size());
  for (std::size_t k = 0; k < n_topics; ++k) {
    const auto first = terms.begin() + static_cast<std::ptrdiff_t>(n_background + k * block);
    topic_terms_.emplace_back(first, first + static_cast<std::ptrdiff_t>(block));
    topic_cdfs_.push_back(zipf_cdf(block));
  }
}

std::vector<double> TopicModel::topic_weights(std::span<const double> latent) const {
  const auto dim = static_cast<std::size_t>(latent_dim_);
  std::vector<double> logits(2 * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    logits[i] = temperature_ * latent[i];
    logits[dim + i] = -temperature_ * latent[i];
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (auto& l : logits) {
    l = std::exp(l - m);
    total += l;
  }
  for (auto& l : logits) {
    l /= total;
  }
  return logits;
}

std::vector<int> TopicModel::sample_tokens(std::span<const double> latent, int length,
                                           double background_prob, Rng& rng) const {
  const auto weights = topic_weights(latent);
  std::vector<double> topic_cdf(weights.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    topic_cdf[k] = acc;
  }
  std::vector<int> tokens;
  tokens.reserve(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) {
    if (rng.uniform() < background_prob) {
      tokens.push_back(background_terms_[draw(background_cdf_, rng.uniform())]);
    } else {
      const std::size_t k = draw(topic_cdf, rng.uniform() * acc);
      tokens.push_back(topic_terms_[k][draw(topic_cdfs_[k], rng.uniform())]);
    }
  }
  return tokens;
}

// ---------------------------------------------------------------------------------------------
// Generation

std::string format_doc_id(int index) { return fmt::format("d{:07d}", index); }
std::string format_query_id(int index) { return fmt::format("q{:06d}", index); }

SynthQuery make_query(const BenchmarkConfig& config, const TopicModel& topics, int index,
                      int attempt) {
  Rng rng(derive_seed(derive_seed(config.seed, "query", static_cast<std::uint64_t>(index)),
                      "attempt", static_cast<std::uint64_t>(attempt)));
  SynthQuery q;
  q.query_id = format_query_id(index);
  q.latent = unit_gaussian(config.latent_dim, rng);
  const int length = uniform_int(rng, config.min_query_length, config.max_query_length);
  q.tokens = topics.sample_tokens(q.latent, length, kQueryBackgroundProb, rng);
  return q;
}

Benchmark generate_benchmark(const BenchmarkConfig& config) {
  config.validate();
  Benchmark bench{config,
                  {},
                  {},
                  TeacherModel(config.seed, config.latent_dim, config.hidden_width),
                  TopicModel(config.seed, config.latent_dim, config.vocab_size)};

  bench.corpus.reserve(static_cast<std::size_t>(config.n_docs));
  for (int i = 0; i < config.n_docs; ++i) {
    Rng rng(derive_seed(config.seed, "doc", static_cast<std::uint64_t>(i)));
    SynthDoc d;
    d.doc_id = format_doc_id(i);
    d.latent = unit_gaussian(config.latent_dim, rng);
    const int length = uniform_int(rng, config.min_doc_length, config.max_doc_length);
    d.tokens = bench.topics.sample_tokens(d.latent, length, kDocBackgroundProb, rng);
    bench.corpus.push_back(std::move(d));
  }
  bench.queries.reserve(static_cast<std::size_t>(config.n_queries));
  for (int i = 0; i < config.n_queries; ++i) {
    bench.queries.push_back(make_query(config, bench.topics, i, 0));
  }

  Rng rng(derive_seed(config.seed, "calibration"));
  std::vector<double> sample(kCalibrationPairs);
  for (auto& t : sample) {
    const auto& q = bench.queries[rng.below(bench.queries.size())];
    const auto& d = bench.corpus[rng.below(bench.corpus.size())];
    t = bench.teacher.signal(q.latent, d.latent);
  }
  std::sort(sample.begin(), sample.end());
  std::array<double, 3> thresholds{};
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    const auto pos = static_cast<std::size_t>(kGradePercentiles[i] * static_cast<double>(sample.size()));
    thresholds[i] = sample[std::min(pos, sample.size() - 1)];
  }
  bench.teacher.set_thresholds(thresholds);
  return bench;
}

Qrels build_qrels(Benchmark& bench) {
  const auto& config = bench.config;
  const auto index = InvertedIndex::build(std::span<const SynthDoc>(bench.corpus));
  std::vector<std::uint32_t> by_dense(bench.corpus.size());
  for (std::size_t i = 0; i < bench.corpus.size(); ++i) {
    by_dense[*index.find_doc(bench.corpus[i].doc_id)] = static_cast<std::uint32_t>(i);
  }

  Qrels qrels;
  for (std::size_t qi = 0; qi < bench.queries.size(); ++qi) {
    for (int attempt = 0;; ++attempt) {
      if (attempt >= kMaxQueryAttempts) {
        throw DataError("query " + bench.queries[qi].query_id + " has no positive after " +
                        std::to_string(kMaxQueryAttempts) + " regenerations");
      }
      if (attempt > 0) {
        bench.queries[qi] = make_query(config, bench.topics, static_cast<int>(qi), attempt);
      }
      const auto& query = bench.queries[qi];
      const auto top = index.retrieve_topk(query.query_id, query.tokens, config.qrels_pool_depth);
      std::set<std::uint32_t> pool;
      for (const auto& e : top.entries) {
        pool.insert(by_dense[*index.find_doc(e.doc_id)]);
      }
      Rng rng(derive_seed(derive_seed(config.seed, "pool", qi), "attempt",
                          static_cast<std::uint64_t>(attempt)));
      const std::size_t wanted =
          std::min(pool.size() + static_cast<std::size_t>(config.qrels_random_docs),
                   bench.corpus.size());
      while (pool.size() < wanted) {
        pool.insert(static_cast<std::uint32_t>(rng.below(bench.corpus.size())));
      }

      Qrels::Judgments judged;
      bool any_positive = false;
      for (const auto di : pool) {
        const int g = grade(bench.teacher, query, bench.corpus[di]);
        judged.emplace(bench.corpus[di].doc_id, g);
        any_positive = any_positive || g > 0;
      }
      if (any_positive) {
        for (const auto& [doc, g] : judged) {
          qrels.set(query.query_id, doc, g);
        }
        break;
      }
    }
  }
  return qrels;
}

}  // namespace rrscale
