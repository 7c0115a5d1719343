#include "rrscale/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "rrscale/errors.hpp"
#include "rrscale/metrics.hpp"
#include "rrscale/trec_io.hpp"

namespace rrscale {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    const auto item = trim(s.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Struct field names that differ from their config keys.
std::string config_key(std::string_view section, const std::string& field) {
  static const std::map<std::string, std::string, std::less<>> renamed = {
      {"n_steps", "steps"},
      {"n_checkpoints", "checkpoints"},
      {"pointwise_negatives_per_positive", "pointwise_negatives"},
  };
  const auto it = renamed.find(field);
  return std::string(section) + "." + (it == renamed.end() ? field : it->second);
}

}  // namespace

std::map<std::string, std::string, std::less<>> parse_ini(std::string_view text,
                                                          std::string_view source) {
  const std::string src(source);
  std::map<std::string, std::string, std::less<>> out;
  std::string section;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ParseError(src, lineno, "malformed section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(src, lineno, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(src, lineno, "empty key");
    if (section.empty()) throw ParseError(src, lineno, "key outside any [section]");
    auto full = section + "." + std::string(key);
    if (out.contains(full)) throw ParseError(src, lineno, fmt::format("duplicate key {}", full));
    out.emplace(std::move(full), std::string(value));
  }
  return out;
}

void RunConfig::validate() const {
  try {
    benchmark.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(config_key("benchmark", e.field()), e.reason());
  }
  if (!(eval_fraction > 0.0 && eval_fraction < 1.0)) {
    throw ConfigError("benchmark.eval_fraction", "must be in (0, 1)");
  }
  if (!(bm25.k1 >= 0.0)) throw ConfigError("index.k1", "must be non-negative");
  if (!(bm25.b >= 0.0 && bm25.b <= 1.0)) throw ConfigError("index.b", "must be in [0, 1]");
  if (run_depth < 1) throw ConfigError("index.run_depth", "must be at least 1");
  if (objectives.empty()) throw ConfigError("sweep.objectives", "must list at least one objective");
  if (std::set<Objective>(objectives.begin(), objectives.end()).size() != objectives.size()) {
    throw ConfigError("sweep.objectives", "lists an objective twice");
  }
  if (scorer_depth < 1) throw ConfigError("sweep.depth", "must be at least 1");
  if (widths.size() < 2) throw ConfigError("sweep.widths", "a sweep needs at least two widths");
  for (int w : widths) {
    if (w < 1) throw ConfigError("sweep.widths", "widths must be positive");
  }
  const auto sizes = size_grid();
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) {
      throw ConfigError("sweep.widths", "size grid must be strictly increasing in param count");
    }
  }
  try {
    schedule.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(config_key("sweep", e.field()), e.reason());
  }
  try {
    batch.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(config_key("sweep", e.field()), e.reason());
  }
  if (batch.candidate_depth > run_depth) {
    throw ConfigError("sweep.candidate_depth", "exceeds index.run_depth");
  }
  if (eval.ndcg_cutoff < 1) throw ConfigError("sweep.ndcg_cutoff", "must be at least 1");
  if (eval.candidate_depth < 1 || eval.candidate_depth > run_depth) {
    throw ConfigError("sweep.eval_depth", "must be in [1, index.run_depth]");
  }
  if (eval.ce_negatives < 1) throw ConfigError("sweep.ce_negatives", "must be at least 1");
  if (holdout < 1) throw ConfigError("fit.holdout", "must be at least 1");
  if (metrics.empty()) throw ConfigError("fit.metrics", "must list at least one metric");
  for (const auto& m : metrics) {
    if (!metric::is_known(m)) throw ConfigError("fit.metrics", fmt::format("unknown metric {}", m));
  }
  auto token = [](const std::string& s) {
    return !s.empty() && s.find_first_of(" \t\r\n") == std::string::npos;
  };
  if (!token(dataset)) throw ConfigError("output.dataset", "must be a single token");
  if (!token(run_tag)) throw ConfigError("output.tag", "must be a single token");
}

ScorerConfig RunConfig::scorer_config(int width) const {
  ScorerConfig c;
  c.width = width;
  c.depth = scorer_depth;
  c.feature_dim = feature_dim_for(benchmark.latent_dim);
  c.seed = derive_seed(sweep_seed, "init", static_cast<std::uint64_t>(width));
  return c;
}

std::uint64_t RunConfig::data_seed(Objective objective) const {
  return derive_seed(sweep_seed, std::string("batches/") + std::string(to_string(objective)));
}

std::vector<std::int64_t> RunConfig::size_grid() const {
  std::vector<std::int64_t> out;
  for (int w : widths) out.push_back(param_count(scorer_config(w)));
  return out;
}

void RunConfig::override_seed(std::uint64_t seed) {
  benchmark.seed = seed;
  sweep_seed = seed;
}

namespace {

class Reader {
 public:
  explicit Reader(std::map<std::string, std::string, std::less<>> kv) : kv_(std::move(kv)) {}

  template <typename T>
  void read(const std::string& key, T& out) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return;
    used_.insert(key);
    out = convert<T>(key, it->second);
  }

  bool has(const std::string& key) const { return kv_.contains(key); }

  void check_unused() const {
    for (const auto& [k, v] : kv_) {
      if (!used_.contains(k)) throw ConfigError(k, "unknown key");
    }
  }

 private:
  template <typename T>
  static T convert(const std::string& key, const std::string& value) {
    if constexpr (std::is_same_v<T, std::string>) {
      return value;
    } else if constexpr (std::is_same_v<T, double>) {
      double d = 0.0;
      if (!parse_double(value, d)) throw ConfigError(key, fmt::format("'{}' is not a number", value));
      return d;
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      long long v = 0;
      if (!parse_int(value, v) || v < 0) {
        throw ConfigError(key, fmt::format("'{}' is not a non-negative integer", value));
      }
      return static_cast<std::uint64_t>(v);
    } else if constexpr (std::is_same_v<T, int>) {
      long long v = 0;
      if (!parse_int(value, v) || v < INT32_MIN || v > INT32_MAX) {
        throw ConfigError(key, fmt::format("'{}' is not an integer", value));
      }
      return static_cast<int>(v);
    } else if constexpr (std::is_same_v<T, std::vector<int>>) {
      std::vector<int> out;
      for (const auto& item : split_list(value)) out.push_back(convert<int>(key, item));
      return out;
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      return split_list(value);
    } else {
      static_assert(sizeof(T) == 0, "unsupported config type");
    }
  }

  std::map<std::string, std::string, std::less<>> kv_;
  std::set<std::string> used_;
};

}  // namespace

RunConfig parse_run_config(std::string_view text, std::string_view source) {
  Reader r(parse_ini(text, source));
  RunConfig c;
  auto& b = c.benchmark;
  r.read("benchmark.n_docs", b.n_docs);
  r.read("benchmark.n_queries", b.n_queries);
  r.read("benchmark.vocab_size", b.vocab_size);
  r.read("benchmark.latent_dim", b.latent_dim);
  r.read("benchmark.hidden_width", b.hidden_width);
  r.read("benchmark.seed", b.seed);
  r.read("benchmark.min_doc_length", b.min_doc_length);
  r.read("benchmark.max_doc_length", b.max_doc_length);
  r.read("benchmark.min_query_length", b.min_query_length);
  r.read("benchmark.max_query_length", b.max_query_length);
  r.read("benchmark.qrels_pool_depth", b.qrels_pool_depth);
  r.read("benchmark.qrels_random_docs", b.qrels_random_docs);
  r.read("benchmark.eval_fraction", c.eval_fraction);

  r.read("index.k1", c.bm25.k1);
  r.read("index.b", c.bm25.b);
  r.read("index.run_depth", c.run_depth);

  if (r.has("sweep.objectives")) {
    std::vector<std::string> objectives;
    r.read("sweep.objectives", objectives);
    c.objectives.clear();
    for (const auto& o : objectives) {
      try {
        c.objectives.push_back(parse_objective(o));
      } catch (const ArgumentError&) {
        throw ConfigError("sweep.objectives", fmt::format("unknown objective '{}'", o));
      }
    }
  }
  r.read("sweep.depth", c.scorer_depth);
  r.read("sweep.widths", c.widths);
  r.read("sweep.steps", c.schedule.n_steps);
  r.read("sweep.checkpoints", c.schedule.n_checkpoints);
  r.read("sweep.learning_rate", c.schedule.learning_rate);
  r.read("sweep.seed", c.sweep_seed);
  r.read("sweep.pointwise_batch_size", c.batch.pointwise_batch_size);
  r.read("sweep.pointwise_negatives", c.batch.pointwise_negatives_per_positive);
  r.read("sweep.queries_per_batch", c.batch.queries_per_batch);
  r.read("sweep.negatives_per_query", c.batch.negatives_per_query);
  r.read("sweep.candidate_depth", c.batch.candidate_depth);
  r.read("sweep.ndcg_cutoff", c.eval.ndcg_cutoff);
  r.read("sweep.eval_depth", c.eval.candidate_depth);
  r.read("sweep.ce_negatives", c.eval.ce_negatives);

  r.read("fit.holdout", c.holdout);
  r.read("fit.metrics", c.metrics);

  r.read("output.dataset", c.dataset);
  r.read("output.tag", c.run_tag);
  r.check_unused();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", fmt::format("cannot open {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.string());
}

std::string format_run_config(const RunConfig& c) {
  std::vector<std::string> objectives;
  for (auto o : c.objectives) objectives.emplace_back(to_string(o));
  const auto& b = c.benchmark;
  std::string s;
  s += "[benchmark]\n";
  s += fmt::format("n_docs = {}\nn_queries = {}\nvocab_size = {}\nlatent_dim = {}\n", b.n_docs,
                   b.n_queries, b.vocab_size, b.latent_dim);
  s += fmt::format("hidden_width = {}\nseed = {}\n", b.hidden_width, b.seed);
  s += fmt::format("min_doc_length = {}\nmax_doc_length = {}\n", b.min_doc_length,
                   b.max_doc_length);
  s += fmt::format("min_query_length = {}\nmax_query_length = {}\n", b.min_query_length,
                   b.max_query_length);
  s += fmt::format("qrels_pool_depth = {}\nqrels_random_docs = {}\n", b.qrels_pool_depth,
                   b.qrels_random_docs);
  s += fmt::format("eval_fraction = {}\n\n", c.eval_fraction);
  s += "[index]\n";
  s += fmt::format("k1 = {}\nb = {}\nrun_depth = {}\n\n", c.bm25.k1, c.bm25.b, c.run_depth);
  s += "[sweep]\n";
  s += fmt::format("objectives = {}\n", fmt::join(objectives, ","));
  s += fmt::format("depth = {}\nwidths = {}\n", c.scorer_depth, fmt::join(c.widths, ","));
  s += fmt::format("steps = {}\ncheckpoints = {}\nlearning_rate = {}\nseed = {}\n",
                   c.schedule.n_steps, c.schedule.n_checkpoints, c.schedule.learning_rate,
                   c.sweep_seed);
  s += fmt::format("pointwise_batch_size = {}\npointwise_negatives = {}\n",
                   c.batch.pointwise_batch_size, c.batch.pointwise_negatives_per_positive);
  s += fmt::format("queries_per_batch = {}\nnegatives_per_query = {}\ncandidate_depth = {}\n",
                   c.batch.queries_per_batch, c.batch.negatives_per_query,
                   c.batch.candidate_depth);
  s += fmt::format("ndcg_cutoff = {}\neval_depth = {}\nce_negatives = {}\n\n", c.eval.ndcg_cutoff,
                   c.eval.candidate_depth, c.eval.ce_negatives);
  s += "[fit]\n";
  s += fmt::format("holdout = {}\nmetrics = {}\n\n", c.holdout, fmt::join(c.metrics, ","));
  s += "[output]\n";
  s += fmt::format("dataset = {}\ntag = {}\n", c.dataset, c.run_tag);
  return s;
}

}  // namespace rrscale
