#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rrscale/batching.hpp"
#include "rrscale/bm25.hpp"
#include "rrscale/evaluation.hpp"
#include "rrscale/synth.hpp"
#include "rrscale/trainer.hpp"

namespace rrscale {

/// Flat `[section]` / `key = value` text. `#` and `;` start comments.
/// Keys are stored as `section.key`. Throws ParseError on malformed lines and duplicate keys.
std::map<std::string, std::string, std::less<>> parse_ini(std::string_view text,
                                                          std::string_view source = "<config>");

struct RunConfig {
  BenchmarkConfig benchmark;
  double eval_fraction = 0.25;

  Bm25Params bm25;
  int run_depth = 100;  // candidates kept per query in the first-stage run

  std::vector<Objective> objectives{kAllObjectives[0], kAllObjectives[1], kAllObjectives[2]};
  int scorer_depth = 2;
  std::vector<int> widths{6, 12, 24, 48, 96, 192};
  Schedule schedule;
  BatchConfig batch;
  std::uint64_t sweep_seed = 11;
  EvalOptions eval;

  int holdout = 5;
  std::vector<std::string> metrics{"ndcg@10", "map", "mrr", "ce"};
  std::string dataset = "synthetic";
  std::string run_tag = "toy";

  /// Throws ConfigError naming the first offending key.
  void validate() const;

  /// Scorer for one width of the grid. The init seed depends on the sweep seed and width only,
  /// so the three objectives start from identical weights.
  ScorerConfig scorer_config(int width) const;
  /// Seed of the training batch stream, shared by every width of an objective.
  std::uint64_t data_seed(Objective objective) const;
  /// Parameter counts of the size grid (strictly increasing once validated).
  std::vector<std::int64_t> size_grid() const;

  /// `--seed` overrides both the benchmark and sweep seeds.
  void override_seed(std::uint64_t seed);
};

/// Unknown sections or keys raise ConfigError naming them.
RunConfig parse_run_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);
/// Canonical text form; parse_run_config(format_run_config(c)) == c field for field.
std::string format_run_config(const RunConfig& config);

}  // namespace rrscale
