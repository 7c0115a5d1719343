#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rrscale/features.hpp"
#include "rrscale/ledger.hpp"
#include "rrscale/run_config.hpp"
#include "rrscale/workspace.hpp"

namespace rrscale {

/// One training run of the grid: an objective at one width.
struct SweepRun {
  Objective objective = Objective::Pointwise;
  int width = 0;
  std::int64_t model_params = 0;
};

std::vector<SweepRun> sweep_grid(const RunConfig& config);

/// Ledger records of one checkpoint evaluation, values rounded to ledger precision.
std::vector<LedgerRecord> checkpoint_records(const RunConfig& config, const SweepRun& run,
                                             int step, std::int64_t examples,
                                             const MetricReport& report);

/// Trains one run and evaluates every checkpoint on the eval queries.
/// `save_final` writes the last checkpoint's weights under `checkpoint_dir` when non-empty.
std::vector<LedgerRecord> execute_run(const RunConfig& config, const RankingData& data,
                                      const SweepRun& run,
                                      const std::filesystem::path& checkpoint_dir = {});

std::filesystem::path shard_path(const Workspace& ws, const SweepRun& run);
std::filesystem::path checkpoint_path(const Workspace& ws, const SweepRun& run, int step);

struct SweepOptions {
  bool resume = true;
  bool save_checkpoints = false;
  std::function<void(const std::string&)> log;
};

struct SweepSummary {
  int runs_total = 0;
  int runs_skipped = 0;
  int runs_trained = 0;
  std::size_t records = 0;
};

/// Runs the grid. Each finished run is written to its own shard and merged into the ledger
/// (sorted, replaced atomically). With `resume`, runs whose records are already complete in
/// the ledger are skipped; partial runs are retrained and their old records replaced.
/// Without `resume` the ledger and shards are rebuilt from scratch.
SweepSummary run_sweep(const RunConfig& config, const RankingData& data, const Workspace& ws,
                       const SweepOptions& options = {});

}  // namespace rrscale
