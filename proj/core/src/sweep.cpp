#include "rrscale/sweep.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "rrscale/errors.hpp"
#include "rrscale/evaluation.hpp"
#include "rrscale/trainer.hpp"

namespace rrscale {

std::vector<SweepRun> sweep_grid(const RunConfig& config) {
  std::vector<SweepRun> grid;
  for (auto objective : config.objectives) {
    for (int w : config.widths) {
      grid.push_back({objective, w, param_count(config.scorer_config(w))});
    }
  }
  return grid;
}

std::vector<LedgerRecord> checkpoint_records(const RunConfig& config, const SweepRun& run,
                                             int step, std::int64_t examples,
                                             const MetricReport& report) {
  std::vector<LedgerRecord> out;
  for (const auto& [name, value] : report.values) {
    LedgerRecord r;
    r.objective = std::string(to_string(run.objective));
    r.model_params = run.model_params;
    r.step = step;
    r.examples_consumed = examples;
    r.metric = name;
    r.value = round_to_ledger(value);
    r.dataset = config.dataset;
    r.run_tag = config.run_tag;
    out.push_back(std::move(r));
  }
  return out;
}

std::filesystem::path shard_path(const Workspace& ws, const SweepRun& run) {
  return ws.shards() / fmt::format("{}_M{}.txt", to_string(run.objective), run.model_params);
}

std::filesystem::path checkpoint_path(const Workspace& ws, const SweepRun& run, int step) {
  return ws.checkpoints() /
         fmt::format("{}_M{}_S{}.txt", to_string(run.objective), run.model_params, step);
}

std::vector<LedgerRecord> execute_run(const RunConfig& config, const RankingData& data,
                                      const SweepRun& run,
                                      const std::filesystem::path& checkpoint_dir) {
  EvalOptions eval = config.eval;
  eval.seed = derive_seed(config.sweep_seed, "ce");
  const int final_step = config.schedule.n_steps;
  std::vector<LedgerRecord> records;
  train_run(run.objective, config.scorer_config(run.width), data, config.schedule, config.batch,
            config.data_seed(run.objective), [&](const Checkpoint& ck) {
              const auto report = evaluate_checkpoint(ck.scorer, data, eval);
              auto recs = checkpoint_records(config, run, ck.step, ck.examples_consumed, report);
              records.insert(records.end(), recs.begin(), recs.end());
              if (!checkpoint_dir.empty() && ck.step == final_step) {
                ck.scorer.save(checkpoint_dir / fmt::format("{}_M{}_S{}.txt",
                                                            to_string(run.objective),
                                                            run.model_params, ck.step));
              }
            });
  return records;
}

namespace {

// Number of records a finished run contributes: every metric at every checkpoint.
std::size_t expected_records(const RunConfig& config) {
  return static_cast<std::size_t>(config.schedule.n_checkpoints) * std::size(metric::kAll);
}

bool run_complete(const RunConfig& config, const SweepRun& run,
                  const std::vector<LedgerRecord>& ledger) {
  std::set<std::pair<std::int64_t, std::string>> have;
  const auto objective = to_string(run.objective);
  for (const auto& r : ledger) {
    if (r.objective == objective && r.model_params == run.model_params &&
        r.dataset == config.dataset) {
      have.emplace(r.step, r.metric);
    }
  }
  for (int step : config.schedule.checkpoint_steps()) {
    for (auto m : metric::kAll) {
      if (!have.contains({step, std::string(m)})) return false;
    }
  }
  return true;
}

}  // namespace

SweepSummary run_sweep(const RunConfig& config, const RankingData& data, const Workspace& ws,
                       const SweepOptions& options) {
  config.validate();
  if (data.feature_dim() != feature_dim_for(config.benchmark.latent_dim)) {
    throw ConfigError("benchmark.latent_dim",
                      fmt::format("workspace data has latent dimension {}", data.latent_dim()));
  }
  ws.ensure();
  std::filesystem::create_directories(ws.shards());
  if (options.save_checkpoints) std::filesystem::create_directories(ws.checkpoints());

  std::vector<LedgerRecord> ledger;
  if (options.resume) {
    ledger = read_ledger(ws.ledger());
  } else {
    std::filesystem::remove(ws.ledger());
  }

  const auto grid = sweep_grid(config);
  SweepSummary summary;
  summary.runs_total = static_cast<int>(grid.size());
  for (const auto& run : grid) {
    const auto label = fmt::format("{} width={} M={}", to_string(run.objective), run.width,
                                   run.model_params);
    if (options.resume && run_complete(config, run, ledger)) {
      ++summary.runs_skipped;
      if (options.log) options.log(fmt::format("skip  {} (complete in ledger)", label));
      continue;
    }
    auto records = execute_run(config, data, run,
                               options.save_checkpoints ? ws.checkpoints() : std::filesystem::path{});
    if (records.size() != expected_records(config)) {
      throw DataError(fmt::format("run {} produced {} records, expected {}", label, records.size(),
                                  expected_records(config)));
    }
    write_ledger(records, shard_path(ws, run));

    // Drop whatever a previous partial attempt left for this run, then merge the fresh shard.
    const auto objective = to_string(run.objective);
    std::erase_if(ledger, [&](const LedgerRecord& r) {
      return r.objective == objective && r.model_params == run.model_params &&
             r.dataset == config.dataset;
    });
    ledger = merge_records(ledger, records);
    write_ledger(ledger, ws.ledger());
    ++summary.runs_trained;
    if (options.log) options.log(fmt::format("train {} -> {} records", label, records.size()));
  }
  summary.records = ledger.size();
  return summary;
}

}  // namespace rrscale
