#pragma once

#include <filesystem>
#include <memory>

#include "rrscale/features.hpp"
#include "rrscale/run_config.hpp"

namespace rrscale {

/// File layout of an experiment directory.
struct Workspace {
  std::filesystem::path root;

  explicit Workspace(std::filesystem::path dir) : root(std::move(dir)) {}

  std::filesystem::path corpus() const { return root / "corpus.tsv"; }
  std::filesystem::path doc_latents() const { return root / "doc_latents.tsv"; }
  std::filesystem::path queries() const { return root / "queries.tsv"; }
  std::filesystem::path query_latents() const { return root / "query_latents.tsv"; }
  std::filesystem::path qrels() const { return root / "qrels.txt"; }
  std::filesystem::path split() const { return root / "split.tsv"; }
  std::filesystem::path first_stage_run() const { return root / "bm25.run"; }
  std::filesystem::path ledger() const { return root / "ledger.txt"; }
  std::filesystem::path shards() const { return root / "shards"; }
  std::filesystem::path checkpoints() const { return root / "checkpoints"; }
  std::filesystem::path forecasts() const { return root / "forecasts"; }
  std::filesystem::path forecast_table() const { return root / "forecast_table.txt"; }
  std::filesystem::path report() const { return root / "report"; }

  /// Creates the directory (and parents); throws DataError if it is not writable.
  void ensure() const;
};

struct SynthSummary {
  std::size_t n_docs = 0;
  std::size_t n_queries = 0;
  std::size_t n_judgments = 0;
  std::size_t n_positive = 0;
  std::size_t n_train = 0;
  std::size_t n_eval = 0;
};

/// Generates the benchmark, grades the judgment pools and writes corpus, queries, latents,
/// qrels and the train/eval split.
SynthSummary synthesize(const RunConfig& config, const Workspace& ws);

/// Builds the BM25 index over the stored corpus and writes each query's top `run_depth`.
std::size_t build_first_stage(const RunConfig& config, const Workspace& ws);

/// Loads everything written by `synthesize` and `build_first_stage`.
std::unique_ptr<RankingData> load_ranking_data(const RunConfig& config, const Workspace& ws);

}  // namespace rrscale
