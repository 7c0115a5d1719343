#include "rrscale/workspace.hpp"

#include <fstream>

#include <fmt/format.h>

#include "rrscale/corpus_io.hpp"
#include "rrscale/errors.hpp"
#include "rrscale/synth.hpp"
#include "rrscale/trec_io.hpp"

namespace rrscale {

void Workspace::ensure() const {
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec || !std::filesystem::is_directory(root)) {
    throw DataError(fmt::format("cannot create output directory {}", root.string()));
  }
  const auto probe = root / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw DataError(fmt::format("output directory {} is not writable", root.string()));
  }
  std::filesystem::remove(probe, ec);
}

SynthSummary synthesize(const RunConfig& config, const Workspace& ws) {
  config.validate();
  ws.ensure();
  auto bench = generate_benchmark(config.benchmark);
  const Qrels qrels = build_qrels(bench);

  std::vector<std::string> ids;
  for (const auto& q : bench.queries) ids.push_back(q.query_id);
  const auto split = split_queries(ids, config.eval_fraction, config.benchmark.seed);

  write_docs(bench.corpus, ws.corpus(), ws.doc_latents());
  write_queries(bench.queries, ws.queries(), ws.query_latents());
  write_qrels(qrels, ws.qrels());
  write_split(split, ws.split());

  SynthSummary s;
  s.n_docs = bench.corpus.size();
  s.n_queries = bench.queries.size();
  s.n_judgments = qrels.num_judgments();
  for (const auto& qid : qrels.query_ids()) s.n_positive += qrels.num_positives(qid);
  s.n_train = split.train.size();
  s.n_eval = split.eval.size();
  return s;
}

std::size_t build_first_stage(const RunConfig& config, const Workspace& ws) {
  const auto docs = read_docs(ws.corpus(), ws.doc_latents());
  const auto queries = read_queries(ws.queries(), ws.query_latents());
  const auto index = InvertedIndex::build(std::span<const SynthDoc>(docs), config.bm25);
  std::vector<RankedRun> runs;
  runs.reserve(queries.size());
  for (const auto& q : queries) runs.push_back(index.retrieve_topk(q.query_id, q.tokens, config.run_depth));
  write_run(runs, ws.first_stage_run(), "bm25");
  return runs.size();
}

std::unique_ptr<RankingData> load_ranking_data(const RunConfig& config, const Workspace& ws) {
  for (const auto& p : {ws.corpus(), ws.queries(), ws.qrels(), ws.split(), ws.first_stage_run()}) {
    if (!std::filesystem::exists(p)) {
      throw DataError(fmt::format("{} is missing; run synth and index first", p.string()));
    }
  }
  auto docs = read_docs(ws.corpus(), ws.doc_latents());
  auto queries = read_queries(ws.queries(), ws.query_latents());
  auto qrels = read_qrels(ws.qrels());
  auto runs = read_run(ws.first_stage_run());
  auto split = read_split(ws.split());
  return std::make_unique<RankingData>(std::move(docs), std::move(queries), std::move(qrels),
                                       std::move(runs), std::move(split.train),
                                       std::move(split.eval), config.bm25);
}

}  // namespace rrscale
