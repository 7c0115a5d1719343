#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rrscale/corpus.hpp"

namespace rrscale {

/// Text files: `<id>\t<token> <token> ...` and `<id>\t<x1>,<x2>,...` (latents at 9 significant
/// digits).
/// Reading joins the two files by id and rejects mismatches with ParseError/DataError.
void write_docs(std::span<const SynthDoc> docs, const std::filesystem::path& text_path,
                const std::filesystem::path& latent_path);
std::vector<SynthDoc> read_docs(const std::filesystem::path& text_path,
                                const std::filesystem::path& latent_path);
void write_queries(std::span<const SynthQuery> queries, const std::filesystem::path& text_path,
                   const std::filesystem::path& latent_path);
std::vector<SynthQuery> read_queries(const std::filesystem::path& text_path,
                                     const std::filesystem::path& latent_path);

struct QuerySplit {
  std::vector<std::string> train;
  std::vector<std::string> eval;

  bool operator==(const QuerySplit&) const = default;
};

/// Seeded shuffle of the ids; the first round(eval_fraction * n) (at least 1) go to eval.
/// Both lists are returned sorted.
QuerySplit split_queries(std::vector<std::string> query_ids, double eval_fraction,
                         std::uint64_t seed);

/// `<qid>\ttrain` or `<qid>\teval` per line.
void write_split(const QuerySplit& split, const std::filesystem::path& path);
QuerySplit read_split(const std::filesystem::path& path);

}  // namespace rrscale
