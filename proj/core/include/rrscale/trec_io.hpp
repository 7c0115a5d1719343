#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rrscale/qrels.hpp"
#include "rrscale/ranked_run.hpp"

namespace rrscale {

/// TREC qrels: `qid iter docid grade`, one judgment per line, grades 0..3.
/// Malformed lines raise ParseError and repeated (qid, docid) pairs raise ValidationError,
/// both carrying the 1-based line number.
Qrels read_qrels(std::istream& in, std::string_view source = "<qrels>");
Qrels read_qrels(const std::filesystem::path& path);
void write_qrels(const Qrels& qrels, std::ostream& out);
void write_qrels(const Qrels& qrels, const std::filesystem::path& path);

/// TREC run: `qid Q0 docid rank score tag`. Each query's lines must be contiguous with ranks
/// 1, 2, ... and non-increasing scores. Scores are written with 6 decimals.
std::vector<RankedRun> read_run(std::istream& in, std::string_view source = "<run>");
std::vector<RankedRun> read_run(const std::filesystem::path& path);
void write_run(const std::vector<RankedRun>& runs, std::ostream& out, std::string_view tag);
void write_run(const std::vector<RankedRun>& runs, const std::filesystem::path& path,
               std::string_view tag);

/// Splits on runs of spaces and tabs.
std::vector<std::string_view> split_fields(std::string_view line);

/// Whole-token numeric parsing. Returns false on empty input or trailing characters.
bool parse_int(std::string_view text, long long& out);
bool parse_double(std::string_view text, double& out);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace rrscale
