#include "rrscale/trec_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "rrscale/errors.hpp"

namespace rrscale {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_int(std::string_view text, long long& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool parse_double(std::string_view text, double& out) {
  // from_chars for double is missing from older libstdc++; strtod on a bounded copy instead.
  if (text.empty() || text.size() > 64) return false;
  std::string buf(text);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && std::isfinite(out);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(fmt::format("cannot write {}", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError(fmt::format("short write to {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  return out;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool blank(std::string_view line) { return split_fields(line).empty(); }

}  // namespace

Qrels read_qrels(std::istream& in, std::string_view source) {
  const std::string src(source);
  Qrels qrels;
  std::set<std::pair<std::string, std::string>> seen;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = strip_cr(raw);
    if (blank(line)) continue;
    const auto f = split_fields(line);
    if (f.size() != 4) {
      throw ParseError(src, lineno, fmt::format("expected 4 fields, got {}", f.size()));
    }
    long long grade = 0;
    if (!parse_int(f[3], grade)) {
      throw ParseError(src, lineno, fmt::format("grade '{}' is not an integer", f[3]));
    }
    if (grade < 0 || grade > Qrels::kMaxGrade) {
      throw ParseError(src, lineno, fmt::format("grade {} outside 0..{}", grade, Qrels::kMaxGrade));
    }
    if (!seen.emplace(std::string(f[0]), std::string(f[2])).second) {
      throw ValidationError(src, lineno, fmt::format("duplicate judgment for ({}, {})", f[0], f[2]));
    }
    qrels.set(f[0], f[2], static_cast<int>(grade));
  }
  return qrels;
}

Qrels read_qrels(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_qrels(in, path.string());
}

void write_qrels(const Qrels& qrels, std::ostream& out) {
  for (const auto& [qid, docs] : qrels.table()) {
    for (const auto& [did, grade] : docs) out << qid << " 0 " << did << ' ' << grade << '\n';
  }
}

void write_qrels(const Qrels& qrels, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_qrels(qrels, out);
}

std::vector<RankedRun> read_run(std::istream& in, std::string_view source) {
  const std::string src(source);
  std::vector<RankedRun> runs;
  std::set<std::string, std::less<>> finished;
  std::set<std::string, std::less<>> docs_in_query;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = strip_cr(raw);
    if (blank(line)) continue;
    const auto f = split_fields(line);
    if (f.size() != 6) {
      throw ParseError(src, lineno, fmt::format("expected 6 fields, got {}", f.size()));
    }
    if (f[1] != "Q0") {
      throw ParseError(src, lineno, fmt::format("second field must be Q0, got '{}'", f[1]));
    }
    long long rank = 0;
    if (!parse_int(f[3], rank) || rank < 1) {
      throw ParseError(src, lineno, fmt::format("rank '{}' is not a positive integer", f[3]));
    }
    double score = 0.0;
    if (!parse_double(f[4], score)) {
      throw ParseError(src, lineno, fmt::format("score '{}' is not a finite number", f[4]));
    }
    if (runs.empty() || runs.back().query_id != f[0]) {
      if (!runs.empty()) finished.insert(runs.back().query_id);
      if (finished.contains(f[0])) {
        throw ValidationError(src, lineno,
                              fmt::format("query {} appears in non-contiguous blocks", f[0]));
      }
      runs.push_back(RankedRun{std::string(f[0]), {}});
      docs_in_query.clear();
    }
    auto& run = runs.back();
    const auto expected = static_cast<long long>(run.entries.size()) + 1;
    if (rank != expected) {
      throw ValidationError(src, lineno, fmt::format("query {}: rank {} where {} was expected",
                                                     run.query_id, rank, expected));
    }
    if (!run.entries.empty() && score > run.entries.back().score) {
      throw ValidationError(src, lineno, fmt::format("query {}: score increases at rank {}",
                                                     run.query_id, rank));
    }
    if (!docs_in_query.emplace(f[2]).second) {
      throw ValidationError(src, lineno,
                            fmt::format("query {}: document {} listed twice", run.query_id, f[2]));
    }
    run.entries.push_back(RunEntry{std::string(f[2]), score, static_cast<int>(rank)});
  }
  return runs;
}

std::vector<RankedRun> read_run(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_run(in, path.string());
}

void write_run(const std::vector<RankedRun>& runs, std::ostream& out, std::string_view tag) {
  if (tag.empty() || split_fields(tag).size() != 1 || split_fields(tag)[0] != tag) {
    throw ArgumentError(fmt::format("run tag '{}' must be a single non-empty token", tag));
  }
  for (const auto& run : runs) {
    validate_run(run);
    for (const auto& e : run.entries) {
      out << fmt::format("{} Q0 {} {} {:.6f} {}\n", run.query_id, e.doc_id, e.rank, e.score, tag);
    }
  }
}

void write_run(const std::vector<RankedRun>& runs, const std::filesystem::path& path,
               std::string_view tag) {
  std::ostringstream buf;
  write_run(runs, buf, tag);
  write_file_atomic(path, buf.str());
}

}  // namespace rrscale
