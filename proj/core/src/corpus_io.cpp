#include "rrscale/corpus_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "rrscale/errors.hpp"
#include "rrscale/rng.hpp"
#include "rrscale/trec_io.hpp"

namespace rrscale {

namespace {


template <typename Fn>
void for_each_row(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw ParseError(path.string(), lineno, "expected '<id>\\t<values>'");
    }
    fn(lineno, std::string(line.substr(0, tab)), split_fields(line.substr(tab + 1)));
  }
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(s.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join_ints(std::span<const int> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string join_doubles(std::span<const double> v) {
  std::string s;
  char buf[40];
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    std::snprintf(buf, sizeof buf, "%.9g", v[i]);
    s += buf;
  }
  return s;
}

template <typename Item>
void write_items(std::span<const Item> items, const std::filesystem::path& text_path,
                 const std::filesystem::path& latent_path, std::string Item::*id) {
  std::string text, latent;
  for (const auto& it : items) {
    text += it.*id + '\t' + join_ints(it.tokens) + '\n';
    latent += it.*id + '\t' + join_doubles(it.latent) + '\n';
  }
  write_file_atomic(text_path, text);
  write_file_atomic(latent_path, latent);
}

template <typename Item>
std::vector<Item> read_items(const std::filesystem::path& text_path,
                             const std::filesystem::path& latent_path, std::string Item::*id) {
  std::vector<Item> items;
  std::map<std::string, std::size_t> index;
  for_each_row(text_path, [&](std::size_t lineno, std::string key, const auto& fields) {
    Item item;
    item.*id = key;
    for (auto f : fields) {
      long long t = 0;
      if (!parse_int(f, t) || t < 0) {
        throw ParseError(text_path.string(), lineno, fmt::format("bad token id '{}'", f));
      }
      item.tokens.push_back(static_cast<int>(t));
    }
    if (!index.emplace(key, items.size()).second) {
      throw ParseError(text_path.string(), lineno, fmt::format("duplicate id {}", key));
    }
    items.push_back(std::move(item));
  });
  std::set<std::string> seen;
  for_each_row(latent_path, [&](std::size_t lineno, std::string key, const auto& fields) {
    const auto it = index.find(key);
    if (it == index.end()) {
      throw ParseError(latent_path.string(), lineno, fmt::format("unknown id {}", key));
    }
    if (!seen.insert(key).second) {
      throw ParseError(latent_path.string(), lineno, fmt::format("duplicate id {}", key));
    }
    if (fields.size() != 1) {
      throw ParseError(latent_path.string(), lineno, "latent must be comma-joined decimals");
    }
    auto& latent = items[it->second].latent;
    for (auto f : split_commas(fields[0])) {
      double v = 0.0;
      if (!parse_double(f, v)) {
        throw ParseError(latent_path.string(), lineno, fmt::format("bad latent value '{}'", f));
      }
      latent.push_back(v);
    }
  });
  if (seen.size() != items.size()) {
    throw DataError(fmt::format("{} lists {} ids but {} has latents for {}", text_path.string(),
                                items.size(), latent_path.string(), seen.size()));
  }
  return items;
}

}  // namespace

void write_docs(std::span<const SynthDoc> docs, const std::filesystem::path& text_path,
                const std::filesystem::path& latent_path) {
  write_items(docs, text_path, latent_path, &SynthDoc::doc_id);
}

std::vector<SynthDoc> read_docs(const std::filesystem::path& text_path,
                                const std::filesystem::path& latent_path) {
  return read_items(text_path, latent_path, &SynthDoc::doc_id);
}

void write_queries(std::span<const SynthQuery> queries, const std::filesystem::path& text_path,
                   const std::filesystem::path& latent_path) {
  write_items(queries, text_path, latent_path, &SynthQuery::query_id);
}

std::vector<SynthQuery> read_queries(const std::filesystem::path& text_path,
                                     const std::filesystem::path& latent_path) {
  return read_items(text_path, latent_path, &SynthQuery::query_id);
}

QuerySplit split_queries(std::vector<std::string> query_ids, double eval_fraction,
                         std::uint64_t seed) {
  if (!(eval_fraction > 0.0 && eval_fraction < 1.0)) {
    throw ArgumentError(fmt::format("eval fraction must be in (0, 1), got {}", eval_fraction));
  }
  if (query_ids.size() < 2) throw ArgumentError("need at least 2 queries to split");
  std::sort(query_ids.begin(), query_ids.end());
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(query_ids);
  const auto n = query_ids.size();
  auto n_eval = static_cast<std::size_t>(std::llround(eval_fraction * static_cast<double>(n)));
  n_eval = std::clamp<std::size_t>(n_eval, 1, n - 1);
  QuerySplit s;
  s.eval.assign(query_ids.begin(), query_ids.begin() + static_cast<long>(n_eval));
  s.train.assign(query_ids.begin() + static_cast<long>(n_eval), query_ids.end());
  std::sort(s.eval.begin(), s.eval.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

void write_split(const QuerySplit& split, const std::filesystem::path& path) {
  std::map<std::string, std::string_view> rows;
  for (const auto& q : split.train) rows.emplace(q, "train");
  for (const auto& q : split.eval) rows.emplace(q, "eval");
  std::string text;
  for (const auto& [q, part] : rows) text += fmt::format("{}\t{}\n", q, part);
  write_file_atomic(path, text);
}

QuerySplit read_split(const std::filesystem::path& path) {
  QuerySplit s;
  std::set<std::string> seen;
  for_each_row(path, [&](std::size_t lineno, std::string key, const auto& fields) {
    if (fields.size() != 1 || (fields[0] != "train" && fields[0] != "eval")) {
      throw ParseError(path.string(), lineno, "expected '<qid>\\ttrain' or '<qid>\\teval'");
    }
    if (!seen.insert(key).second) {
      throw ParseError(path.string(), lineno, fmt::format("duplicate query {}", key));
    }
    (fields[0] == "train" ? s.train : s.eval).push_back(std::move(key));
  });
  return s;
}

}  // namespace rrscale
