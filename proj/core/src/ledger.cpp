#include "rrscale/ledger.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "rrscale/errors.hpp"
#include "rrscale/metrics.hpp"
#include "rrscale/trec_io.hpp"

namespace rrscale {

namespace {

bool single_token(std::string_view s) {
  return !s.empty() && s.find_first_of(" \t\r\n") == std::string_view::npos;
}

constexpr std::array<std::string_view, 8> kFields = {"objective", "M",      "S",       "examples",
                                                     "metric",    "value",  "dataset", "tag"};

}  // namespace

void LedgerRecord::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("<record>", 0, what); };
  if (objective != "pointwise" && objective != "pairwise" && objective != "listwise") {
    fail(fmt::format("unknown objective '{}'", objective));
  }
  if (model_params <= 0) fail(fmt::format("M must be positive, got {}", model_params));
  if (step < 1) fail(fmt::format("S must be at least 1, got {}", step));
  if (examples_consumed < 0) fail("examples must be non-negative");
  if (!metric::is_known(metric)) fail(fmt::format("unknown metric '{}'", metric));
  if (!std::isfinite(value)) fail("value must be finite");
  if (!single_token(dataset)) fail("dataset must be a single non-empty token");
  if (!single_token(run_tag)) fail("tag must be a single non-empty token");
}

double round_to_ledger(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return std::strtod(buf, nullptr);
}

std::string format_record(const LedgerRecord& r) {
  char value[64];
  std::snprintf(value, sizeof value, "%.9g", r.value);
  return fmt::format("objective={} M={} S={} examples={} metric={} value={} dataset={} tag={}",
                     r.objective, r.model_params, r.step, r.examples_consumed, r.metric, value,
                     r.dataset, r.run_tag);
}

LedgerRecord parse_record(std::string_view text, std::string_view source, std::size_t line) {
  const std::string src(source);
  const auto fields = split_fields(text);
  if (fields.size() != kFields.size()) {
    throw ParseError(src, line,
                     fmt::format("expected {} fields, got {}", kFields.size(), fields.size()));
  }
  std::array<std::string_view, 8> values;
  for (std::size_t i = 0; i < kFields.size(); ++i) {
    const auto eq = fields[i].find('=');
    if (eq == std::string_view::npos || fields[i].substr(0, eq) != kFields[i]) {
      throw ParseError(src, line, fmt::format("field {} must be '{}=<value>', got '{}'", i + 1,
                                              kFields[i], fields[i]));
    }
    values[i] = fields[i].substr(eq + 1);
    if (values[i].empty()) throw ParseError(src, line, fmt::format("{} is empty", kFields[i]));
  }
  LedgerRecord r;
  long long m = 0, s = 0, ex = 0;
  if (!parse_int(values[1], m)) throw ParseError(src, line, "M is not an integer");
  if (!parse_int(values[2], s)) throw ParseError(src, line, "S is not an integer");
  if (!parse_int(values[3], ex)) throw ParseError(src, line, "examples is not an integer");
  if (!parse_double(values[5], r.value)) throw ParseError(src, line, "value is not a finite number");
  r.objective = std::string(values[0]);
  r.model_params = m;
  r.step = s;
  r.examples_consumed = ex;
  r.metric = std::string(values[4]);
  r.dataset = std::string(values[6]);
  r.run_tag = std::string(values[7]);
  try {
    r.validate();
  } catch (const ValidationError& e) {
    // Re-anchor the message at the offending line.
    std::string what = e.what();
    const auto pos = what.find("validation error: ");
    throw ValidationError(src, line, pos == std::string::npos ? what : what.substr(pos + 18));
  }
  return r;
}

std::vector<LedgerRecord> read_ledger(std::istream& in, std::string_view source) {
  std::vector<LedgerRecord> out;
  std::map<LedgerRecord::Key, std::size_t> seen;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (split_fields(line).empty()) continue;
    auto rec = parse_record(line, source, lineno);
    auto [it, inserted] = seen.emplace(rec.key(), lineno);
    if (!inserted) {
      throw ValidationError(std::string(source), lineno,
                            fmt::format("duplicate key (objective={} M={} S={} metric={} "
                                        "dataset={}), first seen on line {}",
                                        rec.objective, rec.model_params, rec.step, rec.metric,
                                        rec.dataset, it->second));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<LedgerRecord> read_ledger(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
  return read_ledger(in, path.string());
}

void append_ledger(const LedgerRecord& record, const std::filesystem::path& path) {
  record.validate();
  const auto existing = read_ledger(path);
  for (const auto& r : existing) {
    if (r.key() == record.key()) {
      throw ValidationError(path.string(), 0,
                            fmt::format("record with key (objective={} M={} S={} metric={} "
                                        "dataset={}) already present",
                                        record.objective, record.model_params, record.step,
                                        record.metric, record.dataset));
    }
  }
  const std::string line = format_record(record) + "\n";
  std::FILE* f = std::fopen(path.string().c_str(), "ab");
  if (f == nullptr) throw DataError(fmt::format("cannot append to {}", path.string()));
  const auto written = std::fwrite(line.data(), 1, line.size(), f);
  const bool ok = written == line.size() && std::fflush(f) == 0;
  std::fclose(f);
  if (!ok) throw DataError(fmt::format("short write to {}", path.string()));
}

void sort_records(std::vector<LedgerRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const LedgerRecord& a, const LedgerRecord& b) { return a.key() < b.key(); });
}

std::vector<LedgerRecord> merge_records(std::span<const LedgerRecord> base,
                                        std::span<const LedgerRecord> updates) {
  std::map<LedgerRecord::Key, LedgerRecord> merged;
  for (const auto& r : base) merged.insert_or_assign(r.key(), r);
  for (const auto& r : updates) merged.insert_or_assign(r.key(), r);
  std::vector<LedgerRecord> out;
  out.reserve(merged.size());
  for (auto& [k, r] : merged) out.push_back(std::move(r));
  return out;
}

void write_ledger(std::vector<LedgerRecord> records, const std::filesystem::path& path) {
  sort_records(records);
  std::string text;
  for (const auto& r : records) {
    r.validate();
    text += format_record(r);
    text += '\n';
  }
  write_file_atomic(path, text);
}

}  // namespace rrscale
