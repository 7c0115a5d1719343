#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace rrscale {

/// One (objective, model size, step, metric) observation.
struct LedgerRecord {
  std::string objective;
  std::int64_t model_params = 0;
  std::int64_t step = 0;
  std::int64_t examples_consumed = 0;
  std::string metric;
  double value = 0.0;
  std::string dataset;
  std::string run_tag;

  using Key = std::tuple<std::string, std::int64_t, std::int64_t, std::string, std::string>;
  Key key() const { return {objective, model_params, step, metric, dataset}; }

  /// Throws ValidationError (line 0) for unknown objective/metric, M <= 0, S < 1,
  /// non-finite value or fields containing whitespace.
  void validate() const;
  bool operator==(const LedgerRecord&) const = default;
};

/// Rounds to 9 significant digits, the precision the ledger stores.
double round_to_ledger(double value);

/// `objective=<..> M=<int> S=<int> examples=<int> metric=<..> value=<%.9g> dataset=<..> tag=<..>`
std::string format_record(const LedgerRecord& record);
/// Throws ParseError with `line` on malformed text and ValidationError on invariant breaks.
LedgerRecord parse_record(std::string_view text, std::string_view source = "<ledger>",
                          std::size_t line = 0);

/// Reads and validates every line; duplicate keys raise ValidationError with the line number.
/// A missing file reads as an empty ledger.
std::vector<LedgerRecord> read_ledger(std::istream& in, std::string_view source = "<ledger>");
std::vector<LedgerRecord> read_ledger(const std::filesystem::path& path);

/// Appends one record as a single write of one full line after checking the key is new.
void append_ledger(const LedgerRecord& record, const std::filesystem::path& path);

/// Orders by objective, M, S, metric, dataset.
void sort_records(std::vector<LedgerRecord>& records);
/// Union of `base` and `updates`; records in `updates` replace those with the same key.
std::vector<LedgerRecord> merge_records(std::span<const LedgerRecord> base,
                                        std::span<const LedgerRecord> updates);
/// Sorts and writes the whole ledger through a temporary file plus rename.
void write_ledger(std::vector<LedgerRecord> records, const std::filesystem::path& path);

}  // namespace rrscale
