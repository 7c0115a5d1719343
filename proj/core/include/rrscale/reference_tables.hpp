#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rrscale {

/// A published forecasting-error cell, kept for side-by-side display only. These numbers come
/// from finetuning 17M-1B transformer rerankers on MS MARCO and are not reproduced here.
struct ReferenceCell {
  std::string scaling;    // Model, Data, Joint
  std::string objective;  // Pointwise, Pairwise, Listwise
  std::string column;     // e.g. "Test RMSE", "NDCG"
  std::string text;       // verbatim decimal, e.g. "0.030"
  double value = 0.0;
  bool reproduced = false;
};

struct ReferenceTable {
  std::string id;     // ndcg, ce, trec-dl, map-mrr
  std::string title;
  std::string data_row_label;  // label of the Data rows, e.g. "Data (150M)"
  std::vector<std::string> columns;
  std::vector<ReferenceCell> cells;

  /// nullopt when the table has no such cell.
  std::optional<ReferenceCell> find(std::string_view scaling, std::string_view objective,
                                    std::string_view column) const;
};

inline constexpr std::string_view kReferenceFlag = "published reference (not reproduced)";

/// NDCG errors, CE errors, TREC DL test RMSE per metric, and MAP/MRR errors.
const std::vector<ReferenceTable>& bundled_reference_tables();
/// Throws LookupError for unknown ids.
const ReferenceTable& reference_table(std::string_view id);

}  // namespace rrscale
