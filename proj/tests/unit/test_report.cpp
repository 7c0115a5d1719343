#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "rrscale/errors.hpp"
#include "rrscale/reference_tables.hpp"
#include "rrscale/report.hpp"

namespace rrscale {
namespace {

std::vector<LedgerRecord> synthetic_ledger() {
  std::vector<LedgerRecord> out;
  for (const char* obj : {"pointwise", "pairwise", "listwise"}) {
    for (std::int64_t m : {100, 300, 900, 2700, 8100, 24300}) {
      for (int i = 1; i <= 12; ++i) {
        const std::int64_t s = 50 * i;
        const double base = 0.3 * std::pow(double(m), -0.25) + 0.4 * std::pow(double(s), -0.5);
        out.push_back({obj, m, s, s * 128, "ndcg@10", 0.8 - base, "synthetic", "t"});
        out.push_back({obj, m, s, s * 128, "ce", 2.0 + base, "synthetic", "t"});
      }
    }
  }
  return out;
}

TEST(Spearman, Values) {
  const std::vector<double> x{1, 2, 3, 4}, up{10, 20, 30, 40}, down{4, 3, 2, 1}, flat{1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(spearman(x, up), 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, down), -1.0);
  EXPECT_EQ(spearman(x, flat), 0.0);
  // Ties take average ranks: y ranks [1.5, 1.5, 3, 4].
  const std::vector<double> tied{5, 5, 6, 7};
  EXPECT_NEAR(spearman(x, tied), 0.9486832980505138, 1e-12);
  EXPECT_THROW(spearman(x, std::vector<double>{1, 2}), ArgumentError);
}

TEST(Report, NineNdcgCellsInTableLayout) {
  const auto ledger = synthetic_ledger();
  const std::vector<std::string> objectives{"pointwise", "pairwise", "listwise"}, metrics{"ndcg@10"};
  const auto cells = run_all_protocols(ledger, objectives, metrics, 5);
  ASSERT_EQ(cells.size(), 9u);
  for (const auto& c : cells) {
    ASSERT_TRUE(c.report) << c.error;
    EXPECT_GE(c.report->rmse, c.report->mae);
  }
  const std::string table = format_forecast_table(cells, "ndcg@10");
  EXPECT_NE(table.find("Test RMSE"), std::string::npos);
  EXPECT_NE(table.find("Ref RMSE"), std::string::npos);
  EXPECT_NE(table.find(kReferenceFlag), std::string::npos);
  for (const char* row : {"Model", "Data (M=2700)", "Joint", "Pointwise", "Pairwise", "Listwise", "0.015", "0.023"}) {
    EXPECT_NE(table.find(row), std::string::npos) << row << "\n" << table;
  }
}

TEST(Report, FailedCellsCarryTheError) {
  auto ledger = synthetic_ledger();
  std::erase_if(ledger, [](const LedgerRecord& r) { return r.model_params == 24300 || r.model_params == 8100; });
  const std::vector<std::string> objectives{"pointwise"}, metrics{"ndcg@10"};
  const auto cells = run_all_protocols(ledger, objectives, metrics, 5);
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_FALSE(cells[0].report);
  EXPECT_FALSE(cells[0].error.empty());
  EXPECT_TRUE(cells[2].report);
}

TEST(Report, RecordAndCsvShapes) {
  const auto ledger = synthetic_ledger();
  const std::vector<std::string> objectives{"listwise"}, metrics{"ce"};
  const auto cells = run_all_protocols(ledger, objectives, metrics, 5);
  ASSERT_EQ(cells.size(), 3u);
  const auto& joint = *cells[2].report;
  const std::string rec = format_forecast_record(joint);
  std::size_t points = 0;
  for (std::size_t p = rec.find("point "); p != std::string::npos; p = rec.find("point ", p + 1)) ++points;
  EXPECT_EQ(points, 30u);
  EXPECT_NE(rec.find("summary "), std::string::npos);
  const std::string csv = forecast_csv(joint);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "M,S,y_observed,y_fitted,held_out");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 72);
  const std::string single = forecast_csv(*cells[0].report);
  EXPECT_EQ(single.substr(0, single.find('\n')), "x,y_observed,y_fitted,held_out");
  EXPECT_EQ(forecast_file_name(cells[1]), "data_listwise_ce");
}

TEST(Report, ReferenceSectionLines) {
  const std::string s = format_reference_section();
  EXPECT_NE(s.find("Model / Pointwise / 0.015"), std::string::npos) << s;
  EXPECT_NE(s.find("not reproduced"), std::string::npos);
}

TEST(Report, WritesFilesDeterministically) {
  const auto ledger = synthetic_ledger();
  const std::vector<std::string> objectives{"pointwise", "pairwise", "listwise"}, metrics{"ndcg@10", "ce"};
  const auto cells = run_all_protocols(ledger, objectives, metrics, 5);
  const auto root = std::filesystem::temp_directory_path() / "rrscale_report_test";
  std::filesystem::remove_all(root);
  const Workspace ws(root);
  ws.ensure();
  EXPECT_EQ(write_forecasts(ws, cells), 18);
  write_report(ws, ledger, cells, metrics);
  EXPECT_TRUE(std::filesystem::exists(ws.forecast_table()));
  EXPECT_TRUE(std::filesystem::exists(ws.report() / "summary.txt"));
  EXPECT_TRUE(std::filesystem::exists(ws.report() / "model_pointwise_ndcg_10.csv"));
  const std::string summary = format_final_checkpoint_table(ledger, "ndcg@10");
  EXPECT_NE(summary.find("24300"), std::string::npos);
  std::filesystem::remove_all(root);
}

}  // namespace
}  // namespace rrscale
