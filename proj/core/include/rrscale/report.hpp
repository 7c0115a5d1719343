#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rrscale/ledger.hpp"
#include "rrscale/scaling_fit.hpp"
#include "rrscale/workspace.hpp"

namespace rrscale {

/// Outcome of one protocol: a report, or the error that prevented it.
struct ForecastCell {
  ScalingAxis axis = ScalingAxis::ModelSize;
  std::string objective;
  std::string metric;
  std::int64_t data_model_params = 0;  // size used on the data axis
  std::optional<ForecastReport> report;
  std::string error;
};

/// Every (axis, objective) protocol for each metric, in metric, axis, objective order.
std::vector<ForecastCell> run_all_protocols(std::span<const LedgerRecord> ledger,
                                            std::span<const std::string> objectives,
                                            std::span<const std::string> metrics, int n_holdout,
                                            std::string_view dataset = {});

/// Machine-readable form: one `point` line per held-out point then one `summary` line.
std::string format_forecast_record(const ForecastReport& report);

/// Scaling x Objective x error table for one metric with the published reference values in
/// adjacent, labeled columns.
std::string format_forecast_table(std::span<const ForecastCell> cells, std::string_view metric);

/// Plot-ready observed vs fitted values: `x,y_observed,y_fitted,held_out` for single-axis
/// reports, `M,S,y_observed,y_fitted,held_out` for joint ones.
std::string forecast_csv(const ForecastReport& report);

/// Spearman rank correlation with average ranks for ties. Throws ArgumentError on length
/// mismatch or fewer than 2 points; returns 0 when either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

/// Per objective: final-checkpoint metric by model size and its Spearman correlation with size.
std::string format_final_checkpoint_table(std::span<const LedgerRecord> ledger,
                                          std::string_view metric);

std::string format_reference_section();

std::string forecast_file_name(const ForecastCell& cell);

/// forecasts/<axis>_<objective>_<metric>.txt plus forecast_table.txt. Returns the number of
/// reports written.
int write_forecasts(const Workspace& ws, std::span<const ForecastCell> cells);

/// report/summary.txt and one report/<axis>_<objective>_<metric>.csv per available report.
void write_report(const Workspace& ws, std::span<const LedgerRecord> ledger,
                  std::span<const ForecastCell> cells, std::span<const std::string> metrics);

}  // namespace rrscale
