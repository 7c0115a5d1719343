#include "rrscale/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "rrscale/errors.hpp"
#include "rrscale/protocols.hpp"
#include "rrscale/reference_tables.hpp"
#include "rrscale/trec_io.hpp"

namespace rrscale {

namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

constexpr ScalingAxis kAxes[] = {ScalingAxis::ModelSize, ScalingAxis::DataExposure,
                                 ScalingAxis::Joint};

std::string capitalized(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::string scaling_label(ScalingAxis axis) {
  switch (axis) {
    case ScalingAxis::ModelSize: return "Model";
    case ScalingAxis::DataExposure: return "Data";
    case ScalingAxis::Joint: return "Joint";
  }
  return "?";
}

// Published table and columns shown next to a metric (RMSE column, optional MAE column).
struct ReferenceColumns {
  const ReferenceTable* table = nullptr;
  std::string rmse;
  std::string mae;
};

ReferenceColumns reference_for(std::string_view metric) {
  if (metric == "ndcg@10") return {&reference_table("ndcg"), "Test RMSE", "Test MAE"};
  if (metric == "ce") return {&reference_table("ce"), "Test RMSE", "Test MAE"};
  if (metric == "map") return {&reference_table("map-mrr"), "MAP", ""};
  if (metric == "mrr") return {&reference_table("map-mrr"), "MRR", ""};
  return {};
}

}  // namespace

std::vector<ForecastCell> run_all_protocols(std::span<const LedgerRecord> ledger,
                                            std::span<const std::string> objectives,
                                            std::span<const std::string> metrics, int n_holdout,
                                            std::string_view dataset) {
  std::vector<ForecastCell> cells;
  for (const auto& metric : metrics) {
    for (auto axis : kAxes) {
      for (const auto& objective : objectives) {
        ForecastCell cell;
        cell.axis = axis;
        cell.objective = objective;
        cell.metric = metric;
        try {
          if (axis == ScalingAxis::DataExposure) {
            cell.data_model_params = default_data_size(ledger, objective);
          }
          cell.report = run_protocol(axis, ledger, objective, metric, n_holdout, dataset);
        } catch (const Error& e) {
          cell.error = e.what();
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

std::string format_forecast_record(const ForecastReport& r) {
  std::string out;
  const auto axis = to_string(r.axis);
  for (const auto& p : r.held_out) {
    out += fmt::format("point axis={} objective={} metric={} M={} S={} y_true={} y_pred={}\n", axis,
                       r.objective, r.metric, g9(p.at.model_size), g9(p.at.step), g9(p.y_true),
                       g9(p.y_pred));
  }
  std::string params;
  const auto names = ScalingFit::param_names(r.fit.form);
  for (std::size_t k = 0; k < r.fit.params.size(); ++k) {
    if (k) params += ',';
    params += names[k] + ":" + g9(r.fit.params[k]);
  }
  std::string constraints;
  for (const auto& c : r.fit.active_constraints) constraints += (constraints.empty() ? "" : ",") + c;
  out += fmt::format(
      "summary axis={} objective={} metric={} dataset={} form={} n_train={} n_heldout={} "
      "rmse={} mae={} params={} train_rmse={} converged={} restarts={} constraints={}\n",
      axis, r.objective, r.metric, r.dataset.empty() ? "-" : r.dataset, to_string(r.fit.form),
      r.training.size(), r.held_out.size(), g9(r.rmse), g9(r.mae), params, g9(r.fit.train_rmse),
      r.fit.converged ? 1 : 0, r.fit.n_restarts_used, constraints.empty() ? "none" : constraints);
  return out;
}

std::string format_forecast_table(std::span<const ForecastCell> cells, std::string_view metric) {
  const auto ref = reference_for(metric);
  std::string out = fmt::format("{} forecasting error (toy sweep) with {}\n", metric,
                                kReferenceFlag);
  out += fmt::format("{:<18} {:<10} {:>9} {:>9}   {:>9} {:>9}\n", "Scaling", "Objective",
                     "Test RMSE", "Test MAE", "Ref RMSE", "Ref MAE");
  for (const auto& c : cells) {
    if (c.metric != metric) continue;
    auto scaling = scaling_label(c.axis);
    if (c.axis == ScalingAxis::DataExposure && c.data_model_params > 0) {
      scaling += fmt::format(" (M={})", c.data_model_params);
    }
    const auto objective = capitalized(c.objective);
    std::string rmse = "n/a", mae = "n/a", ref_rmse = "-", ref_mae = "-";
    if (c.report) {
      rmse = fmt::format("{:.4f}", c.report->rmse);
      mae = fmt::format("{:.4f}", c.report->mae);
    }
    if (ref.table != nullptr) {
      const auto label = scaling_label(c.axis);
      if (auto cell = ref.table->find(label, objective, ref.rmse)) ref_rmse = cell->text;
      if (!ref.mae.empty()) {
        if (auto cell = ref.table->find(label, objective, ref.mae)) ref_mae = cell->text;
      }
    }
    out += fmt::format("{:<18} {:<10} {:>9} {:>9}   {:>9} {:>9}\n", scaling, objective, rmse, mae,
                       ref_rmse, ref_mae);
    if (!c.report) out += fmt::format("  ! {}\n", c.error);
  }
  return out;
}

std::string forecast_csv(const ForecastReport& r) {
  const bool joint = r.axis == ScalingAxis::Joint;
  std::string out = joint ? "M,S,y_observed,y_fitted,held_out\n" : "x,y_observed,y_fitted,held_out\n";
  auto row = [&](const Observation& o, bool held) {
    const double fitted = predict(r.fit, o);
    if (joint) {
      out += fmt::format("{},{},{},{},{}\n", g9(o.model_size), g9(o.step), g9(o.y), g9(fitted),
                         held ? 1 : 0);
    } else {
      const double x = r.axis == ScalingAxis::ModelSize ? o.model_size : o.step;
      out += fmt::format("{},{},{},{}\n", g9(x), g9(o.y), g9(fitted), held ? 1 : 0);
    }
  };
  for (const auto& o : r.training) row(o, false);
  for (const auto& p : r.held_out) row(p.at, true);
  return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("spearman needs equal-length inputs");
  if (x.size() < 2) throw ArgumentError("spearman needs at least 2 points");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::string format_final_checkpoint_table(std::span<const LedgerRecord> ledger,
                                          std::string_view metric) {
  std::map<std::string, std::vector<LedgerRecord>> by_objective;
  for (const auto& r : ledger) by_objective[r.objective];
  std::string out = fmt::format("Final-checkpoint {} by model size\n", metric);
  for (const auto& [objective, unused] : by_objective) {
    const auto series = model_series(ledger, objective, metric);
    std::vector<double> m, y;
    out += fmt::format("{:<10}", capitalized(objective));
    for (const auto& p : series.points) {
      m.push_back(p.model_size);
      y.push_back(p.y);
      out += fmt::format("  M={}:{:.4f}", g9(p.model_size), p.y);
    }
    if (m.size() >= 2) out += fmt::format("  spearman={:.4f}", spearman(m, y));
    out += '\n';
  }
  return out;
}

std::string format_reference_section() {
  std::string out = fmt::format("Bundled values: {}\n", kReferenceFlag);
  for (const auto& t : bundled_reference_tables()) {
    out += fmt::format("[{}] {}\n", t.id, t.title);
    for (std::size_t i = 0; i < t.cells.size(); i += t.columns.size()) {
      const auto& first = t.cells[i];
      const auto scaling = first.scaling == "Data" ? t.data_row_label : first.scaling;
      std::string row = fmt::format("  {} / {}", scaling, first.objective);
      for (std::size_t c = 0; c < t.columns.size(); ++c) row += " / " + t.cells[i + c].text;
      out += row + '\n';
    }
    std::string columns;
    for (const auto& c : t.columns) columns += " / " + c;
    out += fmt::format("  (columns: Scaling / Objective{})\n", columns);
  }
  return out;
}

std::string forecast_file_name(const ForecastCell& cell) {
  std::string metric = cell.metric;
  std::replace(metric.begin(), metric.end(), '@', '_');
  return fmt::format("{}_{}_{}", to_string(cell.axis), cell.objective, metric);
}

int write_forecasts(const Workspace& ws, std::span<const ForecastCell> cells) {
  std::filesystem::create_directories(ws.forecasts());
  int written = 0;
  std::vector<std::string> metrics;
  for (const auto& c : cells) {
    if (std::find(metrics.begin(), metrics.end(), c.metric) == metrics.end()) {
      metrics.push_back(c.metric);
    }
    const auto path = ws.forecasts() / (forecast_file_name(c) + ".txt");
    if (c.report) {
      write_file_atomic(path, format_forecast_record(*c.report));
      ++written;
    } else {
      write_file_atomic(path, fmt::format("error {}\n", c.error));
    }
  }
  std::string table;
  for (const auto& m : metrics) table += format_forecast_table(cells, m) + '\n';
  write_file_atomic(ws.forecast_table(), table);
  return written;
}

void write_report(const Workspace& ws, std::span<const LedgerRecord> ledger,
                  std::span<const ForecastCell> cells, std::span<const std::string> metrics) {
  std::filesystem::create_directories(ws.report());
  std::string summary = "Reranker scaling sweep summary\n\n";
  for (const auto& m : metrics) {
    summary += format_final_checkpoint_table(ledger, m) + '\n';
  }
  for (const auto& m : metrics) summary += format_forecast_table(cells, m) + '\n';
  summary += format_reference_section();
  write_file_atomic(ws.report() / "summary.txt", summary);
  for (const auto& c : cells) {
    if (c.report) {
      write_file_atomic(ws.report() / (forecast_file_name(c) + ".csv"), forecast_csv(*c.report));
    }
  }
}

}  // namespace rrscale
