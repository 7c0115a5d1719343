#include "rrscale/protocols.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "rrscale/errors.hpp"

namespace rrscale {

std::vector<LedgerRecord> select_records(std::span<const LedgerRecord> ledger,
                                         std::string_view objective, std::string_view metric,
                                         std::string_view dataset) {
  std::vector<LedgerRecord> out;
  std::set<std::string> datasets;
  for (const auto& r : ledger) {
    if (r.objective != objective || r.metric != metric) continue;
    if (!dataset.empty() && r.dataset != dataset) continue;
    datasets.insert(r.dataset);
    out.push_back(r);
  }
  if (datasets.size() > 1) {
    throw DataError(fmt::format("records for {} {} span {} datasets; name one", objective, metric,
                                datasets.size()));
  }
  std::sort(out.begin(), out.end(), [](const LedgerRecord& a, const LedgerRecord& b) {
    return std::pair(a.model_params, a.step) < std::pair(b.model_params, b.step);
  });
  return out;
}

std::vector<std::int64_t> model_sizes(std::span<const LedgerRecord> ledger,
                                      std::string_view objective) {
  std::set<std::int64_t> sizes;
  for (const auto& r : ledger) {
    if (r.objective == objective) sizes.insert(r.model_params);
  }
  return {sizes.begin(), sizes.end()};
}

namespace {

ObservationSeries empty_series(ScalingAxis axis, std::string_view objective,
                               std::string_view metric, const std::vector<LedgerRecord>& recs) {
  ObservationSeries s;
  s.axis = axis;
  s.objective = std::string(objective);
  s.metric = std::string(metric);
  if (!recs.empty()) s.dataset = recs.front().dataset;
  return s;
}

Observation to_observation(const LedgerRecord& r) {
  return {static_cast<double>(r.model_params), static_cast<double>(r.step), r.value};
}

}  // namespace

ObservationSeries model_series(std::span<const LedgerRecord> ledger, std::string_view objective,
                               std::string_view metric, std::string_view dataset) {
  const auto recs = select_records(ledger, objective, metric, dataset);
  auto s = empty_series(ScalingAxis::ModelSize, objective, metric, recs);
  // recs are sorted by (M, S): the last record of each M is its final checkpoint.
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (i + 1 == recs.size() || recs[i + 1].model_params != recs[i].model_params) {
      s.points.push_back(to_observation(recs[i]));
    }
  }
  return s;
}

ObservationSeries data_series(std::span<const LedgerRecord> ledger, std::string_view objective,
                              std::string_view metric, std::int64_t model_params,
                              std::string_view dataset) {
  const auto recs = select_records(ledger, objective, metric, dataset);
  auto s = empty_series(ScalingAxis::DataExposure, objective, metric, recs);
  for (const auto& r : recs) {
    if (r.model_params == model_params) s.points.push_back(to_observation(r));
  }
  return s;
}

ObservationSeries joint_series(std::span<const LedgerRecord> ledger, std::string_view objective,
                               std::string_view metric, std::string_view dataset) {
  const auto recs = select_records(ledger, objective, metric, dataset);
  auto s = empty_series(ScalingAxis::Joint, objective, metric, recs);
  std::set<std::int64_t> sizes, steps;
  std::set<std::pair<std::int64_t, std::int64_t>> cells;
  for (const auto& r : recs) {
    sizes.insert(r.model_params);
    steps.insert(r.step);
    cells.emplace(r.model_params, r.step);
  }
  std::vector<std::string> missing;
  for (auto m : sizes) {
    for (auto st : steps) {
      if (!cells.contains({m, st})) missing.push_back(fmt::format("(M={}, S={})", m, st));
    }
  }
  if (!missing.empty()) {
    throw DataError(fmt::format("ragged grid for {} {}: {} missing cell(s): {}", objective, metric,
                                missing.size(), fmt::join(missing, ", ")));
  }
  for (const auto& r : recs) s.points.push_back(to_observation(r));
  return s;
}

ForecastReport model_scaling_protocol(std::span<const LedgerRecord> ledger,
                                      std::string_view objective, std::string_view metric,
                                      std::string_view dataset) {
  auto s = model_series(ledger, objective, metric, dataset);
  if (s.points.size() < 4) {
    throw PreconditionError(fmt::format("model scaling needs final checkpoints for at least 4 "
                                        "model sizes, found {} for {} {}",
                                        s.points.size(), objective, metric));
  }
  return holdout_forecast(s, 1, ScalingForm::ModelPower, FitOptions::for_metric(metric));
}

std::int64_t default_data_size(std::span<const LedgerRecord> ledger, std::string_view objective) {
  const auto sizes = model_sizes(ledger, objective);
  if (sizes.empty()) throw DataError(fmt::format("no records for objective {}", objective));
  const auto n = static_cast<long>(sizes.size());
  const long idx = std::clamp(2 * n / 3 - 1, 0L, n - 1);
  return sizes[static_cast<std::size_t>(idx)];
}

ForecastReport data_scaling_protocol(std::span<const LedgerRecord> ledger,
                                     std::string_view objective, std::string_view metric,
                                     std::int64_t model_params, int n_holdout,
                                     std::string_view dataset) {
  auto s = data_series(ledger, objective, metric, model_params, dataset);
  if (s.points.size() < 10) {
    throw PreconditionError(fmt::format("data scaling needs at least 10 checkpoints for M={}, "
                                        "found {} for {} {}",
                                        model_params, s.points.size(), objective, metric));
  }
  return holdout_forecast(s, n_holdout, ScalingForm::DataPower, FitOptions::for_metric(metric));
}

ForecastReport joint_scaling_protocol(std::span<const LedgerRecord> ledger,
                                      std::string_view objective, std::string_view metric,
                                      int n_holdout, std::string_view dataset) {
  auto s = joint_series(ledger, objective, metric, dataset);
  return holdout_forecast(s, n_holdout, ScalingForm::JointAdditive,
                          FitOptions::for_metric(metric));
}

ForecastReport run_protocol(ScalingAxis axis, std::span<const LedgerRecord> ledger,
                            std::string_view objective, std::string_view metric, int n_holdout,
                            std::string_view dataset) {
  switch (axis) {
    case ScalingAxis::ModelSize:
      return model_scaling_protocol(ledger, objective, metric, dataset);
    case ScalingAxis::DataExposure:
      return data_scaling_protocol(ledger, objective, metric, default_data_size(ledger, objective),
                                   n_holdout, dataset);
    case ScalingAxis::Joint:
      return joint_scaling_protocol(ledger, objective, metric, n_holdout, dataset);
  }
  throw ArgumentError("unknown scaling axis");
}

}  // namespace rrscale
