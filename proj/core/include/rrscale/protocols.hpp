#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rrscale/ledger.hpp"
#include "rrscale/scaling_fit.hpp"

namespace rrscale {

/// Records for one objective/metric (and dataset, when non-empty). Throws DataError if the
/// selection spans several datasets without one being named.
std::vector<LedgerRecord> select_records(std::span<const LedgerRecord> ledger,
                                         std::string_view objective, std::string_view metric,
                                         std::string_view dataset = {});

/// Ascending distinct model sizes present for the objective.
std::vector<std::int64_t> model_sizes(std::span<const LedgerRecord> ledger,
                                      std::string_view objective);

/// Final-checkpoint value per model size.
ObservationSeries model_series(std::span<const LedgerRecord> ledger, std::string_view objective,
                               std::string_view metric, std::string_view dataset = {});
/// All checkpoints of one model size, ordered by step.
ObservationSeries data_series(std::span<const LedgerRecord> ledger, std::string_view objective,
                              std::string_view metric, std::int64_t model_params,
                              std::string_view dataset = {});
/// Full (size x checkpoint) grid. Throws DataError naming the missing cells if ragged.
ObservationSeries joint_series(std::span<const LedgerRecord> ledger, std::string_view objective,
                               std::string_view metric, std::string_view dataset = {});

/// Fits final checkpoints of all but the largest size and forecasts the largest.
/// Needs at least 4 sizes (and 5 for the fit to have 4 training points).
ForecastReport model_scaling_protocol(std::span<const LedgerRecord> ledger,
                                      std::string_view objective, std::string_view metric,
                                      std::string_view dataset = {});

/// Size used for the data axis: the 4th of 6 sizes, generally index 2n/3 - 1.
std::int64_t default_data_size(std::span<const LedgerRecord> ledger, std::string_view objective);

/// Needs at least 10 checkpoints for the size; holds out the last `n_holdout`.
ForecastReport data_scaling_protocol(std::span<const LedgerRecord> ledger,
                                     std::string_view objective, std::string_view metric,
                                     std::int64_t model_params, int n_holdout = 5,
                                     std::string_view dataset = {});

/// Holds out the last `n_holdout` checkpoints of every size.
ForecastReport joint_scaling_protocol(std::span<const LedgerRecord> ledger,
                                      std::string_view objective, std::string_view metric,
                                      int n_holdout = 5, std::string_view dataset = {});

ForecastReport run_protocol(ScalingAxis axis, std::span<const LedgerRecord> ledger,
                            std::string_view objective, std::string_view metric,
                            int n_holdout = 5, std::string_view dataset = {});

}  // namespace rrscale
