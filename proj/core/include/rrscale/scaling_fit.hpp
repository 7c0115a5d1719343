#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rrscale {

enum class ScalingAxis { ModelSize, DataExposure, Joint };

/// ModelPower / DataPower:  y = a - b x^-c                 (x = M or S)
/// JointAdditive:           y = a - b M^-alpha - c S^-beta
/// For metrics that decrease with scale (contrastive entropy) the mirrored forms
/// y = a + b x^-c and y = a + b M^-alpha + c S^-beta are fitted instead.
enum class ScalingForm { ModelPower, DataPower, JointAdditive };

enum class Trend { Increasing, Decreasing };

std::string_view to_string(ScalingAxis axis);
std::string_view to_string(ScalingForm form);
ScalingAxis parse_axis(std::string_view name);
ScalingForm form_for(ScalingAxis axis);
ScalingAxis axis_for(ScalingForm form);

struct Observation {
  double model_size = 0.0;  // M, parameters
  double step = 0.0;        // S, training steps
  double y = 0.0;

  bool operator==(const Observation&) const = default;
};

struct ObservationSeries {
  ScalingAxis axis = ScalingAxis::ModelSize;
  std::vector<Observation> points;
  std::string objective;
  std::string metric;
  std::string dataset;

  /// The abscissa of single-axis series (M or S). Joint series have none.
  double x(const Observation& o) const;
  /// >= 4 points single-axis, >= 6 joint; abscissae strictly positive and sorted
  /// (by S within M for joint). Throws PreconditionError.
  void validate() const;
};

struct FitOptions {
  Trend trend = Trend::Increasing;
  /// Metric bounded in [0, 1]: the asymptote a is kept in [0, 1.5]; otherwise a >= 0.
  bool bounded = true;
  int max_iterations = 500;
  double tolerance = 1e-10;

  static FitOptions for_metric(std::string_view metric);
};

struct ScalingFit {
  ScalingForm form = ScalingForm::ModelPower;
  Trend trend = Trend::Increasing;
  bool bounded = true;
  std::vector<double> params;  // (a, b, c) or (a, b, alpha, c, beta)
  double train_rmse = 0.0;
  bool converged = false;
  int n_restarts_used = 0;
  int iterations = 0;
  std::vector<std::string> active_constraints;  // parameters resting on a box bound

  static std::vector<std::string> param_names(ScalingForm form);
};

/// Damped Gauss-Newton (Levenberg-Marquardt) least squares on raw metric values, restarted
/// from a fixed grid (a0 in {extreme(y), extreme(y) -/+ 0.05}, exponents in {0.1, 0.3, 1.0},
/// coefficients solved in closed form); the restart with the lowest training RMSE wins.
/// Throws PreconditionError for invalid series and FitError when every restart diverges.
ScalingFit fit(const ObservationSeries& series, ScalingForm form, const FitOptions& options = {});

/// Throws ArgumentError for non-positive abscissae or a form/arity mismatch.
double predict(const ScalingFit& fit, double x);
double predict(const ScalingFit& fit, double model_size, double step);
double predict(const ScalingFit& fit, const Observation& at);

struct HeldOutPoint {
  Observation at;
  double y_true = 0.0;
  double y_pred = 0.0;
};

struct ForecastReport {
  ScalingAxis axis = ScalingAxis::ModelSize;
  std::string objective;
  std::string metric;
  std::string dataset;
  std::vector<Observation> training;
  std::vector<HeldOutPoint> held_out;
  double rmse = 0.0;
  double mae = 0.0;
  ScalingFit fit;
};

double forecast_rmse(const std::vector<HeldOutPoint>& points);
double forecast_mae(const std::vector<HeldOutPoint>& points);

/// Refits on all but the held-out points and predicts them.
/// Single-axis: holds out the `n_holdout` largest-x points (requires size > n_holdout + 3).
/// Joint: holds out the `n_holdout` largest-S points of every model size.
ForecastReport holdout_forecast(const ObservationSeries& series, int n_holdout, ScalingForm form,
                                const FitOptions& options = {});

}  // namespace rrscale
