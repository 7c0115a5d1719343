#include "rrscale/scaling_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "rrscale/errors.hpp"
#include "rrscale/metrics.hpp"

namespace rrscale {

std::string_view to_string(ScalingAxis axis) {
  switch (axis) {
    case ScalingAxis::ModelSize: return "model";
    case ScalingAxis::DataExposure: return "data";
    case ScalingAxis::Joint: return "joint";
  }
  return "?";
}

std::string_view to_string(ScalingForm form) {
  switch (form) {
    case ScalingForm::ModelPower: return "model-power";
    case ScalingForm::DataPower: return "data-power";
    case ScalingForm::JointAdditive: return "joint-additive";
  }
  return "?";
}

ScalingAxis parse_axis(std::string_view name) {
  if (name == "model") return ScalingAxis::ModelSize;
  if (name == "data") return ScalingAxis::DataExposure;
  if (name == "joint") return ScalingAxis::Joint;
  throw ArgumentError(fmt::format("unknown scaling axis '{}' (expected model, data or joint)", name));
}

ScalingForm form_for(ScalingAxis axis) {
  switch (axis) {
    case ScalingAxis::ModelSize: return ScalingForm::ModelPower;
    case ScalingAxis::DataExposure: return ScalingForm::DataPower;
    case ScalingAxis::Joint: return ScalingForm::JointAdditive;
  }
  return ScalingForm::ModelPower;
}

ScalingAxis axis_for(ScalingForm form) {
  switch (form) {
    case ScalingForm::ModelPower: return ScalingAxis::ModelSize;
    case ScalingForm::DataPower: return ScalingAxis::DataExposure;
    case ScalingForm::JointAdditive: return ScalingAxis::Joint;
  }
  return ScalingAxis::ModelSize;
}

double ObservationSeries::x(const Observation& o) const {
  switch (axis) {
    case ScalingAxis::ModelSize: return o.model_size;
    case ScalingAxis::DataExposure: return o.step;
    case ScalingAxis::Joint: break;
  }
  throw ArgumentError("joint series have no single abscissa");
}

void ObservationSeries::validate() const {
  const std::size_t min_points = axis == ScalingAxis::Joint ? 6 : 4;
  if (points.size() < min_points) {
    throw PreconditionError(fmt::format("{} scaling fit needs at least {} points, got {}",
                                        to_string(axis), min_points, points.size()));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!std::isfinite(p.y)) {
      throw PreconditionError(fmt::format("point {} has a non-finite metric value", i));
    }
    const bool need_m = axis != ScalingAxis::DataExposure;
    const bool need_s = axis != ScalingAxis::ModelSize;
    if ((need_m && !(p.model_size > 0.0)) || (need_s && !(p.step > 0.0))) {
      throw PreconditionError(fmt::format("point {} has a non-positive abscissa", i));
    }
    if (i == 0) continue;
    const auto& q = points[i - 1];
    bool ordered = false;
    if (axis == ScalingAxis::Joint) {
      ordered = q.model_size < p.model_size || (q.model_size == p.model_size && q.step < p.step);
    } else {
      ordered = x(q) < x(p);
    }
    if (!ordered) {
      throw PreconditionError(
          fmt::format("points must be strictly increasing in abscissa (violated at {})", i));
    }
  }
}

FitOptions FitOptions::for_metric(std::string_view name) {
  FitOptions o;
  o.trend = metric::higher_is_better(name) ? Trend::Increasing : Trend::Decreasing;
  o.bounded = metric::is_bounded(name);
  return o;
}

std::vector<std::string> ScalingFit::param_names(ScalingForm form) {
  if (form == ScalingForm::JointAdditive) return {"a", "b", "alpha", "c", "beta"};
  return {"a", "b", "c"};
}

namespace {

constexpr double kCoefMin = 1e-12;
constexpr double kCoefMax = 1e12;
constexpr double kExpMin = 1e-6;
constexpr double kExpMax = 10.0;
constexpr double kStartOffset = 0.05;

struct Problem {
  bool joint = false;
  double sign = -1.0;  // -1 increasing, +1 decreasing
  std::vector<double> u;  // M or x
  std::vector<double> v;  // S (joint only)
  std::vector<double> y;
  std::vector<double> lo, hi;

  std::size_t n_params() const { return joint ? 5 : 3; }

  double model(const std::vector<double>& p, std::size_t i) const {
    if (!joint) return p[0] + sign * p[1] * std::pow(u[i], -p[2]);
    return p[0] + sign * (p[1] * std::pow(u[i], -p[2]) + p[3] * std::pow(v[i], -p[4]));
  }

  double sse(const std::vector<double>& p) const {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double r = y[i] - model(p, i);
      s += r * r;
    }
    return s;
  }

  // Rows of d model / d params.
  void jacobian(const std::vector<double>& p, Eigen::MatrixXd& J) const {
    J.resize(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(n_params()));
    for (std::size_t i = 0; i < y.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const double tu = std::pow(u[i], -p[2]);
      J(r, 0) = 1.0;
      J(r, 1) = sign * tu;
      J(r, 2) = -sign * p[1] * tu * std::log(u[i]);
      if (joint) {
        const double tv = std::pow(v[i], -p[4]);
        J(r, 3) = sign * tv;
        J(r, 4) = -sign * p[3] * tv * std::log(v[i]);
      }
    }
  }

  void project(std::vector<double>& p) const {
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::clamp(p[k], lo[k], hi[k]);
  }
};

struct Solution {
  std::vector<double> params;
  double sse = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

Solution levenberg_marquardt(const Problem& pr, std::vector<double> p, const FitOptions& opt) {
  pr.project(p);
  Solution s;
  double cur = pr.sse(p);
  if (!std::isfinite(cur)) return s;
  double lambda = 1e-3;
  const auto np = static_cast<Eigen::Index>(pr.n_params());
  Eigen::MatrixXd J;
  Eigen::VectorXd r(static_cast<Eigen::Index>(pr.y.size()));
  int it = 0;
  bool converged = false;
  for (; it < opt.max_iterations && !converged; ++it) {
    pr.jacobian(p, J);
    for (std::size_t i = 0; i < pr.y.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) = pr.y[i] - pr.model(p, i);
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool accepted = false;
    while (!accepted) {
      if (lambda > 1e20) {
        // No descent direction left at this scale: stationary within tolerance.
        converged = true;
        break;
      }
      Eigen::MatrixXd A = JtJ;
      for (Eigen::Index k = 0; k < np; ++k) A(k, k) += lambda * std::max(JtJ(k, k), 1e-30);
      const Eigen::VectorXd delta = A.ldlt().solve(g);
      std::vector<double> trial(p);
      for (Eigen::Index k = 0; k < np; ++k) trial[static_cast<std::size_t>(k)] += delta(k);
      pr.project(trial);
      double step = 0.0, norm = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        step += (trial[k] - p[k]) * (trial[k] - p[k]);
        norm += p[k] * p[k];
      }
      const double trial_sse = pr.sse(trial);
      const bool better = std::isfinite(trial_sse) && trial_sse <= cur;
      if (std::sqrt(step) <= opt.tolerance * std::max(std::sqrt(norm), 1e-30)) {
        if (better) {
          p = trial;
          cur = trial_sse;
        }
        converged = true;
        break;
      }
      if (better) {
        p = std::move(trial);
        cur = trial_sse;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
      } else {
        lambda *= 10.0;
      }
    }
  }
  s.params = std::move(p);
  s.sse = cur;
  s.converged = converged;
  s.iterations = it;
  return s;
}

double extreme(const std::vector<double>& y, Trend trend) {
  return trend == Trend::Increasing ? *std::max_element(y.begin(), y.end())
                                    : *std::min_element(y.begin(), y.end());
}

}  // namespace

ScalingFit fit(const ObservationSeries& series, ScalingForm form, const FitOptions& options) {
  if (axis_for(form) != series.axis) {
    throw ArgumentError(fmt::format("form {} does not apply to a {} series", to_string(form),
                                    to_string(series.axis)));
  }
  series.validate();
  if (options.max_iterations < 1 || !(options.tolerance > 0.0)) {
    throw ArgumentError("fit needs max_iterations >= 1 and a positive tolerance");
  }

  Problem pr;
  pr.joint = form == ScalingForm::JointAdditive;
  pr.sign = options.trend == Trend::Increasing ? -1.0 : 1.0;
  for (const auto& p : series.points) {
    pr.u.push_back(pr.joint ? p.model_size : series.x(p));
    if (pr.joint) pr.v.push_back(p.step);
    pr.y.push_back(p.y);
  }
  const double a_lo = 0.0;
  const double a_hi = options.bounded ? 1.5 : std::numeric_limits<double>::infinity();
  if (pr.joint) {
    pr.lo = {a_lo, kCoefMin, kExpMin, kCoefMin, kExpMin};
    pr.hi = {a_hi, kCoefMax, kExpMax, kCoefMax, kExpMax};
  } else {
    pr.lo = {a_lo, kCoefMin, kExpMin};
    pr.hi = {a_hi, kCoefMax, kExpMax};
  }

  const double ext = extreme(pr.y, options.trend);
  const double a_starts[] = {ext, ext - pr.sign * kStartOffset};
  const double exp_starts[] = {0.1, 0.3, 1.0};
  const std::size_t n = pr.y.size();

  std::vector<std::vector<double>> starts;
  for (double a0 : a_starts) {
    a0 = std::clamp(a0, a_lo, a_hi);
    if (!pr.joint) {
      for (double c0 : exp_starts) {
        // Coefficient from the first and last points given a0 and c0.
        double num = 0.0, den = 0.0;
        for (std::size_t i : {std::size_t{0}, n - 1}) {
          const double t = std::pow(pr.u[i], -c0);
          num += t * pr.sign * (pr.y[i] - a0);
          den += t * t;
        }
        starts.push_back({a0, std::max(num / den, 1e-6), c0});
      }
    } else {
      for (double al0 : exp_starts) {
        for (double be0 : exp_starts) {
          Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
          Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
          for (std::size_t i = 0; i < n; ++i) {
            const Eigen::Vector2d t(std::pow(pr.u[i], -al0), std::pow(pr.v[i], -be0));
            A += t * t.transpose();
            rhs += t * (pr.sign * (pr.y[i] - a0));
          }
          Eigen::Vector2d bc = A.ldlt().solve(rhs);
          if (!bc.allFinite()) bc.setZero();
          starts.push_back({a0, std::max(bc(0), 1e-6), al0, std::max(bc(1), 1e-6), be0});
        }
      }
    }
  }

  Solution best;
  int used = 0;
  for (const auto& s0 : starts) {
    Solution sol = levenberg_marquardt(pr, s0, options);
    if (!std::isfinite(sol.sse)) continue;
    ++used;
    if (sol.sse < best.sse) best = std::move(sol);
  }
  if (used == 0) {
    throw FitError(fmt::format("every restart diverged fitting {} {} {}", series.objective,
                               series.metric, to_string(form)));
  }

  ScalingFit out;
  out.form = form;
  out.trend = options.trend;
  out.bounded = options.bounded;
  out.params = best.params;
  out.train_rmse = std::sqrt(best.sse / static_cast<double>(n));
  out.converged = best.converged;
  out.n_restarts_used = used;
  out.iterations = best.iterations;
  const auto names = ScalingFit::param_names(form);
  for (std::size_t k = 0; k < out.params.size(); ++k) {
    if (out.params[k] <= pr.lo[k] || out.params[k] >= pr.hi[k]) {
      out.active_constraints.push_back(names[k]);
    }
  }
  return out;
}

namespace {

double sign_of(const ScalingFit& f) { return f.trend == Trend::Increasing ? -1.0 : 1.0; }

}  // namespace

double predict(const ScalingFit& f, double x) {
  if (f.form == ScalingForm::JointAdditive || f.params.size() != 3) {
    throw ArgumentError("single-axis prediction needs a model-power or data-power fit");
  }
  if (!(x > 0.0)) throw ArgumentError(fmt::format("abscissa must be positive, got {}", x));
  return f.params[0] + sign_of(f) * f.params[1] * std::pow(x, -f.params[2]);
}

double predict(const ScalingFit& f, double model_size, double step) {
  if (f.form != ScalingForm::JointAdditive || f.params.size() != 5) {
    throw ArgumentError("joint prediction needs a joint-additive fit");
  }
  if (!(model_size > 0.0) || !(step > 0.0)) {
    throw ArgumentError("model size and step must be positive");
  }
  const auto& p = f.params;
  return p[0] + sign_of(f) * (p[1] * std::pow(model_size, -p[2]) + p[3] * std::pow(step, -p[4]));
}

double predict(const ScalingFit& f, const Observation& at) {
  switch (f.form) {
    case ScalingForm::ModelPower: return predict(f, at.model_size);
    case ScalingForm::DataPower: return predict(f, at.step);
    case ScalingForm::JointAdditive: return predict(f, at.model_size, at.step);
  }
  return 0.0;
}

double forecast_rmse(const std::vector<HeldOutPoint>& points) {
  if (points.empty()) return 0.0;
  double s = 0.0;
  for (const auto& p : points) s += (p.y_pred - p.y_true) * (p.y_pred - p.y_true);
  return std::sqrt(s / static_cast<double>(points.size()));
}

double forecast_mae(const std::vector<HeldOutPoint>& points) {
  if (points.empty()) return 0.0;
  double s = 0.0;
  for (const auto& p : points) s += std::abs(p.y_pred - p.y_true);
  return s / static_cast<double>(points.size());
}

ForecastReport holdout_forecast(const ObservationSeries& series, int n_holdout, ScalingForm form,
                                const FitOptions& options) {
  if (n_holdout < 1) throw ArgumentError("n_holdout must be at least 1");
  if (axis_for(form) != series.axis) {
    throw ArgumentError(fmt::format("form {} does not apply to a {} series", to_string(form),
                                    to_string(series.axis)));
  }
  series.validate();

  ObservationSeries train = series;
  train.points.clear();
  std::vector<Observation> held;
  const auto h = static_cast<std::size_t>(n_holdout);

  if (series.axis != ScalingAxis::Joint) {
    if (series.points.size() <= h + 3) {
      throw PreconditionError(fmt::format(
          "holding out {} of {} points leaves fewer than 4 to fit", n_holdout, series.points.size()));
    }
    const std::size_t cut = series.points.size() - h;
    train.points.assign(series.points.begin(), series.points.begin() + static_cast<long>(cut));
    held.assign(series.points.begin() + static_cast<long>(cut), series.points.end());
  } else {
    std::map<double, std::vector<Observation>> by_size;
    for (const auto& p : series.points) by_size[p.model_size].push_back(p);
    for (const auto& [m, pts] : by_size) {
      if (pts.size() <= h) {
        throw PreconditionError(fmt::format(
            "model size {} has {} checkpoints; cannot hold out {}", m, pts.size(), n_holdout));
      }
      const std::size_t cut = pts.size() - h;
      train.points.insert(train.points.end(), pts.begin(), pts.begin() + static_cast<long>(cut));
      held.insert(held.end(), pts.begin() + static_cast<long>(cut), pts.end());
    }
    if (train.points.size() < 6) {
      throw PreconditionError(
          fmt::format("joint holdout leaves {} training points (need 6)", train.points.size()));
    }
  }

  ForecastReport report;
  report.axis = series.axis;
  report.objective = series.objective;
  report.metric = series.metric;
  report.dataset = series.dataset;
  report.fit = fit(train, form, options);
  report.training = train.points;
  for (const auto& o : held) {
    report.held_out.push_back({o, o.y, predict(report.fit, o)});
  }
  report.rmse = forecast_rmse(report.held_out);
  report.mae = forecast_mae(report.held_out);
  return report;
}

}  // namespace rrscale
