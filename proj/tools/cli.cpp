#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rrscale/errors.hpp"
#include "rrscale/evaluation.hpp"
#include "rrscale/ledger.hpp"
#include "rrscale/protocols.hpp"
#include "rrscale/report.hpp"
#include "rrscale/run_config.hpp"
#include "rrscale/scaling_fit.hpp"
#include "rrscale/scorer.hpp"
#include "rrscale/sweep.hpp"
#include "rrscale/trec_io.hpp"
#include "rrscale/workspace.hpp"

namespace rrscale {

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = "rrscale-work";
};

RunConfig resolve_config(const GlobalOptions& g) {
  RunConfig config = g.config_path.empty() ? RunConfig{} : load_run_config(g.config_path);
  if (g.seed) config.override_seed(*g.seed);
  config.validate();
  return config;
}

std::vector<std::string> objective_names(const RunConfig& config) {
  std::vector<std::string> out;
  for (auto o : config.objectives) out.emplace_back(to_string(o));
  return out;
}

int cmd_synth(const GlobalOptions& g, std::ostream& out) {
  const auto config = resolve_config(g);
  const Workspace ws(g.out);
  const auto s = synthesize(config, ws);
  out << fmt::format("synth: {} docs, {} queries ({} train / {} eval), {} judgments, {} positive\n",
                     s.n_docs, s.n_queries, s.n_train, s.n_eval, s.n_judgments, s.n_positive);
  return kExitOk;
}

int cmd_index(const GlobalOptions& g, std::ostream& out) {
  const auto config = resolve_config(g);
  const Workspace ws(g.out);
  const auto n = build_first_stage(config, ws);
  out << fmt::format("index: wrote top-{} BM25 runs for {} queries to {}\n", config.run_depth, n,
                     ws.first_stage_run().string());
  return kExitOk;
}

int cmd_sweep(const GlobalOptions& g, bool fresh, bool save_checkpoints, std::ostream& out) {
  const auto config = resolve_config(g);
  const Workspace ws(g.out);
  const auto data = load_ranking_data(config, ws);
  SweepOptions opts;
  opts.resume = !fresh;
  opts.save_checkpoints = save_checkpoints;
  opts.log = [&out](const std::string& line) { out << "sweep: " << line << '\n' << std::flush; };
  const auto s = run_sweep(config, *data, ws, opts);
  out << fmt::format("sweep: {} runs ({} trained, {} already complete), {} ledger records\n",
                     s.runs_total, s.runs_trained, s.runs_skipped, s.records);
  return kExitOk;
}

int cmd_eval(const GlobalOptions& g, const std::string& objective_filter, std::ostream& out) {
  const auto config = resolve_config(g);
  const Workspace ws(g.out);
  const auto data = load_ranking_data(config, ws);
  const auto ledger = read_ledger(ws.ledger());
  std::map<LedgerRecord::Key, double> stored;
  for (const auto& r : ledger) stored.emplace(r.key(), r.value);

  if (!std::filesystem::is_directory(ws.checkpoints())) {
    throw DataError(fmt::format("no checkpoints under {}; run sweep --save-checkpoints first", ws.checkpoints().string()));
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(ws.checkpoints())) {
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  const std::regex pattern(R"(([a-z]+)_M(\d+)_S(\d+)\.txt)");
  EvalOptions eval = config.eval;
  eval.seed = derive_seed(config.sweep_seed, "ce");
  std::string text;
  int checked = 0, mismatched = 0;
  for (const auto& path : files) {
    std::smatch m;
    const auto name = path.filename().string();
    if (!std::regex_match(name, m, pattern)) continue;
    if (!objective_filter.empty() && m[1] != objective_filter) continue;
    const auto scorer = Scorer::load(path);
    const auto report = evaluate_checkpoint(scorer, *data, eval);
    for (const auto& [metric, value] : report.values) {
      const LedgerRecord::Key key{m[1], std::stoll(m[2]), std::stoll(m[3]), metric, config.dataset};
      const double recomputed = round_to_ledger(value);
      const auto it = stored.find(key);
      std::string status = "not-in-ledger";
      if (it != stored.end()) {
        status = it->second == recomputed ? "ok" : "MISMATCH";
        if (it->second != recomputed) ++mismatched;
      }
      text += fmt::format("{} M={} S={} {} recomputed={} ledger={} {}\n", m[1].str(), m[2].str(),
                          m[3].str(), metric, fmt::format("{:.9g}", recomputed),
                          it == stored.end() ? std::string("-") : fmt::format("{:.9g}", it->second),
                          status);
    }
    ++checked;
  }
  std::filesystem::create_directories(ws.report());
  write_file_atomic(ws.report() / "eval.txt", text);
  out << text;
  out << fmt::format("eval: {} checkpoint(s) re-evaluated, {} mismatch(es)\n", checked, mismatched);
  if (checked == 0) throw DataError("no checkpoint files matched");
  return mismatched == 0 ? kExitOk : kExitValidation;
}

int cmd_fit(const GlobalOptions& g, const std::string& axis_name, const std::string& objective,
            const std::string& metric, std::int64_t size, const std::string& ledger_path,
            std::ostream& out) {
  const auto config = resolve_config(g);
  const Workspace ws(g.out);
  const auto ledger = read_ledger(ledger_path.empty() ? ws.ledger() : std::filesystem::path(ledger_path));
  const auto axis = parse_axis(axis_name);
  ObservationSeries series;
  switch (axis) {
    case ScalingAxis::ModelSize: series = model_series(ledger, objective, metric); break;
    case ScalingAxis::DataExposure:
      series = data_series(ledger, objective, metric,
                           size > 0 ? size : default_data_size(ledger, objective));
      break;
    case ScalingAxis::Joint: series = joint_series(ledger, objective, metric); break;
  }
  const auto f = fit(series, form_for(axis), FitOptions::for_metric(metric));
  const auto names = ScalingFit::param_names(f.form);
  out << fmt::format("fit: {} {} {} on {} points\n", to_string(f.form), objective, metric,
                     series.points.size());
  for (std::size_t k = 0; k < f.params.size(); ++k) {
    out << fmt::format("  {:<6} {:.9g}\n", names[k], f.params[k]);
  }
  out << fmt::format("  train_rmse {:.9g}\n  converged {}\n  restarts {}\n", f.train_rmse,
                     f.converged ? "yes" : "no", f.n_restarts_used);
  if (!f.active_constraints.empty()) {
    out << "  at bound:";
    for (const auto& c : f.active_constraints) out << ' ' << c;
    out << '\n';
  }
  return kExitOk;
}

std::vector<ForecastCell> forecast_cells(const RunConfig& config, const Workspace& ws) {
  const auto ledger = read_ledger(ws.ledger());
  if (ledger.empty()) throw DataError(fmt::format("{} is empty; run sweep first", ws.ledger().string()));
  const auto objectives = objective_names(config);
  return run_all_protocols(ledger, objectives, config.metrics, config.holdout, config.dataset);
}

int report_failures(const std::vector<ForecastCell>& cells, std::ostream& err) {
  int failed = 0;
  for (const auto& c : cells) {
    if (!c.report) {
      ++failed;
      err << fmt::format("{} {} {}: {}\n", to_string(c.axis), c.objective, c.metric, c.error);
    }
  }
  return failed;
}

int cmd_forecast(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const auto config = resolve_config(g);
  const Workspace ws(g.out);
  const auto cells = forecast_cells(config, ws);
  const int written = write_forecasts(ws, cells);
  for (const auto& m : config.metrics) out << format_forecast_table(cells, m) << '\n';
  out << fmt::format("forecast: {} report(s) written under {}\n", written, ws.forecasts().string());
  return report_failures(cells, err) == 0 ? kExitOk : kExitValidation;
}

int cmd_report(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const auto config = resolve_config(g);
  const Workspace ws(g.out);
  const auto cells = forecast_cells(config, ws);
  const auto ledger = read_ledger(ws.ledger());
  write_report(ws, ledger, cells, config.metrics);
  out << fmt::format("report: wrote {}\n", (ws.report() / "summary.txt").string());
  return report_failures(cells, err) == 0 ? kExitOk : kExitValidation;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reranker scaling-law lab: synthetic benchmark, sweeps and power-law forecasts",
               "rrscale"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "Run configuration file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Override the benchmark and sweep seeds");
  app.add_option("--out", g.out, "Workspace directory")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate the synthetic benchmark");
  auto* index = app.add_subcommand("index", "Build the BM25 index and first-stage runs");
  auto* sweep = app.add_subcommand("sweep", "Train the objective x size grid and write the ledger");
  bool fresh = false, save_checkpoints = false;
  sweep->add_flag("--fresh", fresh, "Discard the existing ledger instead of resuming");
  sweep->add_flag("--save-checkpoints", save_checkpoints,
                  "Store each run's final scorer weights for `eval`");

  auto* eval = app.add_subcommand("eval", "Re-evaluate stored checkpoints against the ledger");
  std::string eval_objective;
  eval->add_option("--objective", eval_objective, "Only this objective");

  auto* fitc = app.add_subcommand("fit", "Fit one scaling law to a ledger slice");
  std::string axis = "model", objective = "pointwise", metric_name = "ndcg@10", ledger_path;
  std::int64_t size = 0;
  fitc->add_option("--axis", axis, "model, data or joint")
      ->check(CLI::IsMember({"model", "data", "joint"}))
      ->capture_default_str();
  fitc->add_option("--objective", objective)
      ->check(CLI::IsMember({"pointwise", "pairwise", "listwise"}))
      ->capture_default_str();
  fitc->add_option("--metric", metric_name)
      ->check(CLI::IsMember({"ndcg@10", "map", "mrr", "ce"}))
      ->capture_default_str();
  fitc->add_option("--size", size, "Model size for the data axis (default: 4th of 6)");
  fitc->add_option("--ledger", ledger_path, "Ledger file (default: <out>/ledger.txt)");

  auto* forecast = app.add_subcommand("forecast", "Run the model, data and joint protocols");
  auto* report = app.add_subcommand("report", "Write the summary table and plot CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*synth) return cmd_synth(g, out);
    if (*index) return cmd_index(g, out);
    if (*sweep) return cmd_sweep(g, fresh, save_checkpoints, out);
    if (*eval) return cmd_eval(g, eval_objective, out);
    if (*fitc) return cmd_fit(g, axis, objective, metric_name, size, ledger_path, out);
    if (*forecast) return cmd_forecast(g, out, err);
    if (*report) return cmd_report(g, out, err);
  } catch (const Error& e) {
    err << "rrscale: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "rrscale: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace rrscale
