// Acceptance criteria runner. One PASS/FAIL line per criterion; exit 1 if any fails.
//
//   rrscale_acceptance [--criterion N] [--work DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli.hpp"
#include "rrscale/bm25.hpp"
#include "rrscale/errors.hpp"
#include "rrscale/ledger.hpp"
#include "rrscale/losses.hpp"
#include "rrscale/metrics.hpp"
#include "rrscale/protocols.hpp"
#include "rrscale/reference_tables.hpp"
#include "rrscale/report.hpp"
#include "rrscale/rng.hpp"
#include "rrscale/scaling_fit.hpp"
#include "rrscale/synth.hpp"
#include "rrscale/trec_io.hpp"

namespace fs = std::filesystem;
using namespace rrscale;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-8});
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---- 1: metric oracle equivalence ----

double brute_ndcg(const std::vector<int>& ranked, std::vector<int> judged, int k) {
  auto dcg = [k](const std::vector<int>& g) {
    double t = 0.0;
    for (int r = 0; r < std::min<int>(k, g.size()); ++r) t += (std::pow(2.0, g[r]) - 1.0) / std::log2(r + 2.0);
    return t;
  };
  std::sort(judged.rbegin(), judged.rend());
  const double ideal = dcg(judged);
  return ideal > 0 ? dcg(ranked) / ideal : 0.0;
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng.below(10));
    std::vector<std::pair<std::string, double>> scored;
    Qrels qrels;
    for (int i = 0; i < n; ++i) {
      scored.emplace_back("d" + std::to_string(i), rng.normal());
      qrels.set("q", "d" + std::to_string(i), static_cast<int>(rng.below(4)));
    }
    const RankedRun run = make_ranked_run("q", scored);
    std::vector<int> ranked;
    for (const auto& e : run.entries) ranked.push_back(qrels.grade("q", e.doc_id));
    int relevant = 0;
    double ap = 0.0, rr = 0.0;
    int hits = 0;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      if (ranked[r] > 0) {
        ++relevant;
        ap += double(++hits) / double(r + 1);
        if (rr == 0.0) rr = 1.0 / double(r + 1);
      }
    }
    ap = relevant > 0 ? ap / relevant : 0.0;
    worst = std::max({worst, std::fabs(ndcg_at_k(run, qrels, 10) - brute_ndcg(ranked, ranked, 10)),
                      std::fabs(average_precision(run, qrels) - ap),
                      std::fabs(reciprocal_rank(run, qrels) - rr)});
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 5.0, fmt::format("max |diff| {:.3g}, {:.3f} s", worst, secs)};
}

// ---- 2: contrastive entropy ----

Outcome criterion2() {
  Rng rng(1002);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const double pos = 3.0 * rng.normal();
    std::vector<double> negs(rng.below(70));
    for (auto& v : negs) v = 3.0 * rng.normal();
    double m = pos;
    for (double v : negs) m = std::max(m, v);
    double sum = std::exp(pos - m);
    for (double v : negs) sum += std::exp(v - m);
    const double direct = m + std::log(sum) - pos;
    worst = std::max(worst, std::fabs(contrastive_entropy(pos, negs) - direct));
  }
  const double none = contrastive_entropy(0.7, std::vector<double>{});
  const double uniform = contrastive_entropy(0.0, std::vector<double>(63, 0.0));
  const bool ok = worst <= 1e-9 && std::fabs(none) <= 1e-12 &&
                  std::fabs(uniform - std::log(64.0)) <= 1e-12 && std::fabs(uniform - 4.1589) < 1e-4;
  return {ok, fmt::format("max |diff| {:.3g}; no negatives {:.3g}; 63 equal {:.12f}", worst, none, uniform)};
}

// ---- 3: gradient checks ----

Outcome criterion3() {
  Rng rng(1003);
  const double h = 1e-5;
  double worst_point = 0.0, worst_pair = 0.0, worst_list = 0.0, worst_identity = 0.0;
  for (int t = 0; t < 200; ++t) {
    const double s = 5.0 * rng.normal();
    const int y = static_cast<int>(rng.below(2));
    const double fd = (pointwise_loss(s + h, y).loss - pointwise_loss(s - h, y).loss) / (2 * h);
    worst_point = std::max(worst_point, rel_err(pointwise_loss(s, y).grad, fd));

    const double a = 4.0 * rng.normal(), b = 4.0 * rng.normal();
    const auto pr = pairwise_ranknet_loss(a, b);
    const double fa = (pairwise_ranknet_loss(a + h, b).loss - pairwise_ranknet_loss(a - h, b).loss) / (2 * h);
    const double fb = (pairwise_ranknet_loss(a, b + h).loss - pairwise_ranknet_loss(a, b - h).loss) / (2 * h);
    worst_pair = std::max({worst_pair, rel_err(pr.grad_pos, fa), rel_err(pr.grad_neg, fb)});

    const std::size_t n = 2 + rng.below(12);
    std::vector<double> scores(n);
    std::vector<int> grades(n);
    for (auto& v : scores) v = 2.0 * rng.normal();
    for (auto& g : grades) g = static_cast<int>(rng.below(4));
    grades[rng.below(n)] = 1 + static_cast<int>(rng.below(3));
    const auto lr = listwise_listnet_loss(scores, grades);
    for (std::size_t k = 0; k < n; ++k) {
      auto up = scores, down = scores;
      up[k] += h;
      down[k] -= h;
      const double f = (listwise_listnet_loss(up, grades).loss - listwise_listnet_loss(down, grades).loss) / (2 * h);
      worst_list = std::max(worst_list, rel_err(lr.grads[k], f));
    }

    std::vector<int> single(n, 0);
    const std::size_t p = rng.below(n);
    single[p] = 1;
    std::vector<double> negs;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != p) negs.push_back(scores[k]);
    }
    worst_identity = std::max(worst_identity, std::fabs(listwise_listnet_loss(scores, single).loss -
                                                        contrastive_entropy(scores[p], negs)));
  }
  const bool ok = worst_point < 1e-4 && worst_pair < 1e-4 && worst_list < 1e-4 && worst_identity <= 1e-9;
  return {ok, fmt::format("rel err point {:.2g} pair {:.2g} list {:.2g}; ListNet-CE {:.2g}", worst_point,
                          worst_pair, worst_list, worst_identity)};
}

// ---- 4: BM25 ----

Outcome criterion4() {
  BenchmarkConfig c;
  c.n_docs = 1000;
  c.n_queries = 100;
  c.seed = 1004;
  const Benchmark bench = generate_benchmark(c);
  const auto index = InvertedIndex::build(std::span<const SynthDoc>(bench.corpus));
  int mismatched = 0;
  for (const auto& q : bench.queries) {
    std::vector<std::pair<std::string, double>> all;
    for (const auto& d : bench.corpus) {
      const double s = index.bm25_score(q.tokens, d.doc_id);
      if (s > 0.0) all.emplace_back(d.doc_id, s);
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
      return x.second != y.second ? x.second > y.second : x.first < y.first;
    });
    const RankedRun top = index.retrieve_topk(q.query_id, q.tokens, static_cast<int>(bench.corpus.size()));
    bool same = top.entries.size() == all.size();
    for (std::size_t r = 0; same && r < all.size(); ++r) {
      same = top.entries[r].doc_id == all[r].first && top.entries[r].score == all[r].second &&
             top.entries[r].rank == static_cast<int>(r + 1);
    }
    mismatched += !same;
  }

  // One document "a b", query "a".
  const std::vector<int> doc{0, 1};
  const std::vector<InvertedIndex::Document> docs{{"d1", doc}};
  const auto single = InvertedIndex::build(std::span<const InvertedIndex::Document>(docs));
  const std::vector<int> query{0};
  const double hand = single.bm25_score(query, "d1");
  const bool hand_ok = std::fabs(hand - 0.5108) <= 1e-4;
  return {mismatched == 0 && hand_ok,
          fmt::format("{} / 100 queries differ from exhaustive scoring; single-doc score {:.6f} (expected 0.5108)",
                      mismatched, hand)};
}

// ---- 5 and 6: scaling fits ----

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return out;
}

Outcome criterion5() {
  const auto t0 = Clock::now();
  Rng rng(1005);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  int ok_model = 0, ok_data = 0, ok_joint = 0;
  for (int t = 0; t < 100; ++t) {
    {
      const double a = draw(0.4, 0.9), b = draw(0.1, 1.0), c = draw(0.1, 1.0);
      ObservationSeries s;
      s.axis = ScalingAxis::ModelSize;
      for (double x : log_spaced(1e3, 1e6, 8)) s.points.push_back({x, 1.0, a - b * std::pow(x, -c)});
      const auto f = fit(s, ScalingForm::ModelPower);
      ok_model += rel_err(f.params[0], a) < 1e-3 && rel_err(f.params[1], b) < 1e-3 && rel_err(f.params[2], c) < 1e-3;
    }
    {
      const double a = draw(0.4, 0.9), b = draw(0.1, 1.0), c = draw(0.1, 1.0);
      ObservationSeries s;
      s.axis = ScalingAxis::DataExposure;
      for (double x : log_spaced(100, 2000, 8)) s.points.push_back({1.0, x, a - b * std::pow(x, -c)});
      const auto f = fit(s, ScalingForm::DataPower);
      ok_data += rel_err(f.params[0], a) < 1e-3 && rel_err(f.params[1], b) < 1e-3 && rel_err(f.params[2], c) < 1e-3;
    }
    {
      const double a = draw(0.4, 0.9), b = draw(0.1, 1.0), al = draw(0.1, 0.8), c = draw(0.1, 1.0),
                   be = draw(0.1, 0.8);
      ObservationSeries s;
      s.axis = ScalingAxis::Joint;
      for (double m : log_spaced(300, 3e5, 4)) {
        for (double st : log_spaced(100, 2000, 4)) s.points.push_back({m, st, a - b * std::pow(m, -al) - c * std::pow(st, -be)});
      }
      const auto f = fit(s, ScalingForm::JointAdditive);
      const double want[] = {a, b, al, c, be};
      bool all = true;
      for (int k = 0; k < 5; ++k) all = all && rel_err(f.params[k], want[k]) < 1e-3;
      ok_joint += all;
    }
  }
  const double secs = seconds_since(t0);
  return {ok_model == 100 && ok_data == 100 && ok_joint == 100 && secs < 10.0,
          fmt::format("recovered model {}/100, data {}/100, joint {}/100 in {:.2f} s", ok_model, ok_data,
                      ok_joint, secs)};
}

Outcome criterion6() {
  Rng rng(1006);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  int within = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double a = draw(0.4, 0.9), b = draw(0.1, 1.0), c = draw(0.1, 1.0);
    ObservationSeries s;
    s.axis = ScalingAxis::DataExposure;
    for (int i = 1; i <= 20; ++i) {
      const double x = 100.0 * i;
      s.points.push_back({1.0, x, a - b * std::pow(x, -c) + 0.01 * rng.normal()});
    }
    const auto r = holdout_forecast(s, 5, ScalingForm::DataPower);
    within += r.rmse <= 0.03;
    worst = std::max(worst, r.rmse);
  }
  return {within >= 95, fmt::format("{}/100 trials with held-out RMSE <= 0.03 (worst {:.4f})", within, worst)};
}

// ---- 7 and 8: end-to-end toy pipeline ----

int cli(const std::vector<std::string>& args, std::string& errors) {
  std::vector<const char*> argv{"rrscale"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  errors = err.str();
  return code;
}

// Runs synth, index, sweep, forecast and report into `dir`; returns the failing step or "".
std::string run_pipeline(const fs::path& dir) {
  fs::remove_all(dir);
  const std::string config = (fs::path(RRSCALE_SOURCE_DIR) / "configs" / "toy.cfg").string();
  for (const char* step : {"synth", "index", "sweep", "forecast", "report"}) {
    std::string err;
    if (cli({"--config", config, "--out", dir.string(), step}, err) != kExitOk) {
      return fmt::format("{} failed: {}", step, err);
    }
  }
  return "";
}

Outcome criterion7(const fs::path& work) {
  const auto t0 = Clock::now();
  const fs::path dir = work / "run1";
  const std::string failed = run_pipeline(dir);
  const double secs = seconds_since(t0);
  if (!failed.empty()) return {false, failed};

  const auto ledger = read_ledger(dir / "ledger.txt");
  std::string detail;
  double worst_rho = 1.0;
  int forecasts_ok = 0;
  for (const char* obj : {"pointwise", "pairwise", "listwise"}) {
    const auto series = model_series(ledger, obj, "ndcg@10");
    std::vector<double> m, y;
    for (const auto& p : series.points) {
      m.push_back(p.model_size);
      y.push_back(p.y);
    }
    const double rho = spearman(m, y);
    worst_rho = std::min(worst_rho, rho);
    const auto r = model_scaling_protocol(ledger, obj, "ndcg@10");
    const double err = std::fabs(r.held_out.at(0).y_pred - r.held_out.at(0).y_true);
    forecasts_ok += err <= 0.03;
    detail += fmt::format("{} rho {:.4f} model-forecast |err| {:.4f}; ", obj, rho, err);
  }

  int reports = 0;
  for (const char* axis : {"model", "data", "joint"}) {
    for (const char* obj : {"pointwise", "pairwise", "listwise"}) {
      const auto p = dir / "forecasts" / fmt::format("{}_{}_ndcg_10.txt", axis, obj);
      reports += fs::exists(p) && slurp(p).find("summary ") != std::string::npos;
    }
  }
  // Table rows: Scaling x Objective with RMSE/MAE columns, nine per metric.
  std::istringstream table(slurp(dir / "forecast_table.txt"));
  std::string line;
  int rows = 0;
  bool in_ndcg = false, header = false;
  while (std::getline(table, line)) {
    if (line.rfind("ndcg@10 ", 0) == 0) in_ndcg = true;
    else if (line.empty()) in_ndcg = false;
    else if (in_ndcg && line.rfind("Scaling", 0) == 0) header = line.find("Test RMSE") != std::string::npos && line.find("Test MAE") != std::string::npos;
    else if (in_ndcg && (line.rfind("Model", 0) == 0 || line.rfind("Data", 0) == 0 || line.rfind("Joint", 0) == 0)) ++rows;
  }
  const bool ok = secs < 15 * 60 && worst_rho >= 0.9 && forecasts_ok >= 2 && reports == 9 && rows == 9 && header;
  detail += fmt::format("{} NDCG reports, {} table rows, {:.0f} s", reports, rows, secs);
  return {ok, detail};
}

Outcome criterion8(const fs::path& work) {
  const fs::path first = work / "run1";
  if (!fs::exists(first / "ledger.txt")) {
    const std::string failed = run_pipeline(first);
    if (!failed.empty()) return {false, "first run: " + failed};
  }
  const fs::path second = work / "run2";
  const std::string failed = run_pipeline(second);
  if (!failed.empty()) return {false, "second run: " + failed};
  std::vector<fs::path> files{"ledger.txt", "forecast_table.txt"};
  for (const auto& sub : {"forecasts", "report"}) {
    for (const auto& e : fs::directory_iterator(first / sub)) files.push_back(fs::path(sub) / e.path().filename());
  }
  int differing = 0;
  for (const auto& f : files) differing += !fs::exists(second / f) || slurp(first / f) != slurp(second / f);
  std::size_t n_second = 0;
  for (const auto& sub : {"forecasts", "report"}) {
    n_second += std::distance(fs::directory_iterator(second / sub), fs::directory_iterator());
  }
  const bool same_count = n_second + 2 == files.size();
  return {differing == 0 && same_count, fmt::format("{} files compared, {} differ", files.size(), differing)};
}

// ---- 9: formats ----

std::string reserialize(const fs::path& p) {
  std::ostringstream out;
  if (p.extension() == ".qrels") {
    write_qrels(read_qrels(p), out);
  } else if (p.extension() == ".run") {
    const auto runs = read_run(p);
    std::istringstream in(slurp(p));
    std::string line;
    std::string tag = "t";
    if (std::getline(in, line)) tag = std::string(split_fields(line).back());
    write_run(runs, out, tag);
  } else {
    for (const auto& r : read_ledger(p)) out << format_record(r) << '\n';
  }
  return out.str();
}

Outcome criterion9(const fs::path& work) {
  const fs::path corpus = fs::path(RRSCALE_TEST_DATA_DIR) / "formats";
  const fs::path scratch = work / "formats";
  fs::create_directories(scratch);
  int valid = 0, valid_ok = 0;
  for (const auto& e : fs::directory_iterator(corpus / "valid")) {
    ++valid;
    try {
      const std::string once = reserialize(e.path());
      const auto copy = scratch / e.path().filename();
      std::ofstream(copy, std::ios::binary) << once;
      valid_ok += reserialize(copy) == once;
    } catch (const Error&) {
    }
  }
  int invalid = 0, invalid_ok = 0;
  std::istringstream manifest(slurp(corpus / "invalid" / "MANIFEST.tsv"));
  std::string line;
  while (std::getline(manifest, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_fields(line);
    ++invalid;
    const auto want = std::stoul(std::string(f[2]));
    try {
      reserialize(corpus / "invalid" / std::string(f[0]));
    } catch (const ParseError& e) {
      invalid_ok += f[1] == "parse" && e.line() == want;
    } catch (const ValidationError& e) {
      invalid_ok += f[1] == "validation" && e.line() == want;
    }
  }
  return {valid == 20 && valid_ok == 20 && invalid == 20 && invalid_ok == 20,
          fmt::format("valid round-trips {}/{}, invalid rejected at the right line {}/{}", valid_ok, valid,
                      invalid_ok, invalid)};
}

// ---- 10: reference tables ----

Outcome criterion10() {
  struct Spot {
    const char *table, *scaling, *objective, *column, *text;
  };
  const Spot spots[] = {
      {"ndcg", "Model", "Pointwise", "Test RMSE", "0.015"}, {"ndcg", "Model", "Listwise", "Test RMSE", "0.018"},
      {"ndcg", "Joint", "Pairwise", "Test RMSE", "0.023"},  {"ndcg", "Joint", "Pairwise", "Test MAE", "0.019"},
      {"ce", "Model", "Pointwise", "Test RMSE", "0.348"},   {"ce", "Data", "Listwise", "Test RMSE", "0.061"},
      {"ce", "Data", "Listwise", "Test MAE", "0.049"},      {"trec-dl", "Model", "Pairwise", "NDCG", "0.011"},
      {"map-mrr", "Model", "Pointwise", "MAP", "0.013"},    {"map-mrr", "Data", "Listwise", "MAP", "0.016"},
  };
  int matched = 0;
  for (const auto& s : spots) {
    const auto c = reference_table(s.table).find(s.scaling, s.objective, s.column);
    matched += c && c->text == s.text;
  }
  int cells = 0, flagged = 0;
  for (const auto& t : bundled_reference_tables()) {
    for (const auto& c : t.cells) {
      ++cells;
      flagged += !c.reproduced;
    }
  }
  const bool labeled = format_reference_section().find(kReferenceFlag) != std::string::npos;
  const int n_spots = static_cast<int>(std::size(spots));
  return {matched == n_spots && flagged == cells && labeled,
          fmt::format("{}/{} spot cells verbatim, {}/{} cells flagged not reproduced", matched, n_spots, flagged,
                      cells)};
}

const char* const kNames[] = {
    "",
    "metric oracle equivalence",
    "contrastive entropy correctness",
    "loss gradient checks",
    "BM25 exhaustive equivalence",
    "fit recovery",
    "forecast robustness",
    "end-to-end toy protocol",
    "determinism",
    "format fidelity",
    "reference-table integrity",
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  fs::path work = fs::temp_directory_path() / "rrscale_acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (a == "--work" && i + 1 < argc) {
      work = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N] [--work DIR]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > 10) {
    std::fprintf(stderr, "criterion must be 1..10\n");
    return 2;
  }
  fs::create_directories(work);

  const std::map<int, std::function<Outcome()>> criteria{
      {1, criterion1},
      {2, criterion2},
      {3, criterion3},
      {4, criterion4},
      {5, criterion5},
      {6, criterion6},
      {7, [&] { return criterion7(work); }},
      {8, [&] { return criterion8(work); }},
      {9, [&] { return criterion9(work); }},
      {10, criterion10},
  };
  int failures = 0;
  for (const auto& [n, check] : criteria) {
    if (only != 0 && n != only) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", n, kNames[n], o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
