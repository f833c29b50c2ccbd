// Acceptance gate: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; otherwise only the listed numbers (e.g. `5 6`).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fwus/config.hpp"
#include "fwus/decision.hpp"
#include "fwus/dynamic.hpp"
#include "fwus/error.hpp"
#include "fwus/experiments.hpp"
#include "fwus/lstm.hpp"
#include "fwus/metrics.hpp"
#include "fwus/monte_carlo.hpp"
#include "fwus/scenario.hpp"
#include "fwus/spatial.hpp"
#include "fwus/traffic.hpp"
#include "fwus/wakeup.hpp"

namespace {

using namespace fwus;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double pa_of(double lambda_E) { return activation_probability_analytic(lambda_E, InfluenceFunction::exponential()); }

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("fwus_acceptance_" + name);
  std::filesystem::remove_all(p);
  return p;
}

// --- 1 ---------------------------------------------------------------------

Verdict steady_state() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double eig_err = 0.0, sim_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double pa = uniform01(rng);
    const double q = 0.99 * uniform01(rng);
    const auto c = build_chain(pa, q);

    Eigen::Matrix4d P;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) P(i, j) = c.transition[i][j];
    Eigen::EigenSolver<Eigen::Matrix4d> es(P.transpose());
    int one = 0;
    for (int i = 1; i < 4; ++i)
      if (std::abs(es.eigenvalues()[i] - 1.0) < std::abs(es.eigenvalues()[one] - 1.0)) one = i;
    Eigen::Vector4d v = es.eigenvectors().col(one).real();
    v /= v.sum();

    std::array<double, 4> visits{};
    int s = 3;
    constexpr int kSteps = 1'000'000;
    for (int n = 0; n < kSteps; ++n) {
      double u = uniform01(rng);
      int to = 3;
      for (int j = 0; j < 4; ++j) {
        u -= c.transition[s][j];
        if (u < 0.0) {
          to = j;
          break;
        }
      }
      s = to;
      visits[s] += 1.0;
    }
    for (int i = 0; i < 4; ++i) {
      eig_err = std::max(eig_err, std::abs(v[i] - c.steady_state[i]));
      sim_err = std::max(sim_err, std::abs(visits[i] / kSteps - c.steady_state[i]));
    }
  }
  const double t = seconds_since(t0);
  return {eig_err < 1e-12 && sim_err < 1e-2 && t < 10.0,
          fmt::format("eigenvector max err {:.2e} (< 1e-12), 1e6-step chain max err {:.2e} (< 1e-2), {:.1f} s (< 10 s)",
                      eig_err, sim_err, t)};
}

// --- 2 ---------------------------------------------------------------------

Verdict analytics_vs_simulation() {
  const auto t0 = Clock::now();
  ScenarioConfig cfg;
  cfg.wakeup.p_f = 0.0;  // the closed-form power has no false-alarm branch
  const double pa = pa_of(1e-3);
  const double q = 0.5;
  WakeupParams w = cfg.wakeup;
  w.t3 = 1.0;
  const double t4 = solve_t4(pa, q, w).t4;
  w = device_params(SchemeKind::kWus, cfg.wakeup, t4);

  Rng trng(202);
  std::vector<TrafficModel> models{{pa, q, cfg.rate_active, cfg.rate_idle}};
  const auto trace = generate_trace(models, 1'000'000, trng, false);
  Rng rng(203);
  const auto m = run_scenario(cfg, SchemeKind::kWus, trace, {{pa, q, t4}}, nullptr, rng);

  const auto chain = build_chain(pa, q);
  const double p_closed = mean_power(chain, w);
  const double d_closed = mean_delay(chain, w);
  const double p_err = std::abs(m.mean_power_mw - p_closed) / p_closed;
  const double d_err = std::abs(m.mean_delay() - d_closed) / d_closed;
  const double t = seconds_since(t0);
  return {p_err <= 0.05 && d_err <= 0.05 && t < 60.0,
          fmt::format("t4 {:.2f}: power sim {:.3f} vs closed {:.3f} mW (err {:.1f}%), delay sim {:.2f} vs closed {:.2f} "
                      "TTI (err {:.1f}%), limit 5%, {:.1f} s (< 60 s)",
                      t4, m.mean_power_mw, p_closed, 100 * p_err, m.mean_delay(), d_closed, 100 * d_err, t)};
}

// --- 3 ---------------------------------------------------------------------

Verdict t4_solver() {
  const auto t0 = Clock::now();
  WakeupParams w;
  Rng rng(303);
  int solved = 0;
  double worst = 0.0;
  while (solved < 50) {
    const double pa = 1e-4 + 0.3 * uniform01(rng);
    const double q = 0.95 * uniform01(rng);
    SleepSolution s;
    try {
      s = solve_t4(pa, q, w);
    } catch (const Error&) {
      continue;  // infeasible budget, draw again
    }
    if (s.capped) continue;
    WakeupParams v = w;
    v.t4 = s.t4;
    worst = std::max(worst, std::abs(mean_delay(build_chain(pa, q), v) - w.delay_budget));
    ++solved;
  }
  const double t = seconds_since(t0);
  return {worst < 1e-9 && t < 1.0,
          fmt::format("50 feasible pairs, max |D - 30| = {:.2e} TTI (< 1e-9), {:.3f} s (< 1 s)", worst, t)};
}

// --- 4 ---------------------------------------------------------------------

Verdict gradient_check() {
  const auto t0 = Clock::now();
  LstmModel m(2, 8);
  Rng rng(404);
  m.initialize(rng);
  m.b_out = 0.2;
  std::vector<Eigen::MatrixXd> steps;
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd x(2, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 4.0 * uniform01(rng) - 2.0;
    steps.push_back(x);
  }
  Eigen::RowVectorXd target(4);
  target << 0.3, -1.2, 1.7, 0.0;

  LstmCache cache;
  lstm_forward_batch(m, steps, &cache);
  LstmGradients g(m);
  lstm_gradients(m, cache, target, g);

  auto loss = [&] { return 0.5 * (lstm_forward_batch(m, steps) - target).squaredNorm(); };
  std::map<std::string, double> worst;
  auto check = [&](const char* block, double* p, double analytic) {
    constexpr double h = 1e-6;
    const double saved = *p;
    *p = saved + h;
    const double up = loss();
    *p = saved - h;
    const double down = loss();
    *p = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
    worst[block] = std::max(worst[block], std::abs(analytic - numeric) / scale);
  };
  for (Eigen::Index i = 0; i < m.w_in.size(); ++i) check("w_in", m.w_in.data() + i, g.w_in.data()[i]);
  for (Eigen::Index i = 0; i < m.w_rec.size(); ++i) check("w_rec", m.w_rec.data() + i, g.w_rec.data()[i]);
  for (Eigen::Index i = 0; i < m.bias.size(); ++i) check("bias", m.bias.data() + i, g.bias[i]);
  for (Eigen::Index i = 0; i < m.w_out.size(); ++i) check("w_out", m.w_out.data() + i, g.w_out[i]);
  check("b_out", &m.b_out, g.b_out);

  double all = 0.0;
  std::string parts;
  for (const auto& [k, v] : worst) {
    all = std::max(all, v);
    parts += fmt::format(" {} {:.1e}", k, v);
  }
  const double t = seconds_since(t0);
  return {all < 1e-4 && t < 30.0, fmt::format("max relative error per block:{} (< 1e-4), {:.1f} s (< 30 s)", parts, t)};
}

// --- 5 and 6 ---------------------------------------------------------------

struct PredictorRuns {
  std::vector<double> r;  // NaN when the radicand is negative
  std::vector<double> radicand;
  std::vector<double> final_train_rmse;
  std::vector<double> p_md, p_f;
  double seconds = 0.0;
};

const PredictorRuns& predictor_runs() {
  static const PredictorRuns runs = [] {
    PredictorRuns out;
    const auto t0 = Clock::now();
    ScenarioConfig cfg;
    cfg.lambda_E = 1e-3;
    cfg.q_lo = 0.0;
    cfg.q_hi = 0.3;
    cfg.train_packets = 20'000;
    for (std::uint64_t s = 1; s <= 10; ++s) {
      const auto t = train_predictor(cfg, sub_seed(cfg.master_seed, 0x500 + s));
      out.radicand.push_back(t.test_r_radicand);
      out.r.push_back(t.test_r_radicand >= 0.0 ? std::sqrt(t.test_r_radicand)
                                              : std::numeric_limits<double>::quiet_NaN());
      out.final_train_rmse.push_back(t.result.history.back().train_rmse);
      out.p_md.push_back(t.test_operating_point.miss_detection);
      out.p_f.push_back(t.test_operating_point.false_alarm);
      spdlog::info("seed {}: {} packets, epochs {}, test R radicand {:.4g}, final train RMSE {:.4f}, p_md {:.4f}, p_f {:.4f}",
                   s, t.packets, t.result.history.size(), t.test_r_radicand, out.final_train_rmse.back(),
                   out.p_md.back(), out.p_f.back());
    }
    out.seconds = seconds_since(t0);
    return out;
  }();
  return runs;
}

Verdict predictor_quality() {
  const auto& p = predictor_runs();
  // A negative radicand means no real R: count it below every real value.
  std::vector<double> r;
  for (double v : p.r) r.push_back(std::isnan(v) ? -std::numeric_limits<double>::infinity() : v);
  const double r_med = median(r);
  const double rmse_med = median(p.final_train_rmse);
  const int undefined = static_cast<int>(std::count_if(p.r.begin(), p.r.end(), [](double v) { return std::isnan(v); }));
  return {r_med > 0.90 && rmse_med >= 0.05 && rmse_med <= 0.2 && p.seconds < 900.0,
          fmt::format("median test R {:.4g} (> 0.90; {} of 10 seeds have a negative radicand, median radicand {:.4g}), "
                      "median final training RMSE {:.4f} (band [0.05, 0.2]), {:.0f} s (< 900 s)",
                      r_med, undefined, median(p.radicand), rmse_med, p.seconds)};
}

Verdict operating_point() {
  const auto& p = predictor_runs();
  const double md = median(p.p_md), fa = median(p.p_f);
  const double md_max = *std::max_element(p.p_md.begin(), p.p_md.end());
  const double fa_max = *std::max_element(p.p_f.begin(), p.p_f.end());
  return {md <= 0.025 && fa <= 0.12,
          fmt::format("held-out median p_md {:.4f} (<= 0.025, worst seed {:.4f}), median p_f {:.4f} (<= 0.12, worst "
                      "seed {:.4f})",
                      md, md_max, fa, fa_max)};
}

// --- 7 and 8 ---------------------------------------------------------------

struct TablePoint {
  double fwus_power = 0.0;
  double wus_power = 0.0;
  double eta = 0.0;
  double eta_std = 0.0;
};

struct TableRuns {
  TablePoint sparse, dense;
  double seconds = 0.0;
};

TablePoint table_point(double lambda_E) {
  ScenarioConfig cfg;
  cfg.lambda_E = lambda_E;
  cfg.q_lo = 0.0;
  cfg.q_hi = 1.0;
  cfg.device_count_override = 1;
  const auto training = train_predictor(cfg, sub_seed(cfg.master_seed, 0x747261696eULL));
  const LstmPredictor predictor(training.result.model);
  const std::vector<SchemeKind> schemes{SchemeKind::kWus, SchemeKind::kFwus};
  const auto mc = monte_carlo(cfg, schemes, 20, 1, &predictor);
  TablePoint p;
  p.fwus_power = mc.find(SchemeKind::kFwus)->power_mw.mean;
  p.wus_power = mc.find(SchemeKind::kWus)->power_mw.mean;
  p.eta = mc.eta_vs_wus->mean;
  p.eta_std = mc.eta_vs_wus->std;
  return p;
}

const TableRuns& table_runs() {
  static const TableRuns runs = [] {
    TableRuns out;
    const auto t0 = Clock::now();
    out.sparse = table_point(1e-5);
    out.dense = table_point(1e-2);
    out.seconds = seconds_since(t0);
    return out;
  }();
  return runs;
}

bool within(double v, double centre, double rel) { return v >= centre * (1 - rel) && v <= centre * (1 + rel); }

Verdict power_table() {
  const auto& t = table_runs();
  const bool ok = within(t.sparse.fwus_power, 21.423, 0.25) && within(t.dense.fwus_power, 127.723, 0.25);
  return {ok && t.seconds < 600.0,
          fmt::format("FWuS mean power, 20 runs, 1 MTD: lambda_E=1e-5 {:.3f} mW (band [16.07, 26.78]); "
                      "lambda_E=1e-2 {:.3f} mW (band [95.79, 159.65]); {:.0f} s (< 600 s)",
                      t.sparse.fwus_power, t.dense.fwus_power, t.seconds)};
}

Verdict power_saving_table() {
  const auto& t = table_runs();
  const bool ok = t.sparse.eta >= 0.10 && t.sparse.eta <= 0.26 && t.dense.eta >= 0.20 && t.dense.eta <= 0.36;
  return {ok && t.seconds < 900.0,
          fmt::format("eta vs WuS: lambda_E=1e-5 {:.1f}% +- {:.1f} (band [10, 26]%, WuS {:.3f} mW); lambda_E=1e-2 "
                      "{:.1f}% +- {:.1f} (band [20, 36]%, WuS {:.3f} mW); {:.0f} s (< 900 s)",
                      100 * t.sparse.eta, 100 * t.sparse.eta_std, t.sparse.wus_power, 100 * t.dense.eta,
                      100 * t.dense.eta_std, t.dense.wus_power, t.seconds)};
}

// --- 9 ---------------------------------------------------------------------

// Device sweeps train one predictor per point; these settings keep the 30
// trainings affordable.
ScenarioConfig sweep_config() {
  ScenarioConfig cfg;
  cfg.runs = 5;
  cfg.horizon = 200'000;
  cfg.train_packets = 5'000;
  cfg.train.max_epochs = 10;
  return cfg;
}

Verdict delay_budget() {
  ScenarioConfig cfg = sweep_config();
  cfg.output_dir = scratch("delay");
  const std::vector<SchemeKind> schemes{SchemeKind::kDrx, SchemeKind::kWus, SchemeKind::kFwus};
  const auto out = run_experiment(cfg, Experiment::kDelayFig9, schemes);

  double worst = 0.0, gap_lo = INFINITY, gap_hi = -INFINITY;
  std::map<std::string, std::map<SchemeKind, double>> by_point;
  for (const auto& r : out.rows) by_point[r.scenario][r.scheme] = r.mean_delay_tti;
  std::string worst_at;
  std::map<SchemeKind, double> scheme_worst;
  for (const auto& [id, d] : by_point) {
    for (const auto& [k, v] : d) {
      scheme_worst[k] = std::max(scheme_worst[k], v);
      if (v > worst) {
        worst = v;
        worst_at = fmt::format("{} {}", id, to_string(k));
      }
    }
    const double gap = d.at(SchemeKind::kFwus) - d.at(SchemeKind::kWus);
    gap_lo = std::min(gap_lo, gap);
    gap_hi = std::max(gap_hi, gap);
  }
  std::string per_scheme;
  for (const auto& [k, v] : scheme_worst) per_scheme += fmt::format(" {} {:.2f}", to_string(k), v);
  std::filesystem::remove_all(cfg.output_dir);
  return {worst <= 30.0 && gap_lo > 0.0 && gap_hi <= 8.0,
          fmt::format("{} points: worst mean delay {:.2f} TTI at {} (<= 30; per scheme{}); FWuS-WuS gap in "
                      "[{:.2f}, {:.2f}] TTI (must lie in (0, 8])",
                      by_point.size(), worst, worst_at, per_scheme, gap_lo, gap_hi)};
}

// --- 10 --------------------------------------------------------------------

Verdict dominance() {
  ScenarioConfig cfg;  // lambda_E = 1e-3 provisions t4; the traffic itself is silent
  int ok = 0;
  double min_margin_fw = INFINITY, min_margin_wd = INFINITY;
  for (std::uint64_t run = 0; run < 20; ++run) {
    Rng rng(sub_seed(1010, run));
    const int n = 5;
    std::vector<TrafficModel> models;
    std::vector<DeviceSetup> setups;
    for (int d = 0; d < n; ++d) {
      const double q = uniform01(rng) * 0.999;
      models.push_back({0.0, q, 1.0, 0.0});
      setups.push_back({0.0, q, static_sleep_time(cfg, q)});
    }
    const auto trace = generate_trace(models, 1'000'000, rng, false);
    OraclePredictor silent(trace.arrival_slots());
    std::map<SchemeKind, double> e;
    for (auto k : {SchemeKind::kDrx, SchemeKind::kWus, SchemeKind::kFwus}) {
      Rng srng(sub_seed(sub_seed(1010, run), 1 + static_cast<std::uint64_t>(k)));
      e[k] = run_scenario(cfg, k, trace, setups, &silent, srng).energy_mj;
    }
    if (e[SchemeKind::kFwus] <= e[SchemeKind::kWus] && e[SchemeKind::kWus] <= e[SchemeKind::kDrx]) ++ok;
    min_margin_fw = std::min(min_margin_fw, e[SchemeKind::kWus] - e[SchemeKind::kFwus]);
    min_margin_wd = std::min(min_margin_wd, e[SchemeKind::kDrx] - e[SchemeKind::kWus]);
  }
  return {ok == 20, fmt::format("{} of 20 runs ordered FWuS <= WuS <= DRX (smallest margins {:.3g} mJ and {:.3g} mJ)",
                                ok, min_margin_fw, min_margin_wd)};
}

// --- 11 --------------------------------------------------------------------

Verdict dynamic_adaptation() {
  ScenarioConfig cfg;
  cfg.horizon = 1'000'000;  // five densities, 2e5 TTIs each
  cfg.device_count_override = 5;
  cfg.output_dir = scratch("dynamic");
  const std::vector<SchemeKind> schemes{SchemeKind::kFwus};
  const auto out = run_experiment(cfg, Experiment::kDynamicFig10, schemes);
  std::string detail;
  bool ok = !out.checks.empty();
  for (const auto& c : out.checks) {
    ok = ok && c.pass;
    detail += fmt::format("{}{} = {:.4g}", detail.empty() ? "" : "; ", c.name, c.value);
  }
  std::string means;
  for (const auto& r : out.rows) means += fmt::format(" {} {:.2f} mW", r.scenario, r.mean_power_mw);
  std::filesystem::remove_all(cfg.output_dir);
  return {ok, detail + " (trend must be 1, overshoot difference > 0);" + means};
}

// --- 12 --------------------------------------------------------------------

std::map<std::string, std::string> csv_files(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream f(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    out[std::filesystem::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

Verdict determinism() {
  ScenarioConfig cfg = sweep_config();
  const std::vector<SchemeKind> schemes{SchemeKind::kDrx, SchemeKind::kWus, SchemeKind::kFwus};
  const auto a_dir = scratch("table6_a"), b_dir = scratch("table6_b");
  cfg.output_dir = a_dir;
  run_experiment(cfg, Experiment::kTable6, schemes);
  cfg.output_dir = b_dir;
  run_experiment(cfg, Experiment::kTable6, schemes);
  const auto a = csv_files(a_dir), b = csv_files(b_dir);
  std::size_t bytes = 0;
  for (const auto& [k, v] : a) bytes += v.size();
  std::filesystem::remove_all(a_dir);
  std::filesystem::remove_all(b_dir);
  return {!a.empty() && a == b, fmt::format("{} CSV files ({} bytes) compared, {}", a.size(), bytes,
                                            a == b ? "byte-identical" : "DIFFERENT")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "steady-state oracle", steady_state},
      {2, "analytics vs simulation", analytics_vs_simulation},
      {3, "t4 solver back-substitution", t4_solver},
      {4, "LSTM gradient check", gradient_check},
      {5, "predictor quality", predictor_quality},
      {6, "decision operating point", operating_point},
      {7, "FWuS power table", power_table},
      {8, "relative power saving", power_saving_table},
      {9, "delay budget", delay_budget},
      {10, "zero-traffic dominance", dominance},
      {11, "dynamic density adaptation", dynamic_adaptation},
      {12, "table6 determinism", determinism},
  };

  std::set<int> wanted;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "-v") {
      verbose = true;
      continue;
    }
    try {
      wanted.insert(std::stoi(a));
    } catch (const std::exception&) {
      std::cerr << "usage: " << argv[0] << " [-v] [criterion number ...]\n";
      return 2;
    }
  }
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Verdict v;
    const auto t0 = Clock::now();
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << fmt::format("{} {:02d} {}: {} [{:.1f} s]", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail,
                             seconds_since(t0))
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
