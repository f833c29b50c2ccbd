#include "fwus/experiments.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "fwus/checkpoint.hpp"
#include "fwus/csv.hpp"
#include "fwus/dynamic.hpp"
#include "fwus/error.hpp"
#include "fwus/monte_carlo.hpp"

namespace fwus {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Scenario {
  double lambda_E;
  double q_lo;
  double q_hi;
};

// Event density / burstiness combinations of the reference tables.
constexpr Scenario kTableScenarios[] = {{1e-5, 0.0, 1.0}, {1e-2, 0.0, 1.0}, {1e-3, 0.0, 0.3}, {1e-3, 0.7, 1.0}};

std::string scenario_id(const Scenario& s, int devices) {
  return fmt::format("lambdaE={}_q={}-{}_mtd={}", format_number(s.lambda_E), format_number(s.q_lo),
                     format_number(s.q_hi), devices);
}

ScenarioConfig with_scenario(const ScenarioConfig& base, const Scenario& s, int devices) {
  ScenarioConfig c = base;
  c.lambda_E = s.lambda_E;
  c.q_lo = s.q_lo;
  c.q_hi = s.q_hi;
  c.device_count_override = devices;
  return c;
}

bool has(std::span<const SchemeKind> schemes, SchemeKind k) {
  return std::find(schemes.begin(), schemes.end(), k) != schemes.end();
}

BandCheck band(std::string name, double value, double lo, double hi) {
  return {std::move(name), value, lo, hi, value >= lo && value <= hi};
}

// Trains once per distinct traffic configuration and keeps the model around.
class PredictorCache {
 public:
  const LstmPredictor* get(const ScenarioConfig& cfg, std::span<const SchemeKind> schemes) {
    if (!has(schemes, SchemeKind::kFwus) || cfg.retrain_per_run) return nullptr;
    const auto key = std::make_tuple(cfg.lambda_E, cfg.q_lo, cfg.q_hi, scenario_device_count(cfg));
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      auto training = train_predictor(cfg, sub_seed(cfg.master_seed, 0x747261696eULL));
      it = cache_.emplace(key, LstmPredictor(std::move(training.result.model))).first;
    }
    return &it->second;
  }

 private:
  std::map<std::tuple<double, double, double, int>, LstmPredictor> cache_;
};

std::vector<ReportRow> rows_for(const std::string& id, const ScenarioConfig& cfg, const MonteCarloResult& mc) {
  std::vector<ReportRow> rows;
  for (const auto& s : mc.schemes) {
    ReportRow r;
    r.scenario = id;
    r.scheme = s.scheme;
    r.mean_power_mw = s.power_mw.mean;
    r.power_std = s.power_mw.std;
    r.mean_delay_tti = s.delay_tti.mean;
    r.delay_std = s.delay_tti.std;
    r.eta_vs_wus = s.scheme == SchemeKind::kFwus && mc.eta_vs_wus ? mc.eta_vs_wus->mean : kNaN;
    r.eta_vs_drx = s.scheme == SchemeKind::kFwus && mc.eta_vs_drx ? mc.eta_vs_drx->mean : kNaN;
    r.p_md = s.miss_detection();
    r.p_f = s.false_alarm();
    r.runs = static_cast<int>(mc.runs.size());
    r.seed = cfg.master_seed;
    rows.push_back(r);
  }
  return rows;
}

MonteCarloResult run_point(const ScenarioConfig& cfg, std::span<const SchemeKind> schemes, PredictorCache& cache) {
  spdlog::info("scenario lambda_E={} q=[{}, {}] devices={} runs={}", cfg.lambda_E, cfg.q_lo, cfg.q_hi,
               scenario_device_count(cfg), cfg.runs);
  return monte_carlo(cfg, schemes, cfg.runs, cfg.workers, cache.get(cfg, schemes));
}

void write_curve(const std::filesystem::path& path, const std::vector<std::tuple<double, double, double>>& points) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::kIo, "cannot write " + path.string());
  CsvWriter w(f);
  w.row({"x", "y", "std"});
  for (const auto& [x, y, s] : points) {
    w.field(x).field(y).field(s);
    w.end_row();
  }
}

// Per-device sweep over 1..10 devices for one scenario; returns the per-scheme
// results in device order.
std::vector<MonteCarloResult> device_sweep(const ScenarioConfig& cfg, const Scenario& s,
                                           std::span<const SchemeKind> schemes, PredictorCache& cache,
                                           ExperimentOutcome& out) {
  std::vector<MonteCarloResult> results;
  for (int n = 1; n <= 10; ++n) {
    const ScenarioConfig c = with_scenario(cfg, s, n);
    results.push_back(run_point(c, schemes, cache));
    auto rows = rows_for(scenario_id(s, n), c, results.back());
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  return results;
}

std::string curve_name(const char* what, const Scenario& s, SchemeKind k) {
  return fmt::format("{}_lambdaE={}_q={}-{}_{}.csv", what, format_number(s.lambda_E), format_number(s.q_lo),
                     format_number(s.q_hi), to_string(k));
}

void table5(const ScenarioConfig& cfg, std::span<const SchemeKind> schemes, ExperimentOutcome& out) {
  PredictorCache cache;
  for (const auto& s : kTableScenarios) {
    for (int n : {1, 10}) {
      const ScenarioConfig c = with_scenario(cfg, s, n);
      const auto mc = run_point(c, schemes, cache);
      auto rows = rows_for(scenario_id(s, n), c, mc);
      out.rows.insert(out.rows.end(), rows.begin(), rows.end());
      const auto* f = mc.find(SchemeKind::kFwus);
      if (f && n == 1 && s.lambda_E == 1e-5) {
        out.checks.push_back(band("fwus_power_mw_lambdaE=1e-05_mtd=1", f->power_mw.mean, 21.423 * 0.75, 21.423 * 1.25));
      }
      if (f && n == 1 && s.lambda_E == 1e-2) {
        out.checks.push_back(band("fwus_power_mw_lambdaE=0.01_mtd=1", f->power_mw.mean, 127.723 * 0.75, 127.723 * 1.25));
      }
    }
  }
}

void table6(const ScenarioConfig& cfg, std::span<const SchemeKind> schemes, ExperimentOutcome& out) {
  PredictorCache cache;
  for (const auto& s : kTableScenarios) {
    const ScenarioConfig c = with_scenario(cfg, s, 1);
    const auto mc = run_point(c, schemes, cache);
    auto rows = rows_for(scenario_id(s, 1), c, mc);
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    if (!mc.eta_vs_wus) continue;
    const double eta = mc.eta_vs_wus->mean;
    if (s.lambda_E == 1e-5) out.checks.push_back(band("eta_vs_wus_lambdaE=1e-05", eta, 0.10, 0.26));
    if (s.lambda_E == 1e-2) out.checks.push_back(band("eta_vs_wus_lambdaE=0.01", eta, 0.20, 0.36));
    if (s.lambda_E == 1e-3 && s.q_lo == 0.7) out.checks.push_back(band("eta_vs_wus_lambdaE=0.001_q=0.7-1", eta, 0.13, 0.26));
  }
}

void delay_fig9(const ScenarioConfig& cfg, std::span<const SchemeKind> schemes, ExperimentOutcome& out) {
  PredictorCache cache;
  const auto curves = cfg.output_dir / "curves";
  double worst = 0.0;
  double gap_lo = std::numeric_limits<double>::infinity();
  double gap_hi = -std::numeric_limits<double>::infinity();
  for (const Scenario s : {Scenario{1e-5, 0.0, 1.0}, Scenario{1e-3, 0.0, 1.0}, Scenario{1e-2, 0.0, 1.0}}) {
    const auto results = device_sweep(cfg, s, schemes, cache, out);
    for (SchemeKind k : schemes) {
      std::vector<std::tuple<double, double, double>> pts;
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto* m = results[i].find(k);
        pts.emplace_back(static_cast<double>(i + 1), m->delay_tti.mean, m->delay_tti.std);
        worst = std::max(worst, m->delay_tti.mean);
      }
      write_curve(curves / curve_name("delay", s, k), pts);
    }
    if (has(schemes, SchemeKind::kFwus) && has(schemes, SchemeKind::kWus)) {
      for (const auto& r : results) {
        const double gap = r.find(SchemeKind::kFwus)->delay_tti.mean - r.find(SchemeKind::kWus)->delay_tti.mean;
        gap_lo = std::min(gap_lo, gap);
        gap_hi = std::max(gap_hi, gap);
      }
    }
  }
  out.checks.push_back(band("max_mean_delay_tti", worst, 0.0, cfg.wakeup.delay_budget));
  if (std::isfinite(gap_lo)) {
    out.checks.push_back(band("min_fwus_minus_wus_delay_tti", gap_lo, std::nextafter(0.0, 1.0), 8.0));
    out.checks.push_back(band("max_fwus_minus_wus_delay_tti", gap_hi, std::nextafter(0.0, 1.0), 8.0));
  }
}

void power_fig8(const ScenarioConfig& cfg, std::span<const SchemeKind> schemes, ExperimentOutcome& out) {
  PredictorCache cache;
  const auto curves = cfg.output_dir / "curves";
  for (const auto& s : kTableScenarios) {
    const auto results = device_sweep(cfg, s, schemes, cache, out);
    for (SchemeKind k : schemes) {
      std::vector<std::tuple<double, double, double>> pts;
      int drops = 0;
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto* m = results[i].find(k);
        pts.emplace_back(static_cast<double>(i + 1), m->power_mw.mean, m->power_mw.std);
        if (i > 0 && m->power_mw.mean < std::get<1>(pts[i - 1])) ++drops;
      }
      write_curve(curves / curve_name("power", s, k), pts);
      out.checks.push_back(band(fmt::format("power_decreases_{}", curve_name("", s, k)), drops, 0, 0));
    }
  }
}

std::vector<DensityStep> default_sweep(const ScenarioConfig& cfg, bool increasing) {
  if (!cfg.lambda_E_schedule.empty()) {
    auto s = cfg.lambda_E_schedule;
    if (!increasing) {
      // Same boundaries, densities reversed.
      for (std::size_t k = 0; k < s.size() / 2; ++k) std::swap(s[k].lambda_E, s[s.size() - 1 - k].lambda_E);
    }
    return s;
  }
  std::vector<DensityStep> s;
  const std::int64_t seg = std::max<std::int64_t>(1, cfg.horizon / 5);
  for (int k = 0; k < 5; ++k) {
    const int e = increasing ? -5 + k : -1 - k;
    s.push_back({k * seg, std::pow(10.0, e)});
  }
  return s;
}

void dynamic_fig10(const ScenarioConfig& cfg, std::span<const SchemeKind> schemes, ExperimentOutcome& out) {
  const auto curves = cfg.output_dir / "curves";
  std::optional<std::size_t> fwus_index;
  for (std::size_t k = 0; k < schemes.size(); ++k)
    if (schemes[k] == SchemeKind::kFwus) fwus_index = k;

  std::map<bool, SweepAnalysis> analysis;
  for (bool increasing : {true, false}) {
    const auto schedule = default_sweep(cfg, increasing);
    ScenarioConfig c = cfg;
    c.lambda_E = schedule.front().lambda_E;
    LstmModel model;
    if (fwus_index) model = train_predictor(c, sub_seed(cfg.master_seed, 0x747261696eULL)).result.model;
    const auto result = dynamic_density_run(c, schedule, schemes, model, sub_seed(cfg.master_seed, 0xf10));

    const auto name = increasing ? "dynamic_increasing.csv" : "dynamic_decreasing.csv";
    std::ofstream f(curves / name);
    if (!f) fail(ErrorCode::kIo, std::string("cannot write ") + name);
    CsvWriter w(f);
    w.field("window_start").field("lambda_E");
    for (SchemeKind k : schemes) w.field(to_string(k));
    w.end_row();
    for (std::size_t i = 0; i < result.window_start.size(); ++i) {
      w.field(static_cast<long long>(result.window_start[i])).field(result.window_lambda_E[i]);
      for (const auto& series : result.power_mw) w.field(series[i]);
      w.end_row();
    }
    for (std::size_t k = 0; k < schemes.size(); ++k) {
      ReportRow r;
      r.scenario = increasing ? "sweep_increasing" : "sweep_decreasing";
      r.scheme = schemes[k];
      const auto& series = result.power_mw[k];
      std::vector<double> v(series.begin(), series.end());
      const Stats st = Stats::of(v);
      r.mean_power_mw = st.mean;
      r.power_std = st.std;
      r.mean_delay_tti = kNaN;
      r.delay_std = kNaN;
      r.eta_vs_wus = kNaN;
      r.eta_vs_drx = kNaN;
      r.p_md = kNaN;
      r.p_f = kNaN;
      r.runs = 1;
      r.seed = cfg.master_seed;
      out.rows.push_back(r);
    }
    if (fwus_index) analysis[increasing] = analyze_sweep(result, *fwus_index, schedule);
  }
  if (fwus_index) {
    out.checks.push_back(band("increasing_sweep_trend_non_decreasing", analysis[true].non_decreasing ? 1 : 0, 1, 1));
    const double diff = analysis[true].max_overshoot - analysis[false].max_overshoot;
    out.checks.push_back(band("overshoot_increasing_minus_decreasing_mw", diff, std::nextafter(0.0, 1.0),
                              std::numeric_limits<double>::infinity()));
  }
}

void train_only(const ScenarioConfig& cfg, ExperimentOutcome& out) {
  const auto t = train_predictor(cfg, sub_seed(cfg.master_seed, 0x747261696eULL));
  save_checkpoint(t.result.model, cfg.output_dir / "model.json");
  std::ofstream f(cfg.output_dir / "curves" / "training.csv");
  if (!f) fail(ErrorCode::kIo, "cannot write training.csv");
  CsvWriter w(f);
  w.row({"epoch", "train_rmse", "validation_rmse", "validation_rmse_tti"});
  for (const auto& e : t.result.history) {
    w.field(e.epoch).field(e.train_rmse).field(e.validation_rmse).field(e.validation_rmse_tti);
    w.end_row();
  }
  ReportRow r;
  r.scenario = fmt::format("lambdaE={}_q={}-{}", format_number(cfg.lambda_E), format_number(cfg.q_lo),
                           format_number(cfg.q_hi));
  r.scheme = SchemeKind::kFwus;
  r.mean_power_mw = kNaN;
  r.power_std = kNaN;
  r.mean_delay_tti = kNaN;
  r.delay_std = kNaN;
  r.eta_vs_wus = kNaN;
  r.eta_vs_drx = kNaN;
  r.p_md = t.test_operating_point.miss_detection;
  r.p_f = t.test_operating_point.false_alarm;
  r.runs = 1;
  r.seed = cfg.master_seed;
  out.rows.push_back(r);
  out.checks.push_back(band("test_miss_detection", r.p_md, 0.0, 0.025));
  out.checks.push_back(band("test_false_alarm", r.p_f, 0.0, 0.12));
  out.checks.push_back(band("test_r_radicand", t.test_r_radicand, 0.81, 1.0));
}

}  // namespace

std::string_view to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::kTable5: return "table5";
    case Experiment::kTable6: return "table6";
    case Experiment::kDelayFig9: return "delay_fig9";
    case Experiment::kPowerFig8: return "power_fig8";
    case Experiment::kDynamicFig10: return "dynamic_fig10";
    case Experiment::kTrainOnly: return "train_only";
  }
  return "?";
}

Experiment experiment_from_string(std::string_view name) {
  for (auto e : {Experiment::kTable5, Experiment::kTable6, Experiment::kDelayFig9, Experiment::kPowerFig8,
                 Experiment::kDynamicFig10, Experiment::kTrainOnly}) {
    if (to_string(e) == name) return e;
  }
  fail(ErrorCode::kUnknownExperiment,
       "unknown experiment '" + std::string(name) +
           "' (expected table5, table6, delay_fig9, power_fig8, dynamic_fig10 or train_only)");
}

bool ExperimentOutcome::all_pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const BandCheck& c) { return c.pass; });
}

void write_report_csv(std::span<const ReportRow> rows, std::ostream& out) {
  CsvWriter w(out);
  w.row({"scenario", "scheme", "mean_power_mw", "power_std", "mean_delay_tti", "delay_std", "eta_vs_wus",
         "eta_vs_drx", "p_md", "p_f", "runs", "seed"});
  for (const auto& r : rows) {
    w.field(r.scenario).field(to_string(r.scheme)).field(r.mean_power_mw).field(r.power_std).field(r.mean_delay_tti);
    w.field(r.delay_std).field(r.eta_vs_wus).field(r.eta_vs_drx).field(r.p_md).field(r.p_f).field(r.runs);
    w.field(static_cast<unsigned long long>(r.seed));
    w.end_row();
  }
}

ExperimentOutcome run_experiment(const ScenarioConfig& cfg, Experiment experiment,
                                 std::span<const SchemeKind> schemes) {
  cfg.validate();
  if (schemes.empty()) fail(ErrorCode::kInvalidParameter, "no scheme selected");
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir / "curves", ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + cfg.output_dir.string() + ": " + ec.message());
  {
    std::ofstream f(cfg.output_dir / "effective_config.yaml");
    f << dump_config(cfg);
    if (!f) fail(ErrorCode::kIo, "cannot write effective_config.yaml");
  }

  ExperimentOutcome out;
  switch (experiment) {
    case Experiment::kTable5: table5(cfg, schemes, out); break;
    case Experiment::kTable6: table6(cfg, schemes, out); break;
    case Experiment::kDelayFig9: delay_fig9(cfg, schemes, out); break;
    case Experiment::kPowerFig8: power_fig8(cfg, schemes, out); break;
    case Experiment::kDynamicFig10: dynamic_fig10(cfg, schemes, out); break;
    case Experiment::kTrainOnly: train_only(cfg, out); break;
  }

  {
    std::ofstream f(cfg.output_dir / "report.csv");
    write_report_csv(out.rows, f);
    if (!f) fail(ErrorCode::kIo, "cannot write report.csv");
  }
  nlohmann::json summary;
  summary["experiment"] = to_string(experiment);
  summary["rows"] = out.rows.size();
  summary["all_pass"] = out.all_pass();
  summary["checks"] = nlohmann::json::array();
  for (const auto& c : out.checks) {
    nlohmann::json j{{"name", c.name}, {"value", c.value}, {"lo", c.lo}, {"pass", c.pass}};
    j["hi"] = std::isfinite(c.hi) ? nlohmann::json(c.hi) : nlohmann::json(nullptr);
    summary["checks"].push_back(j);
  }
  std::ofstream f(cfg.output_dir / "summary.json");
  f << summary.dump(2) << '\n';
  if (!f) fail(ErrorCode::kIo, "cannot write summary.json");
  return out;
}

}  // namespace fwus
