#include "fwus/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include <spdlog/spdlog.h>

#include "fwus/error.hpp"
#include "fwus/metrics.hpp"
#include "fwus/spatial.hpp"

namespace fwus {
namespace {

double draw_q(const ScenarioConfig& cfg, Rng& rng) {
  const double q = cfg.q_lo + (cfg.q_hi - cfg.q_lo) * uniform01(rng);
  return std::min(q, cfg.q_cap);
}

double reference_q(const ScenarioConfig& cfg) { return std::min(0.5 * (cfg.q_lo + cfg.q_hi), cfg.q_cap); }

std::uint64_t scheme_stream(std::uint64_t run_seed, SchemeKind kind) {
  return sub_seed(run_seed, 1 + static_cast<std::uint64_t>(kind));
}

double scheme_key(const SchemeMetrics& m) { return m.mean_power_mw; }

}  // namespace

Stats Stats::of(std::span<const double> values) {
  Stats s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  s.min = values.front();
  s.max = values.front();
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

double SchemeSummary::miss_detection() const noexcept { return confusion.miss_detection(); }
double SchemeSummary::false_alarm() const noexcept { return confusion.false_alarm(); }

const SchemeSummary* MonteCarloResult::find(SchemeKind kind) const noexcept {
  for (const auto& s : schemes)
    if (s.scheme == kind) return &s;
  return nullptr;
}

int scenario_device_count(const ScenarioConfig& cfg) { return cfg.device_count_override.value_or(cfg.train_devices); }

std::vector<std::int64_t> training_arrivals(const ScenarioConfig& cfg, std::uint64_t seed, std::uint64_t* packets) {
  Rng rng(seed);
  const double pa = activation_probability_analytic(cfg.lambda_E, InfluenceFunction::exponential(), cfg.integral_form());
  const int n = scenario_device_count(cfg);
  if (n < 1) fail(ErrorCode::kInvalidParameter, "training trace needs at least one device");
  std::vector<TrafficModel> models(static_cast<std::size_t>(n));
  for (auto& m : models) {
    m.activation_prob = pa;
    m.burst_persistence = draw_q(cfg, rng);
    m.rate_active = cfg.rate_active;
    m.rate_idle = cfg.rate_idle;
  }
  TraceGenerator gen(models.size(), false);
  constexpr std::int64_t kChunk = 1'000;  // small, so dense scenarios stop near train_packets
  while (gen.trace().total_packets() < cfg.train_packets && gen.now() < cfg.train_horizon_max) {
    gen.advance(models, std::min(kChunk, cfg.train_horizon_max - gen.now()), rng);
  }
  if (packets) *packets = gen.trace().total_packets();
  return gen.trace().arrival_slots();
}

PredictorTraining train_predictor(const ScenarioConfig& cfg, std::uint64_t seed) {
  PredictorTraining out;
  const auto slots = training_arrivals(cfg, seed, &out.packets);
  TrainConfig tc = cfg.train;
  tc.seed = mix_seed(seed ^ tc.seed);
  const ForecastDataset data = make_dataset(slots, tc);

  const double t4 = static_sleep_time(cfg, reference_q(cfg));
  out.phase_period = t4;
  out.result = train(make_model(data, tc, t4), data, tc);
  LstmModel& model = out.result.model;

  const auto validation = predict_range(model, data, data.train_end, data.validation_end);
  out.calibration = calibrate_margin(validation, t4, cfg.wakeup.p_md, cfg.wakeup.p_f);
  model.margin = out.calibration.margin;

  const auto test = predict_range(model, data, data.validation_end, data.sample_count());
  out.test_operating_point = evaluate_margin(test, t4, model.margin);
  out.test_operating_point.meets_targets = out.test_operating_point.miss_detection <= cfg.wakeup.p_md &&
                                           out.test_operating_point.false_alarm <= cfg.wakeup.p_f;

  std::vector<double> g, go;
  for (const auto& r : test) {
    g.push_back(r.predicted);
    go.push_back(r.observed);
  }
  out.test_rmse_tti = rmse(g, go);
  out.test_r_radicand = r_metric_radicand(g, go);
  g.clear();
  go.clear();
  for (const auto& r : validation) {
    g.push_back(r.predicted);
    go.push_back(r.observed);
  }
  out.validation_r_radicand = r_metric_radicand(g, go);
  spdlog::info("predictor: {} packets, {} samples, best epoch {}, margin {:.2f}, test p_md {:.4f} p_f {:.4f}",
               out.packets, data.sample_count(), out.result.best_epoch, model.margin,
               out.test_operating_point.miss_detection, out.test_operating_point.false_alarm);
  return out;
}

RunMetrics simulate_run(const ScenarioConfig& cfg, std::span<const SchemeKind> schemes, std::size_t run_index,
                        const InterArrivalPredictor* predictor) {
  RunMetrics run;
  run.seed = sub_seed(cfg.master_seed, run_index);
  Rng rng(run.seed);

  // A run with no device has nothing to measure; redraw the deployment.
  Deployment dep = sample_deployment(cfg, rng);
  for (int tries = 0; dep.devices.empty(); ++tries) {
    if (tries >= 1000) fail(ErrorCode::kInvalidParameter, "deployment never produced a device");
    dep = sample_deployment(cfg, rng);
  }
  run.devices = dep.devices.size();
  run.activation_prob = per_device_activation(dep, InfluenceFunction::exponential());

  std::vector<TrafficModel> models(run.devices);
  std::vector<DeviceSetup> setups(run.devices);
  for (std::size_t d = 0; d < run.devices; ++d) {
    const double q = draw_q(cfg, rng);
    run.burst_persistence.push_back(q);
    run.t4.push_back(static_sleep_time(cfg, q));
    models[d] = {run.activation_prob[d], q, cfg.rate_active, cfg.rate_idle};
    setups[d] = {run.activation_prob[d], q, run.t4[d]};
  }
  const TrafficTrace trace = generate_trace(models, cfg.horizon, rng, false);

  std::optional<LstmPredictor> own;
  const bool wants_fwus = std::find(schemes.begin(), schemes.end(), SchemeKind::kFwus) != schemes.end();
  if (wants_fwus && cfg.retrain_per_run) {
    own.emplace(train_predictor(cfg, sub_seed(run.seed, 0x7472)).result.model);
    predictor = &*own;
  }

  for (SchemeKind kind : schemes) {
    Rng srng(scheme_stream(run.seed, kind));
    run.schemes.push_back(run_scenario(cfg, kind, trace, setups, predictor, srng));
  }
  return run;
}

MonteCarloResult monte_carlo(const ScenarioConfig& cfg, std::span<const SchemeKind> schemes, int runs, int workers,
                             const InterArrivalPredictor* predictor) {
  if (runs < 1) fail(ErrorCode::kInvalidParameter, "runs must be >= 1");
  const bool wants_fwus = std::find(schemes.begin(), schemes.end(), SchemeKind::kFwus) != schemes.end();
  if (wants_fwus && !cfg.retrain_per_run && (!predictor || !predictor->ready())) {
    fail(ErrorCode::kMissingPredictor, "FWuS needs a trained predictor");
  }

  MonteCarloResult out;
  out.runs.resize(static_cast<std::size_t>(runs));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < out.runs.size(); i = next++) {
      try {
        out.runs[i] = simulate_run(cfg, schemes, i, predictor);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = out.runs.size();
      }
    }
  };
  const int n = std::clamp(workers, 1, runs);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  for (SchemeKind kind : schemes) {
    SchemeSummary s;
    s.scheme = kind;
    std::vector<double> power, delay;
    for (const auto& r : out.runs) {
      const auto* m = r.find(kind);
      power.push_back(scheme_key(*m));
      if (m->delays.packets > 0) delay.push_back(m->mean_delay());
      s.confusion += m->confusion;
      s.channel_misses += m->channel_misses;
      s.false_alarms += m->false_alarms;
    }
    s.power_mw = Stats::of(power);
    s.delay_tti = Stats::of(delay);
    out.schemes.push_back(s);
  }

  auto eta_stats = [&](SchemeKind bench) -> std::optional<Stats> {
    if (!out.find(SchemeKind::kFwus) || !out.find(bench)) return std::nullopt;
    std::vector<double> v;
    for (const auto& r : out.runs) v.push_back(r.eta(SchemeKind::kFwus, bench));
    return Stats::of(v);
  };
  out.eta_vs_wus = eta_stats(SchemeKind::kWus);
  out.eta_vs_drx = eta_stats(SchemeKind::kDrx);
  return out;
}

}  // namespace fwus
