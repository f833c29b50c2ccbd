#include "fwus/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "fwus/error.hpp"
#include "fwus/metrics.hpp"
#include "fwus/spatial.hpp"

namespace fwus {


int CoordinatorPlanner::beacons_to_skip(double now, double t4) {
  if (history_.empty()) return 0;
  if (!cached_ || version_ != history_.version()) {
    gap_ = predictor_.predict_gap(history_);
    version_ = history_.version();
    cached_ = true;
  }
  const double elapsed = now - static_cast<double>(history_.last());
  const double t_sleep = decide_sleep(gap_, elapsed, t4, predictor_.margin());
  const double skips = std::min(std::round(t_sleep / t4) - 1.0, max_skips_);
  return static_cast<int>(std::max(0.0, skips));
}

WakeupParams device_params(SchemeKind scheme, WakeupParams base, double t4) {
  base.t3 = 1.0;
  base.t4 = t4;
  if (scheme == SchemeKind::kDrx) {
    base.t1 = base.t_on;
    base.pw1 = base.pw3;
  }
  return base;
}

const SchemeMetrics* RunMetrics::find(SchemeKind kind) const noexcept {
  for (const auto& s : schemes)
    if (s.scheme == kind) return &s;
  return nullptr;
}

double RunMetrics::eta(SchemeKind scheme, SchemeKind benchmark) const {
  const auto* a = find(scheme);
  const auto* b = find(benchmark);
  if (!a || !b) return std::numeric_limits<double>::quiet_NaN();
  return power_saving(a->mean_power_mw, b->mean_power_mw);
}

double static_sleep_time(const ScenarioConfig& cfg, double burst_persistence) {
  const double pa = activation_probability_analytic(cfg.lambda_E, InfluenceFunction::exponential(), cfg.integral_form());
  WakeupParams base = cfg.wakeup;
  base.t3 = 1.0;
  try {
    return std::max(1.0, solve_t4(pa, burst_persistence, base).t4);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoFeasibleSleep) throw;
    return 1.0;
  }
}

SchemeMetrics run_scenario(const ScenarioConfig& cfg, SchemeKind scheme, const TrafficTrace& trace,
                           const std::vector<DeviceSetup>& devices, const InterArrivalPredictor* predictor, Rng& rng,
                           const ScenarioOptions& options) {
  if (devices.size() != trace.device_count()) fail(ErrorCode::kInvalidParameter, "device setups do not match the trace");
  if (scheme == SchemeKind::kFwus && (!predictor || !predictor->ready())) {
    fail(ErrorCode::kMissingPredictor, "FWuS needs a trained predictor");
  }

  std::vector<DeviceRadio> radios;
  radios.reserve(devices.size());
  for (const auto& d : devices) {
    radios.emplace_back(scheme, device_params(scheme, cfg.wakeup, d.t4));
    radios.back().delays().keep_samples = options.keep_delay_samples;
  }
  if (options.state_log && !radios.empty()) radios.front().set_log(options.state_log);

  ArrivalHistory history(64);
  std::optional<CoordinatorPlanner> planner;
  if (scheme == SchemeKind::kFwus) {
    planner.emplace(*predictor, history, static_cast<double>(trace.horizon) + 1.0);
    for (auto& r : radios) r.set_planner(&*planner);
  }

  std::vector<std::size_t> cursor(radios.size(), 0);
  for (std::int64_t slot = 0; slot < trace.horizon; ++slot) {
    if (trace.arrivals[static_cast<std::size_t>(slot)] > 0) history.push(slot);
    for (std::size_t d = 0; d < radios.size(); ++d) {
      const auto& arr = trace.device_arrivals[d];
      std::uint32_t pk = 0;
      if (cursor[d] < arr.size() && arr[cursor[d]].slot == slot) pk = arr[cursor[d]++].count;
      radios[d].step(slot, pk, rng);
    }
  }

  SchemeMetrics m;
  m.scheme = scheme;
  m.delays.keep_samples = options.keep_delay_samples;
  double energy = 0.0;
  const double horizon = static_cast<double>(trace.horizon);
  for (const auto& r : radios) {
    energy += r.energy();
    m.device_power_mw.push_back(r.energy() / horizon);
    m.delays += r.delays();
    m.confusion += r.confusion();
    m.channel_misses += r.channel_misses();
    m.false_alarms += r.false_alarms();
    for (int s = 0; s < 4; ++s) m.visits[s] += r.visits()[s];
  }
  m.energy_mj = energy * cfg.tti_ms / 1000.0;
  m.mean_power_mw = radios.empty() ? 0.0 : energy / horizon / static_cast<double>(radios.size());
  return m;
}

}  // namespace fwus
