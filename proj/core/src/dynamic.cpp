#include "fwus/dynamic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>

#include <spdlog/spdlog.h>

#include "fwus/decision.hpp"
#include "fwus/error.hpp"
#include "fwus/scenario.hpp"
#include "fwus/spatial.hpp"
#include "fwus/traffic.hpp"

namespace fwus {
namespace {

void check_schedule(std::span<const DensityStep> schedule) {
  if (schedule.empty()) fail(ErrorCode::kInvalidParameter, "empty density schedule");
  if (schedule.front().start_slot != 0) fail(ErrorCode::kUnsortedSchedule, "schedule must start at slot 0");
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    if (schedule[k].start_slot <= schedule[k - 1].start_slot) {
      fail(ErrorCode::kUnsortedSchedule, "schedule start slots must be strictly increasing");
    }
  }
  for (const auto& s : schedule) {
    if (!(s.lambda_E >= 0.0)) fail(ErrorCode::kInvalidParameter, "schedule densities must be >= 0");
  }
}

double density_at(std::span<const DensityStep> schedule, std::int64_t slot) {
  double lambda = schedule.front().lambda_E;
  for (const auto& s : schedule)
    if (s.start_slot <= slot) lambda = s.lambda_E;
  return lambda;
}

// Fine-tunes on the most recent arrivals (normalization untouched) and
// re-derives the margin on the newest 30% of them.
bool recalibrate(LstmModel& model, const ScenarioConfig& cfg, std::span<const std::int64_t> slots, double t4) {
  const std::size_t w = static_cast<std::size_t>(model.window);
  const std::size_t need = cfg.recalibration_history + 1;
  if (slots.size() < need || cfg.recalibration_history < w + 10) return false;

  ForecastDataset data;
  data.slots.assign(slots.end() - static_cast<std::ptrdiff_t>(need), slots.end());
  data.window = w;
  const std::size_t n = data.sample_count();
  data.train_end = static_cast<std::size_t>(0.7 * static_cast<double>(n));
  data.validation_end = n;
  if (data.train_end < 2 || data.train_end >= n) return false;

  if (cfg.finetune_epochs > 0) {
    TrainConfig tc = cfg.train;
    tc.max_epochs = cfg.finetune_epochs;
    tc.patience = cfg.finetune_epochs;
    const double margin = model.margin;
    model = train(model, data, tc).model;
    model.margin = margin;
  }
  const auto records = predict_range(model, data, data.train_end, n);
  model.margin = calibrate_margin(records, t4, cfg.wakeup.p_md, cfg.wakeup.p_f).margin;
  return true;
}

}  // namespace

DynamicResult dynamic_density_run(const ScenarioConfig& cfg, std::span<const DensityStep> schedule,
                                  std::span<const SchemeKind> schemes, const LstmModel& model, std::uint64_t seed) {
  check_schedule(schedule);
  const bool wants_fwus = std::find(schemes.begin(), schemes.end(), SchemeKind::kFwus) != schemes.end();
  if (wants_fwus && !model.trained) fail(ErrorCode::kMissingPredictor, "FWuS needs a trained predictor");
  if (cfg.power_window < 1) fail(ErrorCode::kInvalidParameter, "power window must be >= 1 slot");

  Rng rng(seed);
  Deployment dep = sample_deployment(cfg, rng);
  for (int tries = 0; dep.devices.empty(); ++tries) {
    if (tries >= 1000) fail(ErrorCode::kInvalidParameter, "deployment never produced a device");
    dep = sample_deployment(cfg, rng);
  }
  const std::size_t n = dep.devices.size();

  // Sleep times are provisioned once, for the opening density.
  ScenarioConfig first = cfg;
  first.lambda_E = schedule.front().lambda_E;
  std::vector<double> q(n), t4(n);
  for (std::size_t d = 0; d < n; ++d) {
    q[d] = std::min(cfg.q_lo + (cfg.q_hi - cfg.q_lo) * uniform01(rng), cfg.q_cap);
    t4[d] = static_sleep_time(first, q[d]);
  }
  double t4_mean = 0.0;
  for (double t : t4) t4_mean += t / static_cast<double>(n);

  TraceGenerator gen(n, false);
  std::vector<TrafficModel> models(n);
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const std::int64_t end = k + 1 < schedule.size() ? std::min(schedule[k + 1].start_slot, cfg.horizon) : cfg.horizon;
    if (end <= gen.now()) break;
    resample_events(dep, schedule[k].lambda_E, rng);
    const auto pa = per_device_activation(dep, InfluenceFunction::exponential());
    for (std::size_t d = 0; d < n; ++d) models[d] = {pa[d], q[d], cfg.rate_active, cfg.rate_idle};
    gen.advance(models, end - gen.now(), rng);
  }
  const TrafficTrace& trace = gen.trace();

  DynamicResult out;
  out.schemes.assign(schemes.begin(), schemes.end());
  for (std::int64_t s = 0; s < trace.horizon; s += cfg.power_window) {
    out.window_start.push_back(s);
    out.window_lambda_E.push_back(density_at(schedule, s));
  }

  for (SchemeKind kind : schemes) {
    Rng srng(sub_seed(seed, 1 + static_cast<std::uint64_t>(kind)));
    std::vector<DeviceRadio> radios;
    radios.reserve(n);
    for (std::size_t d = 0; d < n; ++d) radios.emplace_back(kind, device_params(kind, cfg.wakeup, t4[d]));

    ArrivalHistory history(64);
    std::vector<std::int64_t> seen;
    std::optional<LstmPredictor> predictor;
    std::optional<CoordinatorPlanner> planner;
    if (kind == SchemeKind::kFwus) {
      predictor.emplace(model);
      planner.emplace(*predictor, history, static_cast<double>(trace.horizon) + 1.0);
      for (auto& r : radios) r.set_planner(&*planner);
    }

    std::vector<double> series;
    std::vector<std::size_t> cursor(n, 0);
    double window_energy_start = 0.0;
    for (std::int64_t slot = 0; slot < trace.horizon; ++slot) {
      if (predictor && slot > 0 && slot % cfg.recalibration_period == 0) {
        if (recalibrate(predictor->model(), cfg, seen, t4_mean)) {
          planner->invalidate();
          ++out.recalibrations;
        }
      }
      if (trace.arrivals[static_cast<std::size_t>(slot)] > 0) {
        history.push(slot);
        seen.push_back(slot);
      }
      for (std::size_t d = 0; d < n; ++d) {
        const auto& arr = trace.device_arrivals[d];
        std::uint32_t pk = 0;
        if (cursor[d] < arr.size() && arr[cursor[d]].slot == slot) pk = arr[cursor[d]++].count;
        radios[d].step(slot, pk, srng);
      }
      const bool window_end = (slot + 1) % cfg.power_window == 0 || slot + 1 == trace.horizon;
      if (window_end) {
        double e = 0.0;
        for (const auto& r : radios) e += r.energy();
        const double len = static_cast<double>(slot + 1 - out.window_start[series.size()]);
        series.push_back((e - window_energy_start) / len / static_cast<double>(n));
        window_energy_start = e;
      }
    }
    out.power_mw.push_back(std::move(series));
    spdlog::debug("dynamic run: scheme {} done", to_string(kind));
  }
  return out;
}

SweepAnalysis analyze_sweep(const DynamicResult& result, std::size_t scheme_index,
                            std::span<const DensityStep> schedule) {
  check_schedule(schedule);
  if (scheme_index >= result.power_mw.size()) fail(ErrorCode::kInvalidParameter, "scheme index out of range");
  const auto& series = result.power_mw[scheme_index];

  SweepAnalysis a;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const std::int64_t lo = schedule[k].start_slot;
    const std::int64_t hi =
        k + 1 < schedule.size() ? schedule[k + 1].start_slot : std::numeric_limits<std::int64_t>::max();
    std::vector<double> seg;
    for (std::size_t w = 0; w < series.size(); ++w) {
      if (result.window_start[w] >= lo && result.window_start[w] < hi) seg.push_back(series[w]);
    }
    if (seg.empty()) continue;
    double sum = 0.0;
    for (double v : seg) sum += v;
    a.segment_mean.push_back(sum / static_cast<double>(seg.size()));

    if (k == 0 || seg.size() < 2) continue;
    const std::size_t half = seg.size() / 2;
    const double peak = *std::max_element(seg.begin(), seg.begin() + static_cast<std::ptrdiff_t>(half));
    std::vector<double> tail(seg.begin() + static_cast<std::ptrdiff_t>(half), seg.end());
    std::nth_element(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(tail.size() / 2), tail.end());
    const double settled = tail[tail.size() / 2];
    a.max_overshoot = std::max(a.max_overshoot, peak - settled);
  }
  a.non_decreasing = std::is_sorted(a.segment_mean.begin(), a.segment_mean.end());
  a.non_increasing = std::is_sorted(a.segment_mean.rbegin(), a.segment_mean.rend());
  return a;
}

}  // namespace fwus
