#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fwus/config.hpp"
#include "fwus/decision.hpp"
#include "fwus/scenario.hpp"

namespace fwus {

struct Stats {
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
  std::size_t count = 0;

  static Stats of(std::span<const double> values);
};

struct SchemeSummary {
  SchemeKind scheme = SchemeKind::kWus;
  Stats power_mw;   // per-run per-device mean power
  Stats delay_tti;  // per-run mean packet delay
  ConfusionCounts confusion;
  std::uint64_t channel_misses = 0;
  std::uint64_t false_alarms = 0;

  double miss_detection() const noexcept;
  double false_alarm() const noexcept;
};

struct MonteCarloResult {
  std::vector<RunMetrics> runs;
  std::vector<SchemeSummary> schemes;
  std::optional<Stats> eta_vs_wus;  // FWuS relative saving, when both ran
  std::optional<Stats> eta_vs_drx;

  const SchemeSummary* find(SchemeKind kind) const noexcept;
};

// Predictor trained on a coordinator trace drawn from the scenario's traffic
// model (homogeneous activation probability), plus its held-out quality.
struct PredictorTraining {
  TrainResult result;
  CalibrationResult calibration;  // on the validation split
  CalibrationResult test_operating_point;
  double test_rmse_tti = 0.0;
  double validation_r_radicand = 0.0;
  double test_r_radicand = 0.0;
  std::uint64_t packets = 0;
  double phase_period = 1.0;
};

int scenario_device_count(const ScenarioConfig& cfg);

// Coordinator arrival slots of a training trace for cfg.
std::vector<std::int64_t> training_arrivals(const ScenarioConfig& cfg, std::uint64_t seed, std::uint64_t* packets = nullptr);

PredictorTraining train_predictor(const ScenarioConfig& cfg, std::uint64_t seed);

// One Monte Carlo run: fresh deployment, traffic trace, and every scheme
// simulated on that same trace.
RunMetrics simulate_run(const ScenarioConfig& cfg, std::span<const SchemeKind> schemes, std::size_t run_index,
                        const InterArrivalPredictor* predictor);

MonteCarloResult monte_carlo(const ScenarioConfig& cfg, std::span<const SchemeKind> schemes, int runs,
                             int workers, const InterArrivalPredictor* predictor);

}  // namespace fwus
