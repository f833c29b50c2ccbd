#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fwus/config.hpp"
#include "fwus/lstm.hpp"

namespace fwus {

struct DynamicResult {
  std::vector<SchemeKind> schemes;
  std::vector<std::int64_t> window_start;
  std::vector<double> window_lambda_E;
  std::vector<std::vector<double>> power_mw;  // [scheme][window], per device
  int recalibrations = 0;
};

// Event density follows `schedule`; P_A is redrawn at each boundary and the
// FWuS predictor is fine-tuned and re-calibrated on a sliding window.
DynamicResult dynamic_density_run(const ScenarioConfig& cfg, std::span<const DensityStep> schedule,
                                  std::span<const SchemeKind> schemes, const LstmModel& model, std::uint64_t seed);

struct SweepAnalysis {
  std::vector<double> segment_mean;  // mean windowed power per schedule step
  double max_overshoot = 0.0;        // largest early-segment excess over the settled level, mW
  bool non_decreasing = false;
  bool non_increasing = false;
};

SweepAnalysis analyze_sweep(const DynamicResult& result, std::size_t scheme_index, std::span<const DensityStep> schedule);

}  // namespace fwus
