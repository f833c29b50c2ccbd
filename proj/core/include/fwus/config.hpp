#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fwus/spatial.hpp"
#include "fwus/train.hpp"
#include "fwus/wakeup.hpp"

namespace fwus {

struct DensityStep {
  std::int64_t start_slot = 0;
  double lambda_E = 0.0;
};

// Every tunable of an experiment. Defaults match the reference simulation
// table; TTI is 1 ms.
struct ScenarioConfig {
  // deployment
  double lambda_E = 1e-3;
  std::vector<DensityStep> lambda_E_schedule;  // dynamic runs only
  double lambda_M = 0.1;
  double region_radius = 5.0;
  double guard_margin = 10.0;  // guard radius = region_radius + guard_margin
  std::optional<int> device_count_override;
  bool jacobian_form = false;

  // traffic
  double q_lo = 0.0;
  double q_hi = 1.0;
  double q_cap = 0.999;  // per-device q is clamped here so bursts stay finite
  double rate_active = 1.0;
  double rate_idle = 0.0;

  // time
  std::int64_t horizon = 1'000'000;
  double tti_ms = 1.0;

  WakeupParams wakeup;
  TrainConfig train;

  // predictor training traces
  std::uint64_t train_packets = 20'000;
  std::int64_t train_horizon_max = 20'000'000;
  int train_devices = 10;
  bool retrain_per_run = false;

  // dynamic density
  std::int64_t power_window = 10'000;
  std::int64_t recalibration_period = 50'000;
  std::size_t recalibration_history = 1'000;
  int finetune_epochs = 3;

  // Monte Carlo / output
  int runs = 150;
  int workers = 1;
  std::uint64_t master_seed = 1;
  std::filesystem::path output_dir = "fwus-out";
  bool verbose = false;

  double guard_radius() const noexcept { return region_radius + guard_margin; }
  IntegralForm integral_form() const noexcept {
    return jacobian_form ? IntegralForm::kRadialJacobian : IntegralForm::kAsPrinted;
  }
  // Throws kConfig naming the violated invariant.
  void validate() const;
};

// YAML key/value file; unspecified keys keep their defaults, unknown keys are
// rejected with the list of valid ones.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const std::string& text);
std::string dump_config(const ScenarioConfig& cfg);
std::vector<std::string> config_keys();

}  // namespace fwus
