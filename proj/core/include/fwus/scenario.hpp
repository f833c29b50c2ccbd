#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fwus/config.hpp"
#include "fwus/decision.hpp"
#include "fwus/radio.hpp"
#include "fwus/traffic.hpp"

namespace fwus {

struct SchemeMetrics {
  SchemeKind scheme = SchemeKind::kWus;
  double energy_mj = 0.0;       // all devices
  double mean_power_mw = 0.0;   // per device
  std::vector<double> device_power_mw;
  DelayStats delays;
  ConfusionCounts confusion;
  std::uint64_t channel_misses = 0;
  std::uint64_t false_alarms = 0;
  std::array<std::uint64_t, 4> visits{};

  double mean_delay() const noexcept { return delays.mean(); }
};

struct RunMetrics {
  std::uint64_t seed = 0;
  std::size_t devices = 0;
  std::vector<double> activation_prob;  // per device
  std::vector<double> burst_persistence;
  std::vector<double> t4;
  std::vector<SchemeMetrics> schemes;

  const SchemeMetrics* find(SchemeKind kind) const noexcept;
  // (pw_benchmark - pw) / pw_benchmark for two simulated schemes; NaN if absent.
  double eta(SchemeKind scheme, SchemeKind benchmark) const;
};

// Per-device inputs to the radio simulation.
struct DeviceSetup {
  double activation_prob = 0.0;
  double burst_persistence = 0.0;
  double t4 = 0.0;
};

struct ScenarioOptions {
  bool keep_delay_samples = false;
  std::vector<StateSegment>* state_log = nullptr;  // device 0 only
};

// FWuS beacon planner backed by the coordinator's arrival history. The
// prediction only changes when a new arrival lands (or the model is swapped),
// so it is cached per history version and shared by every device.
class CoordinatorPlanner final : public SleepPlanner {
 public:
  CoordinatorPlanner(const InterArrivalPredictor& predictor, const ArrivalHistory& history, double max_skips)
      : predictor_(predictor), history_(history), max_skips_(max_skips) {}

  int beacons_to_skip(double now, double t4) override;
  void invalidate() noexcept { cached_ = false; }

 private:
  const InterArrivalPredictor& predictor_;
  const ArrivalHistory& history_;
  double max_skips_;
  std::uint64_t version_ = 0;
  double gap_ = 0.0;
  bool cached_ = false;
};

// Scheme-specific radio parameters for one device with sleep time t4.
WakeupParams device_params(SchemeKind scheme, WakeupParams base, double t4);

// Runs every device of `trace` under `scheme`. FWUS needs a ready predictor.
SchemeMetrics run_scenario(const ScenarioConfig& cfg, SchemeKind scheme, const TrafficTrace& trace,
                           const std::vector<DeviceSetup>& devices, const InterArrivalPredictor* predictor,
                           Rng& rng, const ScenarioOptions& options = {});

// Sleep time used by every scheme for one device: the delay-budget root at the
// homogeneous activation probability, floored at one TTI.
double static_sleep_time(const ScenarioConfig& cfg, double burst_persistence);

}  // namespace fwus
