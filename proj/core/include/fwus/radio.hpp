#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <string_view>
#include <vector>

#include "fwus/decision.hpp"
#include "fwus/rng.hpp"
#include "fwus/wakeup.hpp"

namespace fwus {

// S1..S4 of the wake-up chain plus the two ramps between them. For DRX, kWrxOn
// is the ON occasion (PW3 for t_on) and kStartUp ramps up to PW3.
enum class RadioState : std::uint8_t { kWrxOn, kActive, kInactive, kSleep, kStartUp, kPowerDown };

std::string_view to_string(RadioState s) noexcept;

struct DelayStats {
  std::uint64_t packets = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  double max = 0.0;
  std::vector<double> samples;  // only filled when keep_samples is set
  bool keep_samples = false;

  void add(double delay, std::uint32_t count);
  double mean() const noexcept { return packets == 0 ? 0.0 : sum / static_cast<double>(packets); }
  DelayStats& operator+=(const DelayStats& o);
};

struct StateSegment {
  double start = 0.0;
  double end = 0.0;
  RadioState state = RadioState::kSleep;
  double energy = 0.0;  // mW * TTI
};

// Decides, when a FWuS device falls asleep, how many beacons it will skip.
class SleepPlanner {
 public:
  virtual ~SleepPlanner() = default;
  virtual int beacons_to_skip(double now, double t4) = 0;
};

class DeviceRadio {
 public:
  DeviceRadio(SchemeKind scheme, const WakeupParams& params);

  SchemeKind scheme() const noexcept { return scheme_; }
  const WakeupParams& params() const noexcept { return params_; }
  RadioState state() const noexcept { return state_; }
  double state_end() const noexcept { return state_end_; }
  double energy() const noexcept { return energy_; }  // mW * TTI
  std::size_t pending_packets() const noexcept;
  int skips_left() const noexcept { return skips_left_; }

  const ConfusionCounts& confusion() const noexcept { return confusion_; }
  std::uint64_t channel_misses() const noexcept { return channel_misses_; }
  std::uint64_t false_alarms() const noexcept { return false_alarms_; }
  // Entries into S1, S2, S3, S4 (embedded-chain visits).
  const std::array<std::uint64_t, 4>& visits() const noexcept { return visits_; }
  DelayStats& delays() noexcept { return delays_; }
  const DelayStats& delays() const noexcept { return delays_; }

  void set_planner(SleepPlanner* planner) noexcept { planner_ = planner; }
  void set_log(std::vector<StateSegment>* log) noexcept { log_ = log; }
  // Forces the next beacon outcome; used by tests (p_md = 1 etc.).
  WakeupParams& mutable_params() noexcept { return params_; }

  // Advances the radio over [slot, slot + 1) with `packets` generated at the
  // start of the slot.
  void step(std::int64_t slot, std::uint32_t packets, Rng& rng);

 private:
  struct Pending {
    std::int64_t slot;
    std::uint32_t count;
  };

  void charge(double from, double to);
  void enter(RadioState s, double at, double duration);
  void enter_sleep(double at);
  void on_boundary(Rng& rng);
  void deliver_pending(double at);
  double state_power(double at) const;

  SchemeKind scheme_;
  WakeupParams params_;
  RadioState state_ = RadioState::kSleep;
  double state_start_ = 0.0;
  double state_end_ = 0.0;
  double cursor_ = 0.0;
  double energy_ = 0.0;
  int skips_left_ = 0;
  bool activity_ = false;
  std::deque<Pending> pending_;
  ConfusionCounts confusion_;
  std::uint64_t channel_misses_ = 0;
  std::uint64_t false_alarms_ = 0;
  std::array<std::uint64_t, 4> visits_{};
  DelayStats delays_;
  SleepPlanner* planner_ = nullptr;
  std::vector<StateSegment>* log_ = nullptr;
};

// Free-function form of DeviceRadio::step.
inline void step_device(DeviceRadio& radio, std::int64_t slot, std::uint32_t packets, Rng& rng) {
  radio.step(slot, packets, rng);
}

// Energy of a segment of `state` over [a, b] relative to the state's start;
// exposed so the state log can be re-derived independently.
double segment_energy(SchemeKind scheme, const WakeupParams& p, RadioState state, double offset_a,
                      double offset_b);

}  // namespace fwus
