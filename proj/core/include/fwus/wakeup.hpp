#pragma once

#include <array>
#include <string_view>

namespace fwus {

// Timing in TTIs, power in mW. Defaults are the reference radio values.
struct WakeupParams {
  double t1 = 1.0 / 14.0;  // WRx-On
  double t2 = 1.0;         // active decoding
  double t3 = 1.0;         // inactivity timer
  double t4 = 100.0;       // sleep
  double t_u = 15.0;       // start-up
  double t_pd = 10.0;      // power-down
  double pw1 = 57.0;
  double pw2 = 935.0;
  double pw3 = 850.0;
  double pw4 = 0.0;
  double p_md = 0.01;
  double p_f = 0.1;
  double t_mac = 0.0;
  double t_on = 1.0;            // DRX on-duration
  double delay_budget = 30.0;   // mean-delay target D
  double t4_max = 1e5;          // sleep cap when nothing ever activates
  bool delay_mean_residual = false;  // use t4/2 instead of t4^2/2 in the delay

  // Throws kInvalidParameter naming the first violated invariant.
  void validate() const;
};

enum class ChainState { kS1 = 0, kS2 = 1, kS3 = 2, kS4 = 3 };

struct SemiMarkovChain {
  double activation_prob = 0.0;
  double burst_persistence = 0.0;
  std::array<std::array<double, 4>, 4> transition{};  // row = from
  std::array<double, 4> steady_state{};

  double p(ChainState from, ChainState to) const {
    return transition[static_cast<int>(from)][static_cast<int>(to)];
  }
  double pi(ChainState s) const { return steady_state[static_cast<int>(s)]; }
};

SemiMarkovChain build_chain(double activation_prob, double burst_persistence);

double mean_power(const SemiMarkovChain& chain, const WakeupParams& params);
double mean_delay(const SemiMarkovChain& chain, const WakeupParams& params);

struct SleepSolution {
  double t4 = 0.0;
  bool capped = false;  // true when t4 hit params.t4_max
};

// Largest sleep t4 whose closed-form mean delay equals the budget, with t3 = 1.
SleepSolution solve_t4(double activation_prob, double burst_persistence, const WakeupParams& params);

// round(t_sleep / t4) * t4, ties away from zero.
double quantize_sleep(double t_sleep, double t4);

enum class SchemeKind { kDrx, kWus, kFwus };

std::string_view to_string(SchemeKind kind) noexcept;
SchemeKind scheme_from_string(std::string_view name);

WakeupParams scheme_params(SchemeKind kind, double activation_prob, double burst_persistence,
                           const WakeupParams& base);

}  // namespace fwus
