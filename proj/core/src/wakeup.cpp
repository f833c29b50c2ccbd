#include "fwus/wakeup.hpp"

#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "fwus/error.hpp"

namespace fwus {
namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kInvalidParameter, std::string(name) + " must lie in [0, 1]");
}

void check_chain_inputs(double activation_prob, double q) {
  check_probability(activation_prob, "activation probability");
  if (!(q >= 0.0 && q < 1.0)) fail(ErrorCode::kInvalidParameter, "burst persistence q must lie in [0, 1)");
}

// Sum over n >= 1 of p_md^n.
double miss_series(double p_md) {
  if (!(p_md < 1.0)) fail(ErrorCode::kDivergentSeries, "miss-detection probability must be < 1");
  return p_md / (1.0 - p_md);
}

}  // namespace

void WakeupParams::validate() const {
  const double times[] = {t1, t2, t3, t_u, t_pd, t_mac, t_on};
  for (double t : times) {
    if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorCode::kInvalidParameter, "state durations must be finite and >= 0");
  }
  if (!(t4 > 0.0)) fail(ErrorCode::kInvalidParameter, "sleep time t4 must be > 0");
  const double powers[] = {pw1, pw2, pw3, pw4};
  for (double p : powers) {
    if (!(p >= 0.0) || !std::isfinite(p)) fail(ErrorCode::kInvalidParameter, "power levels must be finite and >= 0");
  }
  if (!(p_md >= 0.0 && p_md < 1.0)) fail(ErrorCode::kInvalidParameter, "p_md must lie in [0, 1)");
  if (!(p_f >= 0.0 && p_f < 1.0)) fail(ErrorCode::kInvalidParameter, "p_f must lie in [0, 1)");
  if (!(delay_budget > 0.0)) fail(ErrorCode::kInvalidParameter, "delay budget must be > 0");
  if (!(t4_max > 0.0)) fail(ErrorCode::kInvalidParameter, "t4_max must be > 0");
}

SemiMarkovChain build_chain(double activation_prob, double q) {
  check_chain_inputs(activation_prob, q);
  const double pa = activation_prob;

  SemiMarkovChain c;
  c.activation_prob = pa;
  c.burst_persistence = q;
  auto& P = c.transition;
  P[0][1] = pa;        // S1 -> S2, WuS detected
  P[0][3] = 1.0 - pa;  // S1 -> S4
  P[1][1] = q;         // S2 -> S2, t2 reset
  P[1][2] = 1.0 - q;
  P[2][1] = q;         // S3 -> S2, PO within the inactivity timer
  P[2][3] = 1.0 - q;
  P[3][0] = 1.0;

  const double L = 2.0 * pa - 4.0 * q - q * pa + 2.0 * q * q + 2.0;
  if (!(L > 0.0)) fail(ErrorCode::kInvalidParameter, "degenerate chain normalization");
  const double edge = (q - 1.0) * (q - 1.0) / L;
  c.steady_state = {edge, pa / L, pa * (1.0 - q) / L, edge};
  return c;
}

double mean_power(const SemiMarkovChain& c, const WakeupParams& w) {
  const auto& p = c.steady_state;
  const double t[4] = {w.t1, w.t2, w.t3, w.t4};
  const double pw[4] = {w.pw1, w.pw2, w.pw3, w.pw4};

  const double ramp_up = p[0] * c.p(ChainState::kS1, ChainState::kS2) * w.t_u;
  const double ramp_down = p[2] * c.p(ChainState::kS3, ChainState::kS4) * w.t_pd;

  double dwell = 0.0;
  double dwell_energy = 0.0;
  for (int i = 0; i < 4; ++i) {
    dwell += p[i] * t[i];
    dwell_energy += p[i] * t[i] * pw[i];
  }
  const double den = ramp_up + ramp_down + dwell;
  if (!(den > 0.0)) fail(ErrorCode::kDegenerateChain, "all sojourn times are zero");
  return (dwell_energy + 0.5 * (ramp_up * w.pw2 + ramp_down * w.pw3)) / den;
}

double mean_delay(const SemiMarkovChain& c, const WakeupParams& w) {
  const double series = miss_series(w.p_md);
  const double sleep_wait = w.delay_mean_residual ? w.t4 / 2.0 : w.t4 * w.t4 / 2.0;
  return c.pi(ChainState::kS4) * c.activation_prob * (3.0 * (w.t_u + w.t1) + sleep_wait + series * w.t4) + w.t_mac;
}

SleepSolution solve_t4(double activation_prob, double q, const WakeupParams& w) {
  const auto chain = build_chain(activation_prob, q);
  const double series = miss_series(w.p_md);
  const double weight = chain.pi(ChainState::kS4) * activation_prob;
  if (weight == 0.0) return {w.t4_max, true};

  // weight * (a t4^2 + series t4 + fixed) + t_mac = budget, a = 1/2 (or the
  // linear form when the residual switch is on).
  const double fixed = 3.0 * (w.t_u + w.t1) - (w.delay_budget - w.t_mac) / weight;
  if (!(fixed < 0.0)) {
    fail(ErrorCode::kNoFeasibleSleep, "delay budget cannot be met with any positive sleep time");
  }
  double t4 = 0.0;
  if (w.delay_mean_residual) {
    t4 = -fixed / (0.5 + series);
  } else {
    // Positive root of t^2/2 + series t + fixed = 0 in cancellation-free form.
    t4 = -2.0 * fixed / (series + std::sqrt(series * series - 2.0 * fixed));
  }
  if (t4 > w.t4_max) return {w.t4_max, true};
  return {t4, false};
}

double quantize_sleep(double t_sleep, double t4) {
  if (!(t4 > 0.0)) fail(ErrorCode::kInvalidParameter, "t4 must be > 0");
  if (!(t_sleep > 0.0)) return 0.0;
  return std::round(t_sleep / t4) * t4;  // std::round: halves away from zero
}

std::string_view to_string(SchemeKind kind) noexcept {
  switch (kind) {
    case SchemeKind::kDrx: return "drx";
    case SchemeKind::kWus: return "wus";
    case SchemeKind::kFwus: return "fwus";
  }
  return "?";
}

SchemeKind scheme_from_string(std::string_view name) {
  if (name == "drx" || name == "DRX") return SchemeKind::kDrx;
  if (name == "wus" || name == "WUS" || name == "WuS") return SchemeKind::kWus;
  if (name == "fwus" || name == "FWUS" || name == "FWuS") return SchemeKind::kFwus;
  fail(ErrorCode::kInvalidParameter, "unknown scheme '" + std::string(name) + "' (expected drx, wus or fwus)");
}

WakeupParams scheme_params(SchemeKind kind, double activation_prob, double q, const WakeupParams& base) {
  base.validate();
  WakeupParams out = base;
  if (out.t3 != 1.0) {
    spdlog::warn("inactivity timer t3 = {} TTI overridden to 1 TTI", out.t3);
    out.t3 = 1.0;
  }
  out.t4 = solve_t4(activation_prob, q, out).t4;
  switch (kind) {
    case SchemeKind::kWus:
    case SchemeKind::kFwus:
      break;
    case SchemeKind::kDrx:
      // ON occasion: the main radio listens at PW3 for t_on.
      out.t1 = out.t_on;
      out.pw1 = out.pw3;
      break;
  }
  return out;
}

}  // namespace fwus
