#include "fwus/radio.hpp"

#include <algorithm>
#include <cmath>

#include "fwus/error.hpp"

namespace fwus {

std::string_view to_string(RadioState s) noexcept {
  switch (s) {
    case RadioState::kWrxOn: return "S1";
    case RadioState::kActive: return "S2";
    case RadioState::kInactive: return "S3";
    case RadioState::kSleep: return "S4";
    case RadioState::kStartUp: return "startup";
    case RadioState::kPowerDown: return "powerdown";
  }
  return "?";
}

void DelayStats::add(double delay, std::uint32_t count) {
  if (count == 0) return;
  const double n = static_cast<double>(count);
  packets += count;
  sum += delay * n;
  sum_sq += delay * delay * n;
  max = std::max(max, delay);
  if (keep_samples) samples.insert(samples.end(), count, delay);
}

DelayStats& DelayStats::operator+=(const DelayStats& o) {
  packets += o.packets;
  sum += o.sum;
  sum_sq += o.sum_sq;
  max = std::max(max, o.max);
  if (keep_samples) samples.insert(samples.end(), o.samples.begin(), o.samples.end());
  return *this;
}

double segment_energy(SchemeKind scheme, const WakeupParams& p, RadioState state, double a, double b) {
  const double span = b - a;
  switch (state) {
    case RadioState::kWrxOn: return p.pw1 * span;
    case RadioState::kActive: return p.pw2 * span;
    case RadioState::kInactive: return p.pw3 * span;
    case RadioState::kSleep: return p.pw4 * span;
    case RadioState::kStartUp: {
      if (p.t_u <= 0.0) return 0.0;
      const double peak = scheme == SchemeKind::kDrx ? p.pw3 : p.pw2;
      return peak * (b * b - a * a) / (2.0 * p.t_u);
    }
    case RadioState::kPowerDown: {
      if (p.t_pd <= 0.0) return 0.0;
      return p.pw3 * (span - (b * b - a * a) / (2.0 * p.t_pd));
    }
  }
  return 0.0;
}

DeviceRadio::DeviceRadio(SchemeKind scheme, const WakeupParams& params) : scheme_(scheme), params_(params) {
  params_.validate();
  state_ = RadioState::kSleep;
  state_start_ = 0.0;
  state_end_ = params_.t4;
  visits_[3] = 1;
}

std::size_t DeviceRadio::pending_packets() const noexcept {
  std::size_t n = 0;
  for (const auto& p : pending_) n += p.count;
  return n;
}

void DeviceRadio::charge(double from, double to) {
  if (to <= from) return;
  const double e = segment_energy(scheme_, params_, state_, from - state_start_, to - state_start_);
  energy_ += e;
  if (log_) {
    if (!log_->empty() && log_->back().state == state_ && log_->back().end == from && state_ == RadioState::kSleep) {
      log_->back().end = to;
      log_->back().energy += e;
    } else {
      log_->push_back({from, to, state_, e});
    }
  }
  cursor_ = to;
}

void DeviceRadio::enter(RadioState s, double at, double duration) {
  state_ = s;
  state_start_ = at;
  state_end_ = at + duration;
  cursor_ = at;
  switch (s) {
    case RadioState::kWrxOn: ++visits_[0]; break;
    case RadioState::kActive: ++visits_[1]; activity_ = false; break;
    case RadioState::kInactive: ++visits_[2]; break;
    default: break;
  }
}

void DeviceRadio::enter_sleep(double at) {
  ++visits_[3];
  skips_left_ = 0;
  if (scheme_ == SchemeKind::kFwus && planner_) skips_left_ = std::max(0, planner_->beacons_to_skip(at, params_.t4));
  enter(RadioState::kSleep, at, params_.t4);
}

void DeviceRadio::deliver_pending(double at) {
  for (const auto& p : pending_) delays_.add(at - static_cast<double>(p.slot) + params_.t_mac, p.count);
  pending_.clear();
}

double DeviceRadio::state_power(double at) const {
  const double tau = at - state_start_;
  switch (state_) {
    case RadioState::kStartUp:
      return params_.t_u <= 0.0 ? 0.0 : (scheme_ == SchemeKind::kDrx ? params_.pw3 : params_.pw2) * tau / params_.t_u;
    case RadioState::kPowerDown:
      return params_.t_pd <= 0.0 ? 0.0 : params_.pw3 * (1.0 - tau / params_.t_pd);
    case RadioState::kWrxOn: return params_.pw1;
    case RadioState::kActive: return params_.pw2;
    case RadioState::kInactive: return params_.pw3;
    case RadioState::kSleep: return params_.pw4;
  }
  return 0.0;
}

void DeviceRadio::on_boundary(Rng& rng) {
  const double t = state_end_;
  const bool pending = !pending_.empty();
  switch (state_) {
    case RadioState::kSleep:
      if (skips_left_ > 0) {
        --skips_left_;
        if (pending) ++confusion_.false_negative;
        else ++confusion_.true_negative;
        enter(RadioState::kSleep, t, params_.t4);
      } else if (scheme_ == SchemeKind::kDrx) {
        enter(RadioState::kStartUp, t, params_.t_u);
      } else {
        enter(RadioState::kWrxOn, t, params_.t1);
      }
      break;

    case RadioState::kWrxOn:
      if (pending) {
        if (bernoulli(rng, params_.p_md)) {
          ++confusion_.false_negative;
          ++channel_misses_;
          if (scheme_ == SchemeKind::kDrx) enter(RadioState::kPowerDown, t, params_.t_pd);
          else enter_sleep(t);
        } else {
          ++confusion_.true_positive;
          if (scheme_ == SchemeKind::kDrx) {
            enter(RadioState::kActive, t, params_.t2);
            deliver_pending(t);
          } else {
            enter(RadioState::kStartUp, t, params_.t_u);
          }
        }
      } else {
        ++confusion_.false_positive;
        if (scheme_ == SchemeKind::kDrx) {
          enter(RadioState::kPowerDown, t, params_.t_pd);
        } else if (scheme_ == SchemeKind::kWus && bernoulli(rng, params_.p_f)) {
          ++false_alarms_;
          enter(RadioState::kStartUp, t, params_.t_u);
        } else {
          enter_sleep(t);
        }
      }
      break;

    case RadioState::kStartUp:
      if (scheme_ == SchemeKind::kDrx) {
        enter(RadioState::kWrxOn, t, params_.t1);
      } else {
        enter(RadioState::kActive, t, params_.t2);
        deliver_pending(t);
      }
      break;

    case RadioState::kActive:
      if (activity_) enter(RadioState::kActive, t, params_.t2);
      else enter(RadioState::kInactive, t, params_.t3);
      break;

    case RadioState::kInactive:
      enter(RadioState::kPowerDown, t, params_.t_pd);
      break;

    case RadioState::kPowerDown:
      enter_sleep(t);
      break;
  }
}

void DeviceRadio::step(std::int64_t slot, std::uint32_t packets, Rng& rng) {
  const double now = static_cast<double>(slot);
  if (now < cursor_) fail(ErrorCode::kInvalidParameter, "radio stepped backwards in time");
  // Catch up on slots the caller skipped.
  while (state_end_ < now) {
    charge(cursor_, state_end_);
    on_boundary(rng);
  }
  charge(cursor_, now);

  if (packets > 0) {
    if (state_ == RadioState::kActive) {
      delays_.add(params_.t_mac, packets);
      activity_ = true;
    } else if (state_ == RadioState::kInactive) {
      enter(RadioState::kActive, now, params_.t2);
      delays_.add(params_.t_mac, packets);
    } else {
      pending_.push_back({slot, packets});
    }
  }

  const double end = now + 1.0;
  while (state_end_ < end) {
    charge(cursor_, state_end_);
    on_boundary(rng);
  }
  charge(cursor_, end);
}

}  // namespace fwus
