#include "fwus/traffic.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "fwus/error.hpp"

namespace fwus {
namespace {

void check_q(double q) {
  if (!(q >= 0.0 && q < 1.0)) fail(ErrorCode::kInvalidParameter, "burst persistence q must lie in [0, 1)");
}

std::uint32_t packets_at_rate(double rate, Rng& rng) {
  if (rate <= 0.0) return 0;
  const double whole = std::floor(rate);
  auto n = static_cast<std::uint32_t>(whole);
  if (bernoulli(rng, rate - whole)) ++n;
  return n;
}

}  // namespace

void TrafficModel::validate() const {
  if (!(activation_prob >= 0.0 && activation_prob <= 1.0)) {
    fail(ErrorCode::kInvalidParameter, "activation probability must lie in [0, 1]");
  }
  check_q(burst_persistence);
  if (!(rate_active > 0.0) || !std::isfinite(rate_active)) fail(ErrorCode::kInvalidParameter, "rate_active must be > 0");
  if (!(rate_idle >= 0.0) || !std::isfinite(rate_idle)) fail(ErrorCode::kInvalidParameter, "rate_idle must be >= 0");
}

std::uint64_t TrafficTrace::total_packets() const noexcept {
  std::uint64_t n = 0;
  for (auto a : arrivals) n += a;
  return n;
}

std::vector<std::int64_t> TrafficTrace::arrival_slots() const {
  std::vector<std::int64_t> slots;
  if (first_arrival < 0) return slots;
  slots.reserve(inter_arrivals.size() + 1);
  slots.push_back(first_arrival);
  for (auto gap : inter_arrivals) slots.push_back(slots.back() + gap);
  return slots;
}

double geometric_pmf(std::int64_t k, double q) {
  check_q(q);
  if (k < 0) return 0.0;
  if (q == 0.0) return k == 0 ? 1.0 : 0.0;
  return (1.0 - q) * std::pow(q, static_cast<double>(k));
}

std::int64_t sample_sojourn(double q, Rng& rng) {
  check_q(q);
  if (q == 0.0) return 0;
  std::geometric_distribution<std::int64_t> extra(1.0 - q);
  return extra(rng);
}

TraceGenerator::TraceGenerator(std::size_t devices, bool record_states)
    : state_(devices, DeviceState::kIdle), remaining_(devices, 0), record_states_(record_states) {
  if (devices == 0) fail(ErrorCode::kInvalidParameter, "trace needs at least one device model");
  trace_.device_arrivals.resize(devices);
  if (record_states_) trace_.states.resize(devices);
}

void TraceGenerator::advance(std::span<const TrafficModel> models, std::int64_t slots, Rng& rng) {
  if (models.size() != state_.size()) fail(ErrorCode::kInvalidParameter, "model count does not match device count");
  for (const auto& m : models) m.validate();
  if (slots < 0) fail(ErrorCode::kInvalidParameter, "slot count must be >= 0");

  const std::size_t n = models.size();
  for (std::int64_t s = 0; s < slots; ++s) {
    const std::int64_t slot = trace_.horizon;
    std::uint32_t total = 0;
    for (std::size_t d = 0; d < n; ++d) {
      // Slot 0 is idle for everyone; transitions take effect from slot 1 on.
      if (slot > 0) {
        if (state_[d] == DeviceState::kActive) {
          if (remaining_[d] > 0) {
            --remaining_[d];
          } else {
            state_[d] = DeviceState::kIdle;
          }
        } else if (bernoulli(rng, models[d].activation_prob)) {
          state_[d] = DeviceState::kActive;
          remaining_[d] = sample_sojourn(models[d].burst_persistence, rng);
        }
      }
      const double rate = state_[d] == DeviceState::kActive ? models[d].rate_active : models[d].rate_idle;
      const std::uint32_t pk = packets_at_rate(rate, rng);
      if (pk > 0) trace_.device_arrivals[d].push_back({slot, pk});
      if (record_states_) trace_.states[d].push_back(state_[d]);
      total += pk;
    }
    trace_.arrivals.push_back(total);
    if (total > 0) {
      if (last_arrival_ < 0) {
        trace_.first_arrival = slot;
      } else {
        trace_.inter_arrivals.push_back(slot - last_arrival_);
      }
      last_arrival_ = slot;
    }
    ++trace_.horizon;
  }
}

TrafficTrace TraceGenerator::finish() && { return std::move(trace_); }

TrafficTrace generate_trace(std::span<const TrafficModel> models, std::int64_t horizon, Rng& rng,
                            bool record_states) {
  if (models.empty()) fail(ErrorCode::kInvalidParameter, "empty traffic model list");
  if (horizon < 1) fail(ErrorCode::kInvalidParameter, "horizon must be >= 1 slot");
  TraceGenerator gen(models.size(), record_states);
  gen.advance(models, horizon, rng);
  return std::move(gen).finish();
}

void write_trace_csv(const TrafficTrace& trace, std::ostream& out) {
  out << "slot,device_id,state,packets\n";
  const std::size_t n = trace.device_count();
  std::vector<std::size_t> cursor(n, 0);
  for (std::int64_t slot = 0; slot < trace.horizon; ++slot) {
    for (std::size_t d = 0; d < n; ++d) {
      std::uint32_t pk = 0;
      const auto& arr = trace.device_arrivals[d];
      if (cursor[d] < arr.size() && arr[cursor[d]].slot == slot) pk = arr[cursor[d]++].count;
      const char state = trace.states.empty()
                             ? '?'
                             : (trace.states[d][static_cast<std::size_t>(slot)] == DeviceState::kActive ? 'A' : 'I');
      out << slot << ',' << d << ',' << state << ',' << pk << '\n';
    }
  }
}

}  // namespace fwus
