#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fwus/rng.hpp"

namespace fwus {

// Two-state (Idle / Active) per-device traffic source.
struct TrafficModel {
  double activation_prob = 0.0;    // per-slot I -> A
  double burst_persistence = 0.0;  // q; the A sojourn is 1 + Geom(q) slots
  double rate_active = 1.0;        // packets per TTI while in A
  double rate_idle = 0.0;          // packets per TTI while in I

  void validate() const;
};

enum class DeviceState : std::uint8_t { kIdle = 0, kActive = 1 };

struct PacketArrival {
  std::int64_t slot = 0;
  std::uint32_t count = 0;
};

struct TrafficTrace {
  std::int64_t horizon = 0;
  // [device][slot]; empty when state recording was switched off.
  std::vector<std::vector<DeviceState>> states;
  // Sparse per-device arrivals, slot-ordered.
  std::vector<std::vector<PacketArrival>> device_arrivals;
  // Coordinator side: packets per slot, and gaps between consecutive non-empty
  // slots. The first gap is measured from first_arrival.
  std::vector<std::uint32_t> arrivals;
  std::int64_t first_arrival = -1;
  std::vector<std::int64_t> inter_arrivals;

  std::size_t device_count() const noexcept { return device_arrivals.size(); }
  std::uint64_t total_packets() const noexcept;
  // Slots with at least one packet, rebuilt from first_arrival + prefix sums.
  std::vector<std::int64_t> arrival_slots() const;
};

double geometric_pmf(std::int64_t k, double q);
std::int64_t sample_sojourn(double q, Rng& rng);

// Incremental generator; lets the dynamic-density experiment swap the
// per-device models at schedule boundaries while keeping device state.
class TraceGenerator {
 public:
  TraceGenerator(std::size_t devices, bool record_states = true);

  void advance(std::span<const TrafficModel> models, std::int64_t slots, Rng& rng);
  std::int64_t now() const noexcept { return trace_.horizon; }
  const TrafficTrace& trace() const noexcept { return trace_; }
  TrafficTrace finish() &&;

 private:
  TrafficTrace trace_;
  std::vector<DeviceState> state_;
  std::vector<std::int64_t> remaining_;
  std::int64_t last_arrival_ = -1;
  bool record_states_;
};

TrafficTrace generate_trace(std::span<const TrafficModel> models, std::int64_t horizon, Rng& rng,
                            bool record_states = true);

// CSV with header slot,device_id,state,packets (one row per device-slot).
void write_trace_csv(const TrafficTrace& trace, std::ostream& out);

}  // namespace fwus
