#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "fwus/lstm.hpp"
#include "fwus/train.hpp"

namespace fwus {

// Recent non-empty coordinator slots, oldest first.
class ArrivalHistory {
 public:
  explicit ArrivalHistory(std::size_t capacity = 21) : capacity_(capacity) {}

  void push(std::int64_t slot);
  bool empty() const noexcept { return slots_.empty(); }
  std::int64_t last() const { return slots_.back(); }
  std::uint64_t version() const noexcept { return version_; }
  std::vector<std::int64_t> slots() const { return {slots_.begin(), slots_.end()}; }

 private:
  std::deque<std::int64_t> slots_;
  std::size_t capacity_;
  std::uint64_t version_ = 0;
};

// Predicts the gap (TTI) from the latest coordinator arrival to the next one.
class InterArrivalPredictor {
 public:
  virtual ~InterArrivalPredictor() = default;
  virtual bool ready() const = 0;
  virtual double predict_gap(const ArrivalHistory& history) const = 0;
  virtual double margin() const = 0;
};

class LstmPredictor final : public InterArrivalPredictor {
 public:
  explicit LstmPredictor(LstmModel model) : model_(std::move(model)) {}

  bool ready() const override { return model_.trained; }
  double predict_gap(const ArrivalHistory& history) const override;
  double margin() const override { return model_.margin; }
  const LstmModel& model() const noexcept { return model_; }
  LstmModel& model() noexcept { return model_; }

 private:
  LstmModel model_;
};

// Knows the true arrival slots; used as the perfect-forecast reference.
class OraclePredictor final : public InterArrivalPredictor {
 public:
  explicit OraclePredictor(std::vector<std::int64_t> arrival_slots) : slots_(std::move(arrival_slots)) {}

  bool ready() const override { return true; }
  double predict_gap(const ArrivalHistory& history) const override;
  double margin() const override { return 0.0; }

 private:
  std::vector<std::int64_t> slots_;
};

// Sleep length for a device entering sleep `elapsed` TTIs after the latest
// coordinator arrival: quantize(g - elapsed - margin) with t4 as the floor.
double decide_sleep(double predicted_gap, double elapsed, double t4, double margin);
double decide_sleep(const InterArrivalPredictor& predictor, const ArrivalHistory& history,
                    std::int64_t now, double t4);

struct ConfusionCounts {
  std::uint64_t true_positive = 0;   // woke, traffic pending
  std::uint64_t false_positive = 0;  // woke, nothing pending
  std::uint64_t false_negative = 0;  // beacon skipped (or WuS missed) with traffic pending
  std::uint64_t true_negative = 0;   // beacon skipped, nothing pending

  std::uint64_t total() const noexcept { return true_positive + false_positive + false_negative + true_negative; }
  double miss_detection() const noexcept;  // FN / (TP + FN)
  double false_alarm() const noexcept;     // FP / (TP + FP)
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept;
};

// Outcome of one sleep decision against an observed gap, sleep starting at the
// arrival (elapsed 0).
ConfusionCounts score_decision(double observed_gap, double predicted_gap, double t4, double margin);

struct CalibrationResult {
  double margin = 0.0;
  double miss_detection = 0.0;
  double false_alarm = 0.0;
  bool meets_targets = true;
  ConfusionCounts counts;
};

CalibrationResult evaluate_margin(std::span<const PredictionRecord> records, double t4, double margin);

// Smallest margin, searched over the quantiles of the over-prediction errors,
// whose miss-detection on `records` is within target.
CalibrationResult calibrate_margin(std::span<const PredictionRecord> records, double t4,
                                   double target_miss = 0.01, double target_false_alarm = 0.1);

}  // namespace fwus
