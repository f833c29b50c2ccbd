#include "fwus/decision.hpp"

#include <algorithm>
#include <cmath>

#include "fwus/error.hpp"
#include "fwus/wakeup.hpp"

namespace fwus {
namespace {

constexpr double kNoFurtherArrival = 1e12;

double ratio(std::uint64_t num, std::uint64_t den) noexcept {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

void ArrivalHistory::push(std::int64_t slot) {
  if (!slots_.empty() && slot <= slots_.back()) {
    if (slot == slots_.back()) return;
    fail(ErrorCode::kInvalidParameter, "arrival history must be pushed in slot order");
  }
  slots_.push_back(slot);
  if (slots_.size() > capacity_) slots_.pop_front();
  ++version_;
}

double LstmPredictor::predict_gap(const ArrivalHistory& history) const {
  if (!model_.trained) fail(ErrorCode::kModelNotReady, "predictor has not been trained");
  const auto slots = history.slots();
  return lstm_forward(model_, make_features(model_, slots));
}

double OraclePredictor::predict_gap(const ArrivalHistory& history) const {
  if (history.empty()) return slots_.empty() ? kNoFurtherArrival : static_cast<double>(slots_.front());
  const auto it = std::upper_bound(slots_.begin(), slots_.end(), history.last());
  if (it == slots_.end()) return kNoFurtherArrival;
  return static_cast<double>(*it - history.last());
}

double decide_sleep(double predicted_gap, double elapsed, double t4, double margin) {
  return std::max(t4, quantize_sleep(predicted_gap - elapsed - margin, t4));
}

double decide_sleep(const InterArrivalPredictor& predictor, const ArrivalHistory& history, std::int64_t now,
                    double t4) {
  if (!predictor.ready()) fail(ErrorCode::kModelNotReady, "predictor has not been trained");
  if (history.empty()) return t4;
  const double elapsed = static_cast<double>(now - history.last());
  return decide_sleep(predictor.predict_gap(history), elapsed, t4, predictor.margin());
}

double ConfusionCounts::miss_detection() const noexcept { return ratio(false_negative, true_positive + false_negative); }
double ConfusionCounts::false_alarm() const noexcept { return ratio(false_positive, true_positive + false_positive); }

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) noexcept {
  true_positive += o.true_positive;
  false_positive += o.false_positive;
  false_negative += o.false_negative;
  true_negative += o.true_negative;
  return *this;
}

ConfusionCounts score_decision(double observed_gap, double predicted_gap, double t4, double margin) {
  if (!(t4 > 0.0)) fail(ErrorCode::kInvalidParameter, "t4 must be > 0");
  if (!(observed_gap > 0.0)) fail(ErrorCode::kInvalidParameter, "observed gap must be > 0");
  // Work in whole beacon periods; both sides are multiples of t4.
  const double slept = std::max(1.0, std::round((predicted_gap - margin) / t4));
  const double first = std::ceil(observed_gap / t4);  // first beacon with the packet pending
  ConfusionCounts c;
  if (slept < first) {
    // Woke early; every later re-decision floors at one beacon until the packet.
    c.true_positive = 1;
    c.false_positive = static_cast<std::uint64_t>(first - slept);
    c.true_negative = static_cast<std::uint64_t>(slept - 1.0);
  } else {
    c.true_positive = 1;
    c.true_negative = static_cast<std::uint64_t>(first - 1.0);
    c.false_negative = static_cast<std::uint64_t>(slept - first);
  }
  return c;
}

CalibrationResult evaluate_margin(std::span<const PredictionRecord> records, double t4, double margin) {
  CalibrationResult r;
  r.margin = margin;
  for (const auto& rec : records) r.counts += score_decision(rec.observed, rec.predicted, t4, margin);
  r.miss_detection = r.counts.miss_detection();
  r.false_alarm = r.counts.false_alarm();
  r.meets_targets = r.miss_detection <= 0.01 && r.false_alarm <= 0.1;
  return r;
}

CalibrationResult calibrate_margin(std::span<const PredictionRecord> records, double t4, double target_miss,
                                   double target_false_alarm) {
  if (records.empty()) fail(ErrorCode::kInvalidDataset, "no records to calibrate on");
  std::vector<double> over;
  for (const auto& rec : records) {
    if (rec.predicted > rec.observed) over.push_back(rec.predicted - rec.observed);
  }
  std::sort(over.begin(), over.end());

  std::vector<double> candidates{0.0};
  if (!over.empty()) {
    for (int k = 1; k <= 100; ++k) {
      const auto idx = static_cast<std::size_t>(std::ceil(k / 100.0 * static_cast<double>(over.size()))) - 1;
      candidates.push_back(over[std::min(idx, over.size() - 1)]);
    }
  }
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  CalibrationResult r;
  for (double m : candidates) {
    r = evaluate_margin(records, t4, m);
    if (r.miss_detection <= target_miss) break;
  }
  r.meets_targets = r.miss_detection <= target_miss && r.false_alarm <= target_false_alarm;
  return r;
}

}  // namespace fwus
