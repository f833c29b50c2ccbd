#include "fwus/metrics.hpp"

#include <cmath>

#include "fwus/error.hpp"

namespace fwus {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "InvalidParameter";
    case ErrorCode::kNonIntegrableInfluence: return "NonIntegrableInfluence";
    case ErrorCode::kDegenerateChain: return "DegenerateChain";
    case ErrorCode::kDivergentSeries: return "DivergentSeries";
    case ErrorCode::kNoFeasibleSleep: return "NoFeasibleSleep";
    case ErrorCode::kShape: return "Shape";
    case ErrorCode::kInvalidDataset: return "InvalidDataset";
    case ErrorCode::kFitFailure: return "FitFailure";
    case ErrorCode::kModelNotReady: return "ModelNotReady";
    case ErrorCode::kMissingPredictor: return "MissingPredictor";
    case ErrorCode::kUnsortedSchedule: return "UnsortedSchedule";
    case ErrorCode::kUnknownExperiment: return "UnknownExperiment";
    case ErrorCode::kConfig: return "Config";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::kShape, "prediction and observation counts differ");
  if (a.empty()) fail(ErrorCode::kShape, "no samples");
}

}  // namespace

double rmse(std::span<const double> predictions, std::span<const double> observations) {
  check_pair(predictions, observations);
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - observations[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(predictions.size()));
}

double r_metric_radicand(std::span<const double> predictions, std::span<const double> observations) {
  check_pair(predictions, observations);
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (observations[i] == 0.0) fail(ErrorCode::kInvalidParameter, "observed gap of zero");
    const double r = 1.0 - predictions[i] / observations[i];
    s += r * r;
  }
  return 1.0 - s / static_cast<double>(predictions.size());
}

double r_metric(std::span<const double> predictions, std::span<const double> observations) {
  const double r2 = r_metric_radicand(predictions, observations);
  if (r2 < 0.0) fail(ErrorCode::kFitFailure, "relative error exceeds the observations (negative radicand)");
  return std::sqrt(r2);
}

double power_saving(double pw, double pw_benchmark) {
  if (!(pw_benchmark > 0.0)) fail(ErrorCode::kInvalidParameter, "benchmark power must be > 0");
  return (pw_benchmark - pw) / pw_benchmark;
}

}  // namespace fwus
