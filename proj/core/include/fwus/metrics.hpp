#pragma once

#include <span>

namespace fwus {

double rmse(std::span<const double> predictions, std::span<const double> observations);

// 1 - mean((1 - g/g_o)^2); may be negative.
double r_metric_radicand(std::span<const double> predictions, std::span<const double> observations);

// sqrt of the radicand above; throws kFitFailure when it is negative.
double r_metric(std::span<const double> predictions, std::span<const double> observations);

// (pw_benchmark - pw) / pw_benchmark
double power_saving(double pw, double pw_benchmark);

}  // namespace fwus
