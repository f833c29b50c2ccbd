#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fwus/lstm.hpp"

namespace fwus {

struct TrainConfig {
  int hidden_size = 100;
  double learning_rate = 1e-4;
  int max_epochs = 50;
  int patience = 5;
  double train_fraction = 0.70;
  double validation_fraction = 0.15;
  double test_fraction = 0.15;
  int window = 20;
  int batch_size = 16;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;

  void validate() const;
};

// Windowed samples cut from a coordinator arrival sequence, split
// chronologically into train / validation / test.
struct ForecastDataset {
  std::vector<std::int64_t> slots;  // arrival slots, ascending
  std::size_t window = 0;
  std::size_t train_end = 0;        // samples [0, train_end)
  std::size_t validation_end = 0;   // [train_end, validation_end), rest is test

  std::size_t sample_count() const noexcept { return slots.size() < window + 2 ? 0 : slots.size() - window - 1; }
  // Observed target gap of sample j (TTI).
  double target(std::size_t j) const;
  // Arrival slots feeding sample j: window + 1 slots ending at the last input.
  std::span<const std::int64_t> inputs(std::size_t j) const;
};

ForecastDataset make_dataset(std::vector<std::int64_t> arrival_slots, const TrainConfig& cfg);

// Fill F x T features for one window of arrival slots (the gaps between them
// and the slot phase of each arrival), normalized with the model's statistics.
// Shorter histories are left-padded with the mean gap.
Eigen::MatrixXd make_features(const LstmModel& model, std::span<const std::int64_t> slots);

struct EpochStats {
  int epoch = 0;
  double train_rmse = 0.0;       // normalized units
  double validation_rmse = 0.0;  // normalized units
  double validation_rmse_tti = 0.0;
};

struct TrainResult {
  LstmModel model;
  std::vector<EpochStats> history;
  int best_epoch = 0;
};

// Fresh model sized from cfg, normalization fitted on the training split.
LstmModel make_model(const ForecastDataset& data, const TrainConfig& cfg, double phase_period);

TrainResult train(LstmModel model, const ForecastDataset& data, const TrainConfig& cfg);

struct PredictionRecord {
  double observed = 0.0;   // g_o
  double predicted = 0.0;  // g
};

std::vector<PredictionRecord> predict_range(const LstmModel& model, const ForecastDataset& data,
                                            std::size_t begin, std::size_t end);

}  // namespace fwus
