#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fwus/rng.hpp"

namespace fwus {

// Single-layer LSTM regressor: window of per-step features -> next
// inter-arrival. Gate rows are stacked [input; forget; output; candidate].
struct LstmModel {
  LstmModel() = default;
  LstmModel(int input_size, int hidden_size);

  int input_size() const noexcept { return static_cast<int>(w_in.cols()); }
  int hidden_size() const noexcept { return static_cast<int>(w_rec.cols()); }

  // Uniform in +-1/sqrt(hidden), forget-gate bias 1.
  void initialize(Rng& rng);
  bool all_finite() const;

  Eigen::MatrixXd w_in;    // 4H x F
  Eigen::MatrixXd w_rec;   // 4H x H
  Eigen::VectorXd bias;    // 4H
  Eigen::RowVectorXd w_out;  // 1 x H
  double b_out = 0.0;

  // Normalization, taken from the training split.
  Eigen::VectorXd feature_mean;   // F
  Eigen::VectorXd feature_scale;  // F
  double target_mean = 0.0;
  double target_scale = 1.0;

  int window = 20;
  double phase_period = 1.0;  // slot phase of each arrival is taken modulo this
  double margin = 0.0;        // calibrated decision safety margin, TTI
  bool trained = false;
};

// Per-step activations for a batch; each entry is (rows x batch).
struct LstmCache {
  std::vector<Eigen::MatrixXd> x;        // F x B, normalized inputs
  std::vector<Eigen::MatrixXd> gate_i;   // H x B
  std::vector<Eigen::MatrixXd> gate_f;
  std::vector<Eigen::MatrixXd> gate_o;
  std::vector<Eigen::MatrixXd> cand;
  std::vector<Eigen::MatrixXd> cell;     // c_t, t = 0..T-1
  std::vector<Eigen::MatrixXd> hidden;   // h_t
  Eigen::RowVectorXd output;             // normalized prediction, 1 x B
};

struct LstmGradients {
  explicit LstmGradients(const LstmModel& m);
  void set_zero();

  Eigen::MatrixXd w_in;
  Eigen::MatrixXd w_rec;
  Eigen::VectorXd bias;
  Eigen::RowVectorXd w_out;
  double b_out = 0.0;
};

// Batched forward over `steps` (each F x B, already normalized). Returns the
// normalized outputs; fills `cache` when given.
Eigen::RowVectorXd lstm_forward_batch(const LstmModel& model, std::span<const Eigen::MatrixXd> steps,
                                      LstmCache* cache = nullptr);

// Single window (F x T, normalized): prediction de-normalized to TTI.
double lstm_forward(const LstmModel& model, const Eigen::MatrixXd& window, LstmCache* cache = nullptr);

// Back-propagation through time of L = 1/2 sum_b (y_b - target_b)^2, targets
// normalized. Gradients are accumulated into `grads` (not averaged).
double lstm_gradients(const LstmModel& model, const LstmCache& cache, const Eigen::RowVectorXd& targets,
                      LstmGradients& grads);

}  // namespace fwus
