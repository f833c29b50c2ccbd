#include "fwus/lstm.hpp"

#include <cmath>

#include "fwus/error.hpp"

namespace fwus {
namespace {

using Eigen::MatrixXd;

MatrixXd sigmoid(const MatrixXd& z) {
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

}  // namespace

LstmModel::LstmModel(int input_size, int hidden_size) {
  if (input_size <= 0 || hidden_size <= 0) fail(ErrorCode::kShape, "LSTM sizes must be positive");
  const int H = hidden_size;
  w_in = MatrixXd::Zero(4 * H, input_size);
  w_rec = MatrixXd::Zero(4 * H, H);
  bias = Eigen::VectorXd::Zero(4 * H);
  w_out = Eigen::RowVectorXd::Zero(H);
  feature_mean = Eigen::VectorXd::Zero(input_size);
  feature_scale = Eigen::VectorXd::Ones(input_size);
}

void LstmModel::initialize(Rng& rng) {
  const double a = 1.0 / std::sqrt(static_cast<double>(hidden_size()));
  auto draw = [&] { return a * (2.0 * uniform01(rng) - 1.0); };
  for (Eigen::Index i = 0; i < w_in.size(); ++i) w_in.data()[i] = draw();
  for (Eigen::Index i = 0; i < w_rec.size(); ++i) w_rec.data()[i] = draw();
  for (Eigen::Index i = 0; i < bias.size(); ++i) bias[i] = draw();
  for (Eigen::Index i = 0; i < w_out.size(); ++i) w_out[i] = draw();
  b_out = 0.0;
  bias.segment(hidden_size(), hidden_size()).setOnes();
}

bool LstmModel::all_finite() const {
  return w_in.allFinite() && w_rec.allFinite() && bias.allFinite() && w_out.allFinite() && std::isfinite(b_out) &&
         feature_mean.allFinite() && feature_scale.allFinite() && std::isfinite(target_mean) &&
         std::isfinite(target_scale);
}

LstmGradients::LstmGradients(const LstmModel& m)
    : w_in(MatrixXd::Zero(m.w_in.rows(), m.w_in.cols())),
      w_rec(MatrixXd::Zero(m.w_rec.rows(), m.w_rec.cols())),
      bias(Eigen::VectorXd::Zero(m.bias.size())),
      w_out(Eigen::RowVectorXd::Zero(m.w_out.size())) {}

void LstmGradients::set_zero() {
  w_in.setZero();
  w_rec.setZero();
  bias.setZero();
  w_out.setZero();
  b_out = 0.0;
}

Eigen::RowVectorXd lstm_forward_batch(const LstmModel& model, std::span<const MatrixXd> steps, LstmCache* cache) {
  if (steps.empty()) fail(ErrorCode::kShape, "LSTM input has no time steps");
  const int H = model.hidden_size();
  const Eigen::Index B = steps.front().cols();
  MatrixXd h = MatrixXd::Zero(H, B);
  MatrixXd c = MatrixXd::Zero(H, B);

  if (cache) {
    *cache = LstmCache{};
    const std::size_t T = steps.size();
    cache->x.reserve(T);
    cache->gate_i.reserve(T);
    cache->gate_f.reserve(T);
    cache->gate_o.reserve(T);
    cache->cand.reserve(T);
    cache->cell.reserve(T);
    cache->hidden.reserve(T);
  }

  for (const MatrixXd& x : steps) {
    if (x.rows() != model.input_size() || x.cols() != B) fail(ErrorCode::kShape, "LSTM step has the wrong shape");
    MatrixXd z = model.w_in * x + model.w_rec * h;
    z.colwise() += model.bias;
    MatrixXd gi = sigmoid(z.topRows(H));
    MatrixXd gf = sigmoid(z.middleRows(H, H));
    MatrixXd go = sigmoid(z.middleRows(2 * H, H));
    MatrixXd gg = z.bottomRows(H).array().tanh().matrix();
    c = (gf.array() * c.array() + gi.array() * gg.array()).matrix();
    h = (go.array() * c.array().tanh()).matrix();
    if (cache) {
      cache->x.push_back(x);
      cache->gate_i.push_back(std::move(gi));
      cache->gate_f.push_back(std::move(gf));
      cache->gate_o.push_back(std::move(go));
      cache->cand.push_back(std::move(gg));
      cache->cell.push_back(c);
      cache->hidden.push_back(h);
    }
  }

  Eigen::RowVectorXd y = model.w_out * h;
  y.array() += model.b_out;
  if (cache) cache->output = y;
  return y;
}

double lstm_forward(const LstmModel& model, const MatrixXd& window, LstmCache* cache) {
  std::vector<MatrixXd> steps;
  steps.reserve(static_cast<std::size_t>(window.cols()));
  for (Eigen::Index t = 0; t < window.cols(); ++t) steps.emplace_back(window.col(t));
  const double y = lstm_forward_batch(model, steps, cache)[0];
  return y * model.target_scale + model.target_mean;
}

double lstm_gradients(const LstmModel& model, const LstmCache& cache, const Eigen::RowVectorXd& targets,
                      LstmGradients& grads) {
  const std::size_t T = cache.hidden.size();
  if (T == 0 || targets.size() != cache.output.size()) fail(ErrorCode::kShape, "gradient inputs do not match");
  const int H = model.hidden_size();
  const Eigen::Index B = targets.size();

  const Eigen::RowVectorXd dy = cache.output - targets;
  const double loss = 0.5 * dy.squaredNorm();

  grads.w_out += dy * cache.hidden.back().transpose();
  grads.b_out += dy.sum();

  MatrixXd dh = model.w_out.transpose() * dy;
  MatrixXd dc = MatrixXd::Zero(H, B);
  MatrixXd dz(4 * H, B);
  const MatrixXd zero = MatrixXd::Zero(H, B);

  for (std::size_t k = T; k-- > 0;) {
    const auto& gi = cache.gate_i[k].array();
    const auto& gf = cache.gate_f[k].array();
    const auto& go = cache.gate_o[k].array();
    const auto& gg = cache.cand[k].array();
    const MatrixXd& c_prev = k > 0 ? cache.cell[k - 1] : zero;
    const MatrixXd& h_prev = k > 0 ? cache.hidden[k - 1] : zero;

    const Eigen::ArrayXXd tc = cache.cell[k].array().tanh();
    dc.array() += dh.array() * go * (1.0 - tc.square());

    dz.topRows(H) = (dc.array() * gg * gi * (1.0 - gi)).matrix();
    dz.middleRows(H, H) = (dc.array() * c_prev.array() * gf * (1.0 - gf)).matrix();
    dz.middleRows(2 * H, H) = (dh.array() * tc * go * (1.0 - go)).matrix();
    dz.bottomRows(H) = (dc.array() * gi * (1.0 - gg.square())).matrix();

    grads.w_in.noalias() += dz * cache.x[k].transpose();
    grads.w_rec.noalias() += dz * h_prev.transpose();
    grads.bias += dz.rowwise().sum();

    dh.noalias() = model.w_rec.transpose() * dz;
    dc = (dc.array() * gf).matrix();
  }
  return loss;
}

}  // namespace fwus
