#include "fwus/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <spdlog/spdlog.h>

#include "fwus/error.hpp"

namespace fwus {
namespace {

constexpr int kFeatures = 2;  // gap, slot phase

double phase_of(std::int64_t slot, double period) {
  const double r = std::fmod(static_cast<double>(slot), period);
  return (r < 0.0 ? r + period : r) / period;
}

// Normalized features of every gap in `slots`; column k describes the gap
// ending at slots[k + 1].
Eigen::MatrixXd gap_features(const LstmModel& model, std::span<const std::int64_t> slots) {
  const Eigen::Index n = slots.size() < 2 ? 0 : static_cast<Eigen::Index>(slots.size() - 1);
  Eigen::MatrixXd f(kFeatures, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    f(0, k) = static_cast<double>(slots[k + 1] - slots[k]);
    f(1, k) = phase_of(slots[k + 1], model.phase_period);
  }
  for (int r = 0; r < kFeatures; ++r) {
    f.row(r).array() -= model.feature_mean[r];
    f.row(r).array() /= model.feature_scale[r];
  }
  return f;
}

struct Moments {
  double mean = 0.0;
  double scale = 1.0;
};

template <class Range>
Moments moments(const Range& xs) {
  Moments m;
  double n = 0.0, s = 0.0, ss = 0.0;
  for (double x : xs) {
    n += 1.0;
    s += x;
    ss += x * x;
  }
  if (n == 0.0) return m;
  m.mean = s / n;
  const double var = std::max(0.0, ss / n - m.mean * m.mean);
  m.scale = var > 1e-24 ? std::sqrt(var) : 1.0;
  return m;
}

// Gathers the T step matrices (F x B) and normalized targets for `idx`.
void gather(const Eigen::MatrixXd& feats, const std::vector<double>& targets, std::span<const std::size_t> idx,
            int window, std::vector<Eigen::MatrixXd>& steps, Eigen::RowVectorXd& y) {
  const Eigen::Index B = static_cast<Eigen::Index>(idx.size());
  steps.resize(static_cast<std::size_t>(window));
  for (int t = 0; t < window; ++t) {
    auto& m = steps[static_cast<std::size_t>(t)];
    m.resize(kFeatures, B);
    for (Eigen::Index b = 0; b < B; ++b) m.col(b) = feats.col(static_cast<Eigen::Index>(idx[b]) + t);
  }
  y.resize(B);
  for (Eigen::Index b = 0; b < B; ++b) y[b] = targets[idx[b]];
}

struct AdamState {
  explicit AdamState(const LstmModel& m) : m(m), v(m) {}
  LstmGradients m, v;
  long step = 0;
};

template <class P, class G>
void adam_update(P& param, const G& grad, G& m, G& v, const TrainConfig& cfg, double c1, double c2) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = (cfg.beta2 * v.array() + (1.0 - cfg.beta2) * grad.array().square()).matrix();
  param.array() -= cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.epsilon);
}

void adam_step(LstmModel& model, const LstmGradients& g, AdamState& s, const TrainConfig& cfg) {
  ++s.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(s.step));
  adam_update(model.w_in, g.w_in, s.m.w_in, s.v.w_in, cfg, c1, c2);
  adam_update(model.w_rec, g.w_rec, s.m.w_rec, s.v.w_rec, cfg, c1, c2);
  adam_update(model.bias, g.bias, s.m.bias, s.v.bias, cfg, c1, c2);
  adam_update(model.w_out, g.w_out, s.m.w_out, s.v.w_out, cfg, c1, c2);
  s.m.b_out = cfg.beta1 * s.m.b_out + (1.0 - cfg.beta1) * g.b_out;
  s.v.b_out = cfg.beta2 * s.v.b_out + (1.0 - cfg.beta2) * g.b_out * g.b_out;
  model.b_out -= cfg.learning_rate * (s.m.b_out / c1) / (std::sqrt(s.v.b_out / c2) + cfg.epsilon);
}

// Normalized outputs for samples [begin, end).
std::vector<double> batch_predict(const LstmModel& model, const Eigen::MatrixXd& feats,
                                  const std::vector<double>& targets, std::size_t begin, std::size_t end) {
  std::vector<double> out;
  out.reserve(end - begin);
  std::vector<std::size_t> idx;
  std::vector<Eigen::MatrixXd> steps;
  Eigen::RowVectorXd y;
  constexpr std::size_t kChunk = 512;
  for (std::size_t a = begin; a < end; a += kChunk) {
    const std::size_t b = std::min(end, a + kChunk);
    idx.resize(b - a);
    std::iota(idx.begin(), idx.end(), a);
    gather(feats, targets, idx, model.window, steps, y);
    const Eigen::RowVectorXd pred = lstm_forward_batch(model, steps);
    for (Eigen::Index k = 0; k < pred.size(); ++k) out.push_back(pred[k]);
  }
  return out;
}

double normalized_rmse(const std::vector<double>& pred, const std::vector<double>& targets, std::size_t begin) {
  if (pred.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double d = pred[k] - targets[begin + k];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(pred.size()));
}

std::vector<double> normalized_targets(const LstmModel& model, const ForecastDataset& data) {
  std::vector<double> t(data.sample_count());
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = (data.target(j) - model.target_mean) / model.target_scale;
  return t;
}

}  // namespace

void TrainConfig::validate() const {
  if (hidden_size <= 0) fail(ErrorCode::kInvalidParameter, "hidden_size must be > 0");
  if (!(learning_rate > 0.0)) fail(ErrorCode::kInvalidParameter, "learning_rate must be > 0");
  if (max_epochs <= 0) fail(ErrorCode::kInvalidParameter, "max_epochs must be > 0");
  if (patience <= 0) fail(ErrorCode::kInvalidParameter, "patience must be > 0");
  if (window <= 0) fail(ErrorCode::kInvalidParameter, "window must be > 0");
  if (batch_size <= 0) fail(ErrorCode::kInvalidParameter, "batch_size must be > 0");
  if (!(train_fraction > 0.0) || !(validation_fraction > 0.0) || !(test_fraction > 0.0) ||
      std::abs(train_fraction + validation_fraction + test_fraction - 1.0) > 1e-9) {
    fail(ErrorCode::kInvalidParameter, "split fractions must be positive and sum to 1");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
    fail(ErrorCode::kInvalidParameter, "invalid Adam hyper-parameters");
  }
}

double ForecastDataset::target(std::size_t j) const {
  return static_cast<double>(slots[j + window + 1] - slots[j + window]);
}

std::span<const std::int64_t> ForecastDataset::inputs(std::size_t j) const {
  return std::span<const std::int64_t>(slots).subspan(j, window + 1);
}

ForecastDataset make_dataset(std::vector<std::int64_t> arrival_slots, const TrainConfig& cfg) {
  cfg.validate();
  if (!std::is_sorted(arrival_slots.begin(), arrival_slots.end()) ||
      std::adjacent_find(arrival_slots.begin(), arrival_slots.end()) != arrival_slots.end()) {
    fail(ErrorCode::kInvalidDataset, "arrival slots must be strictly increasing");
  }
  ForecastDataset d;
  d.slots = std::move(arrival_slots);
  d.window = static_cast<std::size_t>(cfg.window);
  const std::size_t n = d.sample_count();
  d.train_end = static_cast<std::size_t>(std::floor(static_cast<double>(n) * cfg.train_fraction));
  d.validation_end =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) * (cfg.train_fraction + cfg.validation_fraction)));
  if (d.train_end < 2 || d.validation_end <= d.train_end || d.validation_end >= n) {
    fail(ErrorCode::kInvalidDataset,
         "only " + std::to_string(n) + " windowed samples; too few for a train/validation/test split");
  }
  return d;
}

Eigen::MatrixXd make_features(const LstmModel& model, std::span<const std::int64_t> slots) {
  const Eigen::Index T = model.window;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(model.input_size(), T);  // zero == the mean after scaling
  if (slots.size() > static_cast<std::size_t>(T) + 1) slots = slots.last(static_cast<std::size_t>(T) + 1);
  const Eigen::MatrixXd f = gap_features(model, slots);
  out.rightCols(f.cols()) = f;
  return out;
}

LstmModel make_model(const ForecastDataset& data, const TrainConfig& cfg, double phase_period) {
  cfg.validate();
  if (!(phase_period > 0.0)) fail(ErrorCode::kInvalidParameter, "phase period must be > 0");
  if (data.train_end == 0) fail(ErrorCode::kInvalidDataset, "empty training split");
  LstmModel model(kFeatures, cfg.hidden_size);
  Rng rng(cfg.seed);
  model.initialize(rng);
  model.window = cfg.window;
  model.phase_period = phase_period;

  // Statistics over every gap the training samples touch.
  const std::size_t last_gap = data.train_end + data.window;  // exclusive, gap k ends at slots[k+1]
  std::vector<double> gaps, phases, targets;
  for (std::size_t k = 0; k < last_gap; ++k) {
    gaps.push_back(static_cast<double>(data.slots[k + 1] - data.slots[k]));
    phases.push_back(phase_of(data.slots[k + 1], phase_period));
  }
  for (std::size_t j = 0; j < data.train_end; ++j) targets.push_back(data.target(j));
  const Moments g = moments(gaps), p = moments(phases), t = moments(targets);
  model.feature_mean = Eigen::Vector2d(g.mean, p.mean);
  model.feature_scale = Eigen::Vector2d(g.scale, p.scale);
  model.target_mean = t.mean;
  model.target_scale = t.scale;
  return model;
}

TrainResult train(LstmModel model, const ForecastDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.window != static_cast<std::size_t>(model.window)) fail(ErrorCode::kShape, "dataset window differs from model");
  if (data.train_end == 0 || data.validation_end <= data.train_end) fail(ErrorCode::kInvalidDataset, "empty split");

  const Eigen::MatrixXd feats = gap_features(model, data.slots);
  const std::vector<double> targets = normalized_targets(model, data);

  TrainResult result;
  result.model = model;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;

  AdamState adam(model);
  LstmGradients grads(model);
  LstmCache cache;
  std::vector<Eigen::MatrixXd> steps;
  Eigen::RowVectorXd y;
  Rng rng(mix_seed(cfg.seed));
  std::vector<std::size_t> order(data.train_end);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    for (std::size_t a = 0; a < order.size(); a += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t b = std::min(order.size(), a + static_cast<std::size_t>(cfg.batch_size));
      const std::span<const std::size_t> idx(order.data() + a, b - a);
      gather(feats, targets, idx, model.window, steps, y);
      lstm_forward_batch(model, steps, &cache);
      grads.set_zero();
      loss += lstm_gradients(model, cache, y, grads);
      const double inv = 1.0 / static_cast<double>(idx.size());
      grads.w_in *= inv;
      grads.w_rec *= inv;
      grads.bias *= inv;
      grads.w_out *= inv;
      grads.b_out *= inv;
      adam_step(model, grads, adam, cfg);
    }
    if (!model.all_finite()) fail(ErrorCode::kFitFailure, "training diverged (non-finite weights)");

    const auto val = batch_predict(model, feats, targets, data.train_end, data.validation_end);
    EpochStats st;
    st.epoch = epoch;
    st.train_rmse = std::sqrt(2.0 * loss / static_cast<double>(order.size()));
    st.validation_rmse = normalized_rmse(val, targets, data.train_end);
    st.validation_rmse_tti = st.validation_rmse * model.target_scale;
    result.history.push_back(st);
    spdlog::debug("epoch {}: train {:.4f} validation {:.4f}", epoch, st.train_rmse, st.validation_rmse);

    if (st.validation_rmse < best) {
      best = st.validation_rmse;
      since_best = 0;
      result.model = model;
      result.best_epoch = epoch;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  result.model.trained = true;
  return result;
}

std::vector<PredictionRecord> predict_range(const LstmModel& model, const ForecastDataset& data,
                                            std::size_t begin, std::size_t end) {
  if (begin > end || end > data.sample_count()) fail(ErrorCode::kShape, "prediction range out of bounds");
  if (data.window != static_cast<std::size_t>(model.window)) fail(ErrorCode::kShape, "dataset window differs from model");
  std::vector<PredictionRecord> out;
  if (begin == end) return out;
  // Only the gaps this range touches.
  const auto slots = std::span<const std::int64_t>(data.slots).subspan(begin, end - begin + data.window + 1);
  const Eigen::MatrixXd feats = gap_features(model, slots);
  std::vector<double> dummy(end - begin, 0.0);
  const auto pred = batch_predict(model, feats, dummy, 0, end - begin);
  out.reserve(pred.size());
  for (std::size_t k = 0; k < pred.size(); ++k) {
    out.push_back({data.target(begin + k), pred[k] * model.target_scale + model.target_mean});
  }
  return out;
}

}  // namespace fwus
