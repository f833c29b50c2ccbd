#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "fwus/checkpoint.hpp"
#include "fwus/config.hpp"
#include "fwus/error.hpp"
#include "fwus/metrics.hpp"
#include "fwus/monte_carlo.hpp"
#include "fwus/train.hpp"

namespace fwus {
namespace {

std::vector<std::int64_t> periodic_slots(std::size_t n, std::int64_t period) {
  std::vector<std::int64_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = 3 + static_cast<std::int64_t>(i) * period;
  return s;
}

TrainConfig small_config() {
  TrainConfig c;
  c.hidden_size = 8;
  c.window = 10;
  c.max_epochs = 5;
  c.learning_rate = 1e-3;
  c.seed = 5;
  return c;
}

TEST(Metrics, Rmse) {
  const std::vector<double> a{1, 2}, b{1, 4};
  EXPECT_NEAR(rmse(a, b), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(rmse(a, a), 0.0);
  const std::vector<double> x{3.5}, y{-1.0};
  EXPECT_DOUBLE_EQ(rmse(x, y), 4.5);
  const std::vector<double> none;
  EXPECT_THROW(rmse(none, none), Error);
  EXPECT_THROW(rmse(a, x), Error);
}

TEST(Metrics, RMetric) {
  const std::vector<double> obs{4.0, 7.0, 1.0};
  EXPECT_DOUBLE_EQ(r_metric(obs, obs), 1.0);
  const std::vector<double> zeros(3, 0.0);
  EXPECT_DOUBLE_EQ(r_metric(zeros, obs), 0.0);
  const std::vector<double> g{2.0}, go{4.0};
  EXPECT_NEAR(r_metric(g, go), std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(r_metric(g, go), 0.8660, 1e-4);

  const std::vector<double> far{20.0}, zero_obs{0.0};
  EXPECT_LT(r_metric_radicand(far, go), 0.0);
  try {
    r_metric(far, go);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFitFailure);
  }
  EXPECT_THROW(r_metric(g, zero_obs), Error);
}

TEST(Metrics, PowerSaving) {
  EXPECT_DOUBLE_EQ(power_saving(80.0, 100.0), 0.2);
  EXPECT_DOUBLE_EQ(power_saving(100.0, 100.0), 0.0);
  EXPECT_THROW(power_saving(1.0, 0.0), Error);
}

TEST(Dataset, ChronologicalSplit) {
  const auto cfg = small_config();
  const auto d = make_dataset(periodic_slots(111, 7), cfg);
  ASSERT_EQ(d.sample_count(), 100u);
  EXPECT_EQ(d.train_end, 70u);
  EXPECT_EQ(d.validation_end, 85u);
  EXPECT_EQ(d.target(0), 7.0);
  EXPECT_EQ(d.inputs(0).size(), 11u);
  EXPECT_EQ(d.inputs(5).front(), d.slots[5]);
}

TEST(Dataset, RejectsBadInput) {
  const auto cfg = small_config();
  try {
    make_dataset(periodic_slots(cfg.window + 3, 5), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidDataset);
  }
  EXPECT_THROW(make_dataset({1, 5, 4, 9}, cfg), Error);
  TrainConfig bad = cfg;
  bad.test_fraction = 0.3;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.learning_rate = 0.0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Features, RightAlignedWindow) {
  auto cfg = small_config();
  const auto d = make_dataset(periodic_slots(200, 9), cfg);
  auto m = make_model(d, cfg, 9.0);
  EXPECT_DOUBLE_EQ(m.feature_mean[0], 9.0);
  const std::vector<std::int64_t> few{0, 9, 30};
  const auto f = make_features(m, few);
  ASSERT_EQ(f.cols(), cfg.window);
  for (int t = 0; t < cfg.window - 2; ++t) EXPECT_EQ(f.col(t).norm(), 0.0);
  EXPECT_DOUBLE_EQ(f(0, cfg.window - 2), 0.0);  // gap 9 is the mean
  EXPECT_DOUBLE_EQ(f(0, cfg.window - 1), (21.0 - 9.0) / m.feature_scale[0]);
}

TEST(Train, ConstantSequenceIsLearned) {
  TrainConfig cfg = small_config();
  cfg.learning_rate = 1e-2;
  cfg.max_epochs = 30;
  const std::int64_t period = 50;
  const auto d = make_dataset(periodic_slots(600, period), cfg);
  const auto res = train(make_model(d, cfg, 50.0), d, cfg);
  EXPECT_TRUE(res.model.trained);
  const auto val = predict_range(res.model, d, d.train_end, d.validation_end);
  std::vector<double> g, go;
  for (const auto& r : val) {
    g.push_back(r.predicted);
    go.push_back(r.observed);
  }
  EXPECT_LT(rmse(g, go), 0.01 * period);
}

TEST(Train, SameSeedSameWeights) {
  const auto cfg = small_config();
  std::vector<std::int64_t> slots{0};
  Rng rng(3);
  for (int i = 0; i < 400; ++i) slots.push_back(slots.back() + 1 + static_cast<std::int64_t>(rng() % 40));
  const auto d = make_dataset(slots, cfg);
  const auto a = train(make_model(d, cfg, 10.0), d, cfg);
  const auto b = train(make_model(d, cfg, 10.0), d, cfg);
  EXPECT_EQ(a.model.w_in, b.model.w_in);
  EXPECT_EQ(a.model.w_rec, b.model.w_rec);
  EXPECT_EQ(a.model.bias, b.model.bias);
  EXPECT_EQ(a.model.w_out, b.model.w_out);
  EXPECT_EQ(a.model.b_out, b.model.b_out);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) EXPECT_EQ(a.history[i].validation_rmse, b.history[i].validation_rmse);
}

TEST(Train, EarlyRmseNonIncreasingOnEventTraffic) {
  ScenarioConfig sc;
  sc.lambda_E = 1e-2;
  sc.train_packets = 3000;
  sc.train_devices = 5;
  TrainConfig cfg;
  cfg.hidden_size = 16;
  cfg.max_epochs = 5;
  cfg.patience = 10;
  cfg.learning_rate = 1e-3;

  std::vector<std::vector<double>> curves;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    cfg.seed = seed;
    const auto d = make_dataset(training_arrivals(sc, seed), cfg);
    const auto res = train(make_model(d, cfg, 47.0), d, cfg);
    ASSERT_EQ(res.history.size(), 5u);
    std::vector<double> c;
    for (const auto& e : res.history) c.push_back(e.train_rmse);
    curves.push_back(c);
  }
  std::vector<double> median;
  for (std::size_t e = 0; e < 5; ++e) {
    std::vector<double> v;
    for (const auto& c : curves) v.push_back(c[e]);
    std::nth_element(v.begin(), v.begin() + 5, v.end());
    median.push_back(v[5]);
  }
  for (std::size_t e = 1; e < 5; ++e) EXPECT_LE(median[e], median[e - 1]) << "epoch " << e + 1;
}

TEST(Checkpoint, RoundTrip) {
  auto cfg = small_config();
  const auto d = make_dataset(periodic_slots(200, 9), cfg);
  auto m = make_model(d, cfg, 9.0);
  m.margin = 12.25;
  m.trained = true;
  m.b_out = 0.1 + 0.2;
  std::stringstream buf;
  save_checkpoint(m, buf);
  const auto r = load_checkpoint(buf);
  EXPECT_EQ(r.w_in, m.w_in);
  EXPECT_EQ(r.w_rec, m.w_rec);
  EXPECT_EQ(r.bias, m.bias);
  EXPECT_EQ(r.w_out, m.w_out);
  EXPECT_EQ(r.b_out, m.b_out);
  EXPECT_EQ(r.feature_mean, m.feature_mean);
  EXPECT_EQ(r.feature_scale, m.feature_scale);
  EXPECT_EQ(r.target_mean, m.target_mean);
  EXPECT_EQ(r.margin, 12.25);
  EXPECT_EQ(r.window, m.window);
  EXPECT_TRUE(r.trained);
}

TEST(Checkpoint, RejectsOtherVersions) {
  auto cfg = small_config();
  const auto d = make_dataset(periodic_slots(200, 9), cfg);
  std::stringstream buf;
  save_checkpoint(make_model(d, cfg, 9.0), buf);
  std::string text = buf.str();
  const auto pos = text.find("\"version\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 12, "\"version\": 7");
  std::istringstream in(text);
  try {
    load_checkpoint(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
  std::istringstream junk("{not json");
  EXPECT_THROW(load_checkpoint(junk), Error);
}

}  // namespace
}  // namespace fwus
