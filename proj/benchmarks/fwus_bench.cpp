#include <benchmark/benchmark.h>

#include <vector>

#include "fwus/config.hpp"
#include "fwus/lstm.hpp"
#include "fwus/scenario.hpp"
#include "fwus/spatial.hpp"
#include "fwus/traffic.hpp"
#include "fwus/wakeup.hpp"

namespace {

using namespace fwus;

std::vector<Eigen::MatrixXd> random_steps(int features, int batch, int steps, Rng& rng) {
  std::vector<Eigen::MatrixXd> out;
  for (int t = 0; t < steps; ++t) {
    Eigen::MatrixXd x(features, batch);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 2.0 * uniform01(rng) - 1.0;
    out.push_back(std::move(x));
  }
  return out;
}

void BM_LstmForward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  Rng rng(1);
  LstmModel m(2, 100);
  m.initialize(rng);
  const auto steps = random_steps(2, batch, 20, rng);
  for (auto _ : state) benchmark::DoNotOptimize(lstm_forward_batch(m, steps));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_LstmForward)->Arg(1)->Arg(16);

// Forward with cache plus backprop for one minibatch.
void BM_LstmTrainStep(benchmark::State& state) {
  Rng rng(2);
  LstmModel m(2, 100);
  m.initialize(rng);
  const auto steps = random_steps(2, 16, 20, rng);
  Eigen::RowVectorXd target = Eigen::RowVectorXd::Random(16);
  LstmCache cache;
  LstmGradients g(m);
  for (auto _ : state) {
    lstm_forward_batch(m, steps, &cache);
    g.set_zero();
    benchmark::DoNotOptimize(lstm_gradients(m, cache, target, g));
  }
}
BENCHMARK(BM_LstmTrainStep);

void BM_SolveT4(benchmark::State& state) {
  WakeupParams w;
  double q = 0.0;
  for (auto _ : state) {
    q = q > 0.9 ? 0.0 : q + 0.01;
    benchmark::DoNotOptimize(solve_t4(0.01, q, w));
  }
}
BENCHMARK(BM_SolveT4);

void BM_TraceGeneration(benchmark::State& state) {
  const std::vector<TrafficModel> models(10, TrafficModel{0.006, 0.5, 1.0, 0.0});
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(generate_trace(models, state.range(0), rng, false));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 10);
}
BENCHMARK(BM_TraceGeneration)->Arg(100'000);

void BM_RadioScheme(benchmark::State& state) {
  const auto scheme = static_cast<SchemeKind>(state.range(0));
  ScenarioConfig cfg;
  const double pa = activation_probability_analytic(cfg.lambda_E, InfluenceFunction::exponential());
  const std::vector<TrafficModel> models(10, TrafficModel{pa, 0.5, 1.0, 0.0});
  std::vector<DeviceSetup> setups(10, DeviceSetup{pa, 0.5, static_sleep_time(cfg, 0.5)});
  Rng trng(4);
  const auto trace = generate_trace(models, 1'000'000, trng, false);
  for (auto _ : state) {
    Rng rng(5);
    benchmark::DoNotOptimize(run_scenario(cfg, scheme, trace, setups, nullptr, rng));
  }
  state.SetLabel(std::string(to_string(scheme)));
}
BENCHMARK(BM_RadioScheme)->Arg(static_cast<int>(SchemeKind::kDrx))->Arg(static_cast<int>(SchemeKind::kWus));

}  // namespace

BENCHMARK_MAIN();
