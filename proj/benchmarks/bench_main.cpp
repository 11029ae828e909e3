#include <benchmark/benchmark.h>

#include <chrono>
#include <cmath>
#include <vector>

#include "sentarl/a2c.hpp"
#include "sentarl/neural.hpp"
#include "sentarl/sentiment.hpp"
#include "sentarl/trading_env.hpp"

using namespace sentarl;

namespace {

AlignedSeries synthetic(std::size_t n) {
  AlignedSeries s;
  s.asset = "BENCH";
  const Timestamp start = parse_timestamp("2021-01-04T00:00:00Z");
  for (std::size_t t = 0; t < n; ++t) {
    const Timestamp ts = start + std::chrono::hours(static_cast<long>(t));
    const double p = 100.0 + 10.0 * std::sin(static_cast<double>(t) / 3.8);
    s.timestamps.push_back(ts);
    s.diffs.push_back(t == 0 ? 0.0 : p - s.prices.back());
    s.prices.push_back(p);
    s.hours.push_back(hour_of_day(ts) / 24.0);
    s.sentiment.push_back(std::sin(static_cast<double>(t) / 7.0));
    s.has_news.push_back(t % 4 == 0);
  }
  return s;
}

std::vector<double> input(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(static_cast<double>(i));
  return x;
}

}  // namespace

static void BM_MlpForward(benchmark::State& state) {
  Rng rng(1);
  const Mlp net = Mlp::glorot({46, 64, 64, 3}, Activation::tanh, rng);
  const auto x = input(46);
  for (auto _ : state) benchmark::DoNotOptimize(predict(net, x));
}
BENCHMARK(BM_MlpForward);

static void BM_MlpForwardBackward(benchmark::State& state) {
  Rng rng(2);
  const Mlp net = Mlp::glorot({46, 64, 64, 3}, Activation::tanh, rng);
  const auto x = input(46);
  const std::vector<double> g = {0.1, -0.2, 0.3};
  for (auto _ : state) {
    const auto cache = forward(net, x);
    benchmark::DoNotOptimize(backward(net, cache, g));
  }
}
BENCHMARK(BM_MlpForwardBackward);

static void BM_EnvEpisode(benchmark::State& state) {
  const AlignedSeries s = synthetic(static_cast<std::size_t>(state.range(0)));
  const EnvConfig cfg;
  const Policy policy = baseline_policy(BaselineKind::random, 3);
  for (auto _ : state) {
    TradingEnv env(s, cfg);
    benchmark::DoNotOptimize(run_episode(env, policy));
  }
  state.SetItemsProcessed(state.iterations() * (state.range(0) - 21));
}
BENCHMARK(BM_EnvEpisode)->Arg(374)->Arg(3377);

static void BM_A2cUpdate(benchmark::State& state) {
  A2cConfig cfg;
  A2cAgent agent(46, cfg);
  std::vector<Transition> batch(cfg.n_steps);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    batch[i].state = input(46);
    batch[i].next_state = input(46);
    batch[i].reward = 0.1 * static_cast<double>(i);
    batch[i].action = action_from_index(i % 3);
  }
  for (auto _ : state) {
    std::vector<double> adv;
    for (const auto& t : batch) adv.push_back(advantage(t, agent.value_net(), cfg.gamma));
    benchmark::DoNotOptimize(critic_update(batch, agent.value_net(), agent.critic_state(), cfg));
    benchmark::DoNotOptimize(actor_update(batch, agent.policy_net(), adv, agent.actor_state(), cfg));
  }
}
BENCHMARK(BM_A2cUpdate);

static void BM_TrainEpisode(benchmark::State& state) {
  const AlignedSeries s = synthetic(374);
  const EnvConfig env;
  A2cConfig cfg;
  cfg.episodes = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(s, env, cfg));
}
BENCHMARK(BM_TrainEpisode)->Unit(benchmark::kMillisecond);

static void BM_CorrelationPulse(benchmark::State& state) {
  const AlignedSeries s = synthetic(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(correlation_pulse(s));
}
BENCHMARK(BM_CorrelationPulse)->Arg(5267);
BENCHMARK_MAIN();
