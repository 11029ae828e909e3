#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sentarl/a2c.hpp"
#include "sentarl/error.hpp"
#include "support.hpp"

using namespace sentarl;
using namespace sentarl::testing;

namespace {

// V(x) = w * x + b on a one-dimensional state.
Mlp scalar_value(double w, double b) {
  Mlp net({1, 1});
  net.set_parameters(std::vector<double>{w, b});
  return net;
}

Transition step(double s, double r, double s_next, bool done = false, Action a = Action::Long) {
  Transition t;
  t.state = {s};
  t.next_state = {s_next};
  t.reward = r;
  t.done = done;
  t.action = a;
  return t;
}

A2cConfig quick(double lr = 0.1) {
  A2cConfig c;
  c.lr_actor = lr;
  c.lr_critic = lr;
  return c;
}

}  // namespace

TEST_CASE("advantage formula") {
  const Mlp v = scalar_value(0.5, 0.0);
  CHECK(advantage(step(1.0, 1.0, 0.0), v, 0.99) == doctest::Approx(0.5));
  // Terminal transitions bootstrap with zero whatever V(s') is.
  CHECK(advantage(step(1.0, 1.0, 4.0, true), v, 0.99) == doctest::Approx(0.5));
  // Bellman-consistent values: V(1) = 0.5 = R + 0.5 * V(2) with R = 0.
  const Mlp c = scalar_value(0.5, 0.0);
  CHECK(advantage(step(1.0, 0.0, 1.0), scalar_value(0.0, 1.0), 0.0) == doctest::Approx(-1.0));
  CHECK(advantage(step(1.0, -0.5, 2.0), c, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("critic targets, one-step and n-step") {
  const Mlp v = scalar_value(1.0, 0.0);
  const std::vector<Transition> batch = {step(0.0, 1.0, 1.0), step(1.0, 2.0, 3.0)};
  CHECK(critic_targets(batch, v, 0.5, false) == std::vector<double>{1.5, 3.5});
  // n-step: G1 = 2 + 0.5 * 3, G0 = 1 + 0.5 * G1.
  CHECK(critic_targets(batch, v, 0.5, true) == std::vector<double>{1.0 + 0.5 * 3.5, 3.5});
  const std::vector<Transition> ends = {step(0.0, 1.0, 1.0), step(1.0, 2.0, 3.0, true)};
  CHECK(critic_targets(ends, v, 0.5, true) == std::vector<double>{2.0, 2.0});
}

TEST_CASE("critic update: one hand-computed step") {
  Mlp v = scalar_value(0.0, 0.0);
  OptimizerState st;
  A2cConfig cfg = quick(0.1);
  cfg.gamma = 0.5;
  const std::vector<Transition> batch = {step(1.0, 1.0, 0.0)};
  // target 1, V(s) 0 -> loss 1, dL/dV = -2, so w and b both move by +0.2.
  CHECK(critic_update(batch, v, st, cfg) == doctest::Approx(1.0));
  CHECK(v.parameters()[0] == doctest::Approx(0.2));
  CHECK(v.parameters()[1] == doctest::Approx(0.2));
  CHECK(predict(v, std::vector<double>{1.0})[0] == doctest::Approx(0.4));
}

TEST_CASE("critic update with zero residual changes nothing") {
  Mlp v = scalar_value(0.5, 0.0);
  OptimizerState st;
  const std::vector<Transition> batch = {step(1.0, 0.5, 0.0, true), step(2.0, 1.0, 0.0, true)};
  CHECK(critic_update(batch, v, st, quick()) == 0.0);
  CHECK(v.parameters() == std::vector<double>{0.5, 0.0});
  CHECK_THROWS_AS(critic_update(std::span<const Transition>{}, v, st, quick()),
                  std::invalid_argument);
}

TEST_CASE("critic loss is non-negative") {
  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    Mlp v = Mlp::glorot({3, 4, 1}, Activation::tanh, rng);
    std::vector<Transition> batch;
    for (int i = 0; i < 5; ++i) {
      Transition t;
      t.state = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      t.next_state = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      t.reward = rng.uniform(-2, 2);
      batch.push_back(t);
    }
    OptimizerState st;
    CHECK(critic_update(batch, v, st, quick(0.01)) >= 0.0);
  }
}

TEST_CASE("actor update moves the chosen action's probability with the advantage") {
  Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    for (double adv : {1.0, -1.0}) {
      Mlp pi = Mlp::glorot({4, 8, 3}, Activation::tanh, rng);
      Transition t;
      t.state = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      t.action = action_from_index(static_cast<std::size_t>(k % 3));
      const double before = softmax(predict(pi, t.state))[action_index(t.action)];
      OptimizerState st;
      const std::vector<Transition> batch = {t};
      const std::vector<double> advs = {adv};
      actor_update(batch, pi, advs, st, quick(0.05));
      const double after = softmax(predict(pi, t.state))[action_index(t.action)];
      if (adv > 0) CHECK(after > before);
      if (adv < 0) CHECK(after < before);
    }
  }
}

TEST_CASE("actor update with zero advantages and no entropy bonus is a no-op") {
  Rng rng(3);
  Mlp pi = Mlp::glorot({2, 3, 3}, Activation::tanh, rng);
  const auto before = pi.parameters();
  std::vector<Transition> batch(4);
  for (auto& t : batch) t.state = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  OptimizerState st;
  const ActorStats stats = actor_update(batch, pi, std::vector<double>(4, 0.0), st, quick());
  CHECK(pi.parameters() == before);
  CHECK(stats.entropy > 0.0);
  CHECK(stats.entropy <= std::log(3.0) + 1e-12);
  CHECK_THROWS_AS(actor_update(batch, pi, std::vector<double>(3, 0.0), st, quick()),
                  std::invalid_argument);
}

TEST_CASE("greedy tie-break order is Neutral, Long, Short") {
  CHECK(greedy_action(std::vector<double>{0, 0, 0}) == Action::Neutral);
  CHECK(greedy_action(std::vector<double>{1, 0, 1}) == Action::Long);
  CHECK(greedy_action(std::vector<double>{1, 1, 0}) == Action::Neutral);
  CHECK(greedy_action(std::vector<double>{0, 0, 5}) == Action::Long);
  CHECK(greedy_action(std::vector<double>{2, 0, 1}) == Action::Short);
}

TEST_CASE("agent rejects states of the wrong size") {
  A2cAgent agent(5, A2cConfig{});
  MarketState s;
  s.diffs = {1.0};
  s.hours = {0.5};
  CHECK_THROWS_AS(agent.act_greedy(s), std::invalid_argument);
}

TEST_CASE("config validation") {
  A2cConfig c;
  CHECK_NOTHROW(c.validate());
  c.gamma = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.n_steps = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.episodes = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.lr_actor = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.entropy_coef = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("update count per episode is ceil(steps / n)") {
  const AlignedSeries s = make_series(random_walk(50, 4));
  EnvConfig env;  // w = 20, l = 5: decisions on rows 20..48
  A2cConfig cfg;
  cfg.episodes = 1;
  const TrainResult r = train(s, env, cfg);
  REQUIRE(r.log.size() == 1);
  CHECK(r.log[0].updates == 6);
  cfg.n_steps = 29;
  CHECK(train(s, env, cfg).log[0].updates == 1);
  cfg.n_steps = 1;
  CHECK(train(s, env, cfg).log[0].updates == 29);
}

TEST_CASE("training is a pure function of its inputs") {
  const AlignedSeries s = make_series(random_walk(120, 5));
  EnvConfig env;
  env.window = 6;
  env.sentiment_window = 2;
  A2cConfig cfg;
  cfg.episodes = 3;
  cfg.seed = 42;
  const TrainResult a = train(s, env, cfg);
  const TrainResult b = train(s, env, cfg);
  REQUIRE(a.log.size() == 3);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].train_tr == b.log[i].train_tr);
    CHECK(a.log[i].actor_loss == b.log[i].actor_loss);
    CHECK(a.log[i].critic_loss == b.log[i].critic_loss);
    CHECK(a.log[i].policy_entropy == b.log[i].policy_entropy);
  }
  CHECK(a.agent.policy_net() == b.agent.policy_net());
  CHECK(a.agent.value_net() == b.agent.value_net());

  cfg.seed = 43;
  CHECK_FALSE(train(s, env, cfg).agent.policy_net() == a.agent.policy_net());
}

TEST_CASE("zero-initialised sentiment weights reproduce the sentiment-free run") {
  const AlignedSeries s = make_series(random_walk(150, 6)).with_constant_sentiment(0.0);
  EnvConfig with;
  with.window = 8;
  with.sentiment_window = 3;
  EnvConfig without = with;
  without.use_sentiment = false;
  A2cConfig cfg;
  cfg.episodes = 3;
  cfg.seed = 7;
  cfg.zero_init_sentiment_weights = true;
  const TrainResult a = train(s, with, cfg);
  const TrainResult b = train(s, without, cfg);
  CHECK(a.agent.policy_net().input_size() == 20);
  CHECK(b.agent.policy_net().input_size() == 17);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].first_critic_loss == b.log[i].first_critic_loss);
    CHECK(a.log[i].train_tr == b.log[i].train_tr);
  }
}

TEST_CASE("a strong entropy bonus keeps the policy near uniform") {
  const AlignedSeries s = make_series(sinusoid(200));
  EnvConfig env;
  env.window = 6;
  env.sentiment_window = 1;
  A2cConfig cfg;
  cfg.episodes = 5;
  cfg.entropy_coef = 50.0;
  cfg.lr_actor = 1e-3;
  const TrainResult r = train(s, env, cfg);
  CHECK(r.log.back().policy_entropy > 0.95 * std::log(3.0));
}

TEST_CASE("training improves on the sinusoid") {
  const AlignedSeries s = make_series(sinusoid(300));
  EnvConfig env;
  env.sentiment_window = 0;
  env.use_sentiment = false;
  A2cConfig cfg;
  cfg.episodes = 30;
  const TrainResult r = train(s, env, cfg);
  const double bh = run_buy_and_hold(s, env).total_return();
  CHECK(r.log.back().train_tr > bh);
}

TEST_CASE("greedy evaluation is deterministic and sampling follows its seed") {
  const AlignedSeries s = make_series(random_walk(80, 8));
  EnvConfig env;
  env.window = 5;
  env.sentiment_window = 2;
  A2cConfig cfg;
  cfg.seed = 1;
  const A2cAgent agent = A2cAgent::for_env(env, cfg);
  TradingEnv e1(s, env), e2(s, env);
  CHECK(evaluate(agent, e1).actions == evaluate(agent, e2).actions);
  TradingEnv e3(s, env), e4(s, env);
  CHECK(evaluate(agent, e3, EvalMode::sample, 5).actions ==
        evaluate(agent, e4, EvalMode::sample, 5).actions);
}

TEST_CASE("training log csv header") {
  TempDir dir;
  const std::vector<EpisodeLog> log = {{0, 0.01, 0.5, 0.25, 1.0, 3, 0.2}};
  write_training_log(log, dir / "log.csv");
  CHECK(read_text(dir / "log.csv") ==
        "episode,train_tr,actor_loss,critic_loss,policy_entropy\n0,0.01,0.5,0.25,1\n");
}
