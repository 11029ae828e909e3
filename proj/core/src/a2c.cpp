#include "sentarl/a2c.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "sentarl/csv.hpp"
#include "sentarl/error.hpp"

namespace sentarl {

void A2cConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("A2cConfig: gamma in [0, 1]");
  if (!(lr_actor > 0.0) || !(lr_critic > 0.0)) {
    throw std::invalid_argument("A2cConfig: learning rates must be positive");
  }
  if (n_steps < 1) throw std::invalid_argument("A2cConfig: n_steps must be >= 1");
  if (episodes < 1) throw std::invalid_argument("A2cConfig: episodes must be >= 1");
  if (!(entropy_coef >= 0.0)) throw std::invalid_argument("A2cConfig: entropy_coef >= 0");
  for (auto h : hidden) {
    if (h == 0) throw std::invalid_argument("A2cConfig: hidden sizes must be positive");
  }
  if (optimizer.clip_norm < 0.0) throw std::invalid_argument("A2cConfig: clip_norm >= 0");
}

namespace {

double state_value(const Mlp& value_net, std::span<const double> state) {
  return predict(value_net, state)[0];
}

std::vector<double> batch_advantages(std::span<const Transition> batch, const Mlp& value_net,
                                     const A2cConfig& config) {
  auto adv = critic_targets(batch, value_net, config.gamma, config.n_step_returns);
  for (std::size_t i = 0; i < batch.size(); ++i) adv[i] -= state_value(value_net, batch[i].state);
  return adv;
}

std::uint64_t sampling_seed(std::uint64_t seed) {
  // splitmix64 finaliser keeps the sampling stream apart from initialisation.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

double advantage(const Transition& transition, const Mlp& value_net, double gamma) {
  const double v = state_value(value_net, transition.state);
  const double next = transition.done ? 0.0 : state_value(value_net, transition.next_state);
  return transition.reward + gamma * next - v;
}

std::vector<double> critic_targets(std::span<const Transition> batch, const Mlp& value_net,
                                   double gamma, bool n_step) {
  std::vector<double> targets(batch.size());
  if (!n_step) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto& tr = batch[i];
      targets[i] = tr.reward + (tr.done ? 0.0 : gamma * state_value(value_net, tr.next_state));
    }
    return targets;
  }
  double ret = 0.0;
  if (!batch.empty() && !batch.back().done) ret = state_value(value_net, batch.back().next_state);
  for (std::size_t i = batch.size(); i-- > 0;) {
    if (batch[i].done) ret = 0.0;
    ret = batch[i].reward + gamma * ret;
    targets[i] = ret;
  }
  return targets;
}

double critic_update(std::span<const Transition> batch, Mlp& value_net, OptimizerState& state,
                     const A2cConfig& config) {
  if (batch.empty()) throw std::invalid_argument("critic_update: empty batch");
  const auto targets = critic_targets(batch, value_net, config.gamma, config.n_step_returns);

  const double n = static_cast<double>(batch.size());
  Gradients grads = Gradients::zeros_like(value_net);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto cache = forward(value_net, batch[i].state);
    const double residual = targets[i] - cache.output()[0];
    loss += residual * residual;
    const double g = -2.0 * residual / n;
    backward_accumulate(value_net, cache, std::span(&g, 1), grads);
  }
  loss /= n;
  if (!std::isfinite(loss)) throw NumericError("critic_update: non-finite loss");
  const auto res = apply_update(value_net, grads, state, config.optimizer, config.lr_critic,
                                UpdateDirection::descent);
  if (!res.applied) throw NumericError("critic_update: non-finite gradient");
  return loss;
}

ActorStats actor_update(std::span<const Transition> batch, Mlp& policy_net,
                        std::span<const double> advantages, OptimizerState& state,
                        const A2cConfig& config) {
  if (batch.size() != advantages.size()) {
    throw std::invalid_argument("actor_update: one advantage per transition required");
  }
  if (batch.empty()) throw std::invalid_argument("actor_update: empty batch");

  const double n = static_cast<double>(batch.size());
  Gradients grads = Gradients::zeros_like(policy_net);
  ActorStats stats;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto cache = forward(policy_net, batch[i].state);
    const auto& logits = cache.output();
    const auto p = softmax(logits);
    const auto logp = log_softmax(logits);
    double entropy = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) entropy -= p[j] * logp[j];

    const std::size_t a = action_index(batch[i].action);
    const double adv = advantages[i];
    stats.loss -= adv * logp[a];
    stats.entropy += entropy;

    // d/dz_j of A ln pi(a) + beta H.
    std::vector<double> g(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double dlogp = (j == a ? 1.0 : 0.0) - p[j];
      const double dentropy = -p[j] * (logp[j] + entropy);
      g[j] = (adv * dlogp + config.entropy_coef * dentropy) / n;
    }
    backward_accumulate(policy_net, cache, g, grads);
  }
  stats.loss /= n;
  stats.entropy /= n;
  const auto res = apply_update(policy_net, grads, state, config.optimizer, config.lr_actor,
                                UpdateDirection::ascent);
  if (!res.applied) throw NumericError("actor_update: non-finite gradient");
  return stats;
}

Action greedy_action(std::span<const double> logits) {
  if (logits.size() != kActionCount) throw std::invalid_argument("greedy_action: need 3 logits");
  constexpr std::size_t priority[] = {1, 2, 0};  // Neutral, Long, Short
  std::size_t best = priority[0];
  for (std::size_t idx : priority) {
    if (logits[idx] > logits[best]) best = idx;
  }
  return action_from_index(best);
}

namespace {

std::vector<std::size_t> topology(std::size_t in, const std::vector<std::size_t>& hidden,
                                  std::size_t out) {
  std::vector<std::size_t> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

}  // namespace

A2cAgent::A2cAgent(std::size_t state_dim, A2cConfig config) : config_(std::move(config)) {
  config_.validate();
  Rng rng(config_.seed);
  policy_ = Mlp::glorot(topology(state_dim, config_.hidden, kActionCount), config_.activation, rng);
  value_ = Mlp::glorot(topology(state_dim, config_.hidden, 1), config_.activation, rng);
}

A2cAgent::A2cAgent(Mlp policy, Mlp value, A2cConfig config)
    : config_(std::move(config)), policy_(std::move(policy)), value_(std::move(value)) {
  config_.validate();
  if (policy_.input_size() != value_.input_size()) {
    throw std::invalid_argument("A2cAgent: policy and value inputs differ");
  }
  if (policy_.output_size() != kActionCount || value_.output_size() != 1) {
    throw std::invalid_argument("A2cAgent: policy needs 3 outputs and value 1");
  }
}

A2cAgent A2cAgent::for_env(const EnvConfig& env, const A2cConfig& config) {
  const std::size_t l = env.use_sentiment ? env.sentiment_window : 0;
  if (!config.zero_init_sentiment_weights || l == 0) return A2cAgent(env.state_dim(), config);
  // Sentiment features lead the flattened state.
  A2cAgent base(env.state_dim() - l, config);
  return A2cAgent(insert_zero_inputs(base.policy_net(), 0, l),
                  insert_zero_inputs(base.value_net(), 0, l), config);
}

void A2cAgent::check_dim(std::size_t dim) const {
  if (dim != policy_.input_size()) {
    throw std::invalid_argument("state has " + std::to_string(dim) + " features, agent expects " +
                                std::to_string(policy_.input_size()));
  }
}

Action A2cAgent::act_greedy(const MarketState& state) const {
  const auto x = state.flatten();
  check_dim(x.size());
  return greedy_action(predict(policy_, x));
}

Action A2cAgent::act_sample(const MarketState& state, Rng& rng) const {
  const auto x = state.flatten();
  check_dim(x.size());
  return action_from_index(softmax_sample(predict(policy_, x), rng).index);
}

std::vector<EpisodeLog> train_agent(A2cAgent& agent, const AlignedSeries& segment,
                                    const EnvConfig& env_config, Rng& rng) {
  const A2cConfig& config = agent.config();
  TradingEnv env(segment, env_config);
  if (env_config.state_dim() != agent.policy_net().input_size()) {
    throw std::invalid_argument("train: environment state size does not match the agent");
  }

  std::vector<EpisodeLog> log;
  log.reserve(config.episodes);
  std::vector<Transition> batch;
  batch.reserve(config.n_steps);
  std::vector<double> rewards;

  for (std::size_t ep = 0; ep < config.episodes; ++ep) {
    EpisodeLog entry;
    entry.episode = ep + 1;
    rewards.clear();
    batch.clear();
    double entropy_sum = 0.0;
    double actor_sum = 0.0;
    double critic_sum = 0.0;

    std::vector<double> state = env.reset().flatten();
    while (!env.done()) {
      const auto sample = softmax_sample(predict(agent.policy_net(), state), rng);
      for (double p : sample.probs) {
        if (p > 0.0) entropy_sum -= p * std::log(p);
      }
      const Action action = action_from_index(sample.index);
      StepOutcome out = env.step(action);
      rewards.push_back(out.reward);

      Transition tr;
      tr.state = std::move(state);
      tr.action = action;
      tr.reward = out.reward;
      tr.next_state = out.next_state.flatten();
      tr.done = out.done;
      tr.log_prob = sample.log_prob;
      state = tr.next_state;
      batch.push_back(std::move(tr));

      if (batch.size() == config.n_steps || out.done) {
        const auto adv = batch_advantages(batch, agent.value_net(), config);
        const double critic_loss =
            critic_update(batch, agent.value_net(), agent.critic_state(), config);
        const auto actor =
            actor_update(batch, agent.policy_net(), adv, agent.actor_state(), config);
        if (entry.updates == 0) entry.first_critic_loss = critic_loss;
        critic_sum += critic_loss;
        actor_sum += actor.loss;
        ++entry.updates;
        batch.clear();
      }
    }

    entry.train_tr = episode_return(rewards) / env.initial_wealth();
    if (entry.updates > 0) {
      entry.actor_loss = actor_sum / static_cast<double>(entry.updates);
      entry.critic_loss = critic_sum / static_cast<double>(entry.updates);
    }
    if (!rewards.empty()) entry.policy_entropy = entropy_sum / static_cast<double>(rewards.size());
    log.push_back(entry);
  }
  return log;
}

TrainResult train(const AlignedSeries& segment, const EnvConfig& env_config,
                  const A2cConfig& config) {
  env_config.validate();
  TrainResult result{A2cAgent::for_env(env_config, config), {}};
  Rng rng(sampling_seed(config.seed));
  result.log = train_agent(result.agent, segment, env_config, rng);
  return result;
}

EpisodeRecord evaluate(const A2cAgent& agent, TradingEnv& env, EvalMode mode,
                       std::uint64_t seed) {
  if (mode == EvalMode::greedy) {
    return run_episode(env, [&](const MarketState& s) { return agent.act_greedy(s); });
  }
  auto rng = std::make_shared<Rng>(seed);
  return run_episode(env, [&, rng](const MarketState& s) { return agent.act_sample(s, *rng); });
}

void write_training_log(std::span<const EpisodeLog> log, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "episode,train_tr,actor_loss,critic_loss,policy_entropy\n";
  for (const auto& e : log) {
    out << e.episode << ',' << csv::format_double(e.train_tr) << ','
        << csv::format_double(e.actor_loss) << ',' << csv::format_double(e.critic_loss) << ','
        << csv::format_double(e.policy_entropy) << '\n';
  }
}

}  // namespace sentarl
