#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sentarl/neural.hpp"
#include "sentarl/random.hpp"
#include "sentarl/series.hpp"
#include "sentarl/trading_env.hpp"

namespace sentarl {

/// One environment step as seen by the learner.
struct Transition {
  std::vector<double> state;
  Action action = Action::Neutral;
  double reward = 0.0;
  std::vector<double> next_state;  ///< ignored when done
  bool done = false;
  double log_prob = 0.0;
};

struct A2cConfig {
  double gamma = 0.99;
  double lr_actor = 7e-4;
  double lr_critic = 7e-4;
  std::size_t n_steps = 5;
  std::size_t episodes = 100;
  double entropy_coef = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden = {64, 64};
  Activation activation = Activation::tanh;
  OptimizerConfig optimizer;
  /// Bootstrapped n-step returns instead of one-step TD targets.
  bool n_step_returns = false;
  /// Initialise the networks exactly as the sentiment-free agent would and
  /// give the sentiment inputs zero weights.
  bool zero_init_sentiment_weights = false;

  void validate() const;
};

/// R + gamma * V(s') * [not done] - V(s).
double advantage(const Transition& transition, const Mlp& value_net, double gamma);

/// Regression targets for the critic, using the current parameters. With
/// n_step = false these are R + gamma * V(s'); otherwise discounted returns
/// within the batch bootstrapped from the last next-state.
std::vector<double> critic_targets(std::span<const Transition> batch, const Mlp& value_net,
                                   double gamma, bool n_step);

/// Mean squared TD residual against targets frozen before the step, followed
/// by one descent step. Returns the pre-update loss. Throws
/// std::invalid_argument for an empty batch and NumericError for a
/// non-finite loss or gradient.
double critic_update(std::span<const Transition> batch, Mlp& value_net,
                     OptimizerState& state, const A2cConfig& config);

struct ActorStats {
  double loss = 0.0;     ///< -mean(A * ln pi(a|s))
  double entropy = 0.0;  ///< mean policy entropy over the batch
};

/// One ascent step on mean(A * ln pi(a|s)) + entropy_coef * mean(H).
/// Advantages are constants. Throws std::invalid_argument on a size
/// mismatch and NumericError for a non-finite gradient.
ActorStats actor_update(std::span<const Transition> batch, Mlp& policy_net,
                        std::span<const double> advantages, OptimizerState& state,
                        const A2cConfig& config);

/// Argmax with ties resolved Neutral, then Long, then Short.
Action greedy_action(std::span<const double> logits);

class A2cAgent {
 public:
  /// Networks [state_dim, hidden..., 3] and [state_dim, hidden..., 1]
  /// initialised from config.seed.
  A2cAgent(std::size_t state_dim, A2cConfig config);
  A2cAgent(Mlp policy, Mlp value, A2cConfig config);

  /// Builds the agent for an environment layout, honouring
  /// zero_init_sentiment_weights.
  static A2cAgent for_env(const EnvConfig& env, const A2cConfig& config);

  Action act_greedy(const MarketState& state) const;
  Action act_sample(const MarketState& state, Rng& rng) const;

  const Mlp& policy_net() const noexcept { return policy_; }
  const Mlp& value_net() const noexcept { return value_; }
  Mlp& policy_net() noexcept { return policy_; }
  Mlp& value_net() noexcept { return value_; }
  const A2cConfig& config() const noexcept { return config_; }

  OptimizerState& actor_state() noexcept { return actor_state_; }
  OptimizerState& critic_state() noexcept { return critic_state_; }

 private:
  void check_dim(std::size_t dim) const;

  A2cConfig config_;
  Mlp policy_;
  Mlp value_;
  OptimizerState actor_state_;
  OptimizerState critic_state_;
};

struct EpisodeLog {
  std::size_t episode = 0;
  double train_tr = 0.0;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double policy_entropy = 0.0;
  std::size_t updates = 0;
  /// Loss of the first critic update of the episode.
  double first_critic_loss = 0.0;
};

struct TrainResult {
  A2cAgent agent;
  std::vector<EpisodeLog> log;
};

/// Runs config.episodes passes over the segment. Actions are sampled from
/// the policy; every n_steps transitions (and at episode end) the critic and
/// then the actor are updated with advantages from the pre-update critic.
TrainResult train(const AlignedSeries& segment, const EnvConfig& env_config,
                  const A2cConfig& config);

/// Continues training an existing agent. The sampling generator is passed
/// in so callers can resume a stream.
std::vector<EpisodeLog> train_agent(A2cAgent& agent, const AlignedSeries& segment,
                                    const EnvConfig& env_config, Rng& rng);

enum class EvalMode { greedy, sample };

EpisodeRecord evaluate(const A2cAgent& agent, TradingEnv& env, EvalMode mode = EvalMode::greedy,
                       std::uint64_t seed = 0);

/// `episode,train_tr,actor_loss,critic_loss,policy_entropy`.
void write_training_log(std::span<const EpisodeLog> log, const std::filesystem::path& path);

}  // namespace sentarl
