#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sentarl/series.hpp"

namespace sentarl {

/// Position held over the next interval.
enum class Action : int { Short = -1, Neutral = 0, Long = 1 };

inline constexpr std::size_t kActionCount = 3;

constexpr int position(Action a) noexcept { return static_cast<int>(a); }

/// Policy-network output index: 0 = Short, 1 = Neutral, 2 = Long.
constexpr std::size_t action_index(Action a) noexcept {
  return static_cast<std::size_t>(static_cast<int>(a) + 1);
}
Action action_from_index(std::size_t index);
Action action_from_position(int value);
std::string_view to_string(Action a);

enum class CostMode {
  proportional,    ///< c_t = tc_rate * p_t
  fixed_per_unit,  ///< c_t = tc_rate (currency per share and unit of position change)
};

std::string_view to_string(CostMode mode);
CostMode parse_cost_mode(std::string_view name);

/// Affine map applied to price differences before they enter the state.
struct DiffNormalization {
  double mean = 0.0;
  double scale = 1.0;
};

struct EnvConfig {
  std::size_t window = 20;           ///< w: price-diff and hour look-back
  std::size_t sentiment_window = 5;  ///< l: sentiment look-back
  double shares = 1.0;               ///< phi
  double tc_rate = 0.0;
  CostMode cost_mode = CostMode::proportional;
  bool use_sentiment = true;
  std::optional<DiffNormalization> diff_normalization;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;

  /// 2w + l + 1 with sentiment, 2w + 1 without.
  std::size_t state_dim() const noexcept;

  /// First 0-based row at which every window is full.
  std::size_t warmup() const noexcept;

  /// Smallest series length reset() accepts.
  std::size_t min_series_length() const noexcept;
};

/// Agent observation. flatten() concatenates sentiment, diffs, hours and the
/// previous position, in that order.
struct MarketState {
  std::vector<double> diffs;      ///< [z_t, ..., z_{t-w+1}]
  std::vector<double> hours;      ///< [tau_t, ..., tau_{t-w+1}]
  std::vector<double> sentiment;  ///< [e_t, ..., e_{t-l+1}], empty when disabled
  Action last_action = Action::Neutral;

  std::size_t dimension() const noexcept {
    return diffs.size() + hours.size() + sentiment.size() + 1;
  }
  std::vector<double> flatten() const;
};

struct StepInfo {
  double price = 0.0;  ///< p_t at the decision instant
  double diff = 0.0;   ///< z_{t+1}, the move the position is exposed to
  double cost = 0.0;
};

struct StepOutcome {
  double reward = 0.0;
  MarketState next_state;
  bool done = false;
  StepInfo info;
};

/// Single-asset trading MDP over one AlignedSeries.
///
/// At clock t the agent picks a_t and receives
///   phi * z_{t+1} * a_t - phi * c_t * |a_t - a_{t-1}|,
/// then the clock moves to t + 1. The episode ends when the clock reaches the
/// last row. The series must outlive the environment.
class TradingEnv {
 public:
  /// Throws std::invalid_argument for a bad config and DataError when the
  /// series is shorter than config.min_series_length().
  TradingEnv(const AlignedSeries& series, EnvConfig config);
  TradingEnv(AlignedSeries&&, EnvConfig) = delete;

  MarketState reset();

  /// Throws std::logic_error after the episode is done or before reset().
  StepOutcome step(Action action);

  MarketState observe() const;

  std::size_t start_index() const noexcept { return start_; }
  std::size_t clock() const noexcept { return clock_; }
  bool done() const noexcept { return done_; }
  std::size_t steps_per_episode() const noexcept { return series_->size() - 1 - start_; }

  /// psi = phi * p_{start}.
  double initial_wealth() const noexcept;
  double wealth() const noexcept { return wealth_; }
  Action last_action() const noexcept { return last_action_; }

  const EnvConfig& config() const noexcept { return config_; }
  const AlignedSeries& series() const noexcept { return *series_; }

 private:
  const AlignedSeries* series_;
  EnvConfig config_;
  std::size_t start_;
  std::size_t clock_ = 0;
  bool started_ = false;
  bool done_ = false;
  Action last_action_ = Action::Neutral;
  double wealth_ = 0.0;
};

/// Compensated sum of step rewards.
double episode_return(std::span<const double> rewards);

using Policy = std::function<Action(const MarketState&)>;

enum class BaselineKind { buy_and_hold, always_short, always_neutral, random };

/// Fixed-action policies plus a seeded uniform-random one.
Policy baseline_policy(BaselineKind kind, std::uint64_t seed = 0);

/// Trajectory of one episode.
struct EpisodeRecord {
  std::vector<std::size_t> clock;  ///< decision row of each step
  std::vector<Action> actions;
  std::vector<double> rewards;
  std::vector<double> costs;
  double initial_wealth = 0.0;
  double final_wealth = 0.0;
  std::size_t trade_count = 0;  ///< steps with a_t != a_{t-1}

  double total_return() const;
};

EpisodeRecord run_episode(TradingEnv& env, const Policy& policy);

/// Long at every step with transaction costs forced to zero.
EpisodeRecord run_buy_and_hold(const AlignedSeries& series, EnvConfig config);

/// `t,timestamp,action,reward,cost,cum_return`; cum_return is the running
/// sum of rewards over the initial wealth.
void write_equity_csv(const EpisodeRecord& record, const AlignedSeries& series,
                      const std::filesystem::path& path);

/// Mean and standard deviation of diffs over rows [begin, end), for the
/// optional state normalization. A zero deviation falls back to scale 1.
DiffNormalization fit_diff_normalization(const AlignedSeries& series, std::size_t begin,
                                         std::size_t end);

}  // namespace sentarl
