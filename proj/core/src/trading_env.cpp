#include "sentarl/trading_env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

#include "sentarl/csv.hpp"
#include "sentarl/error.hpp"
#include "sentarl/random.hpp"

namespace sentarl {

Action action_from_index(std::size_t index) {
  if (index >= kActionCount) throw std::out_of_range("action index out of range");
  return static_cast<Action>(static_cast<int>(index) - 1);
}

Action action_from_position(int value) {
  if (value < -1 || value > 1) throw std::out_of_range("position must be -1, 0 or 1");
  return static_cast<Action>(value);
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Short: return "short";
    case Action::Neutral: return "neutral";
    case Action::Long: return "long";
  }
  return "?";
}

std::string_view to_string(CostMode mode) {
  return mode == CostMode::proportional ? "proportional" : "fixed-per-unit";
}

CostMode parse_cost_mode(std::string_view name) {
  if (name == "proportional") return CostMode::proportional;
  if (name == "fixed-per-unit") return CostMode::fixed_per_unit;
  throw std::invalid_argument("unknown cost mode '" + std::string(name) + "'");
}

void EnvConfig::validate() const {
  if (window < 1) throw std::invalid_argument("EnvConfig: window must be >= 1");
  if (!(shares > 0.0) || !std::isfinite(shares)) {
    throw std::invalid_argument("EnvConfig: shares must be positive");
  }
  if (!(tc_rate >= 0.0) || !std::isfinite(tc_rate)) {
    throw std::invalid_argument("EnvConfig: tc_rate must be non-negative");
  }
  if (diff_normalization &&
      (!(diff_normalization->scale > 0.0) || !std::isfinite(diff_normalization->mean))) {
    throw std::invalid_argument("EnvConfig: diff normalization scale must be positive");
  }
}

std::size_t EnvConfig::state_dim() const noexcept {
  return 2 * window + (use_sentiment ? sentiment_window : 0) + 1;
}

std::size_t EnvConfig::warmup() const noexcept {
  const std::size_t l = use_sentiment ? sentiment_window : 0;
  // Diff windows start at row 1 (row 0 has no predecessor).
  return std::max(window, l == 0 ? 0 : l - 1);
}

std::size_t EnvConfig::min_series_length() const noexcept {
  const std::size_t l = use_sentiment ? sentiment_window : 0;
  return std::max(window + 1, l) + 2;
}

std::vector<double> MarketState::flatten() const {
  std::vector<double> out;
  out.reserve(dimension());
  out.insert(out.end(), sentiment.begin(), sentiment.end());
  out.insert(out.end(), diffs.begin(), diffs.end());
  out.insert(out.end(), hours.begin(), hours.end());
  out.push_back(static_cast<double>(position(last_action)));
  return out;
}

TradingEnv::TradingEnv(const AlignedSeries& series, EnvConfig config)
    : series_(&series), config_(std::move(config)) {
  config_.validate();
  if (series.size() < config_.min_series_length()) {
    throw DataError("series of length " + std::to_string(series.size()) +
                    " is too short for the configured windows (need " +
                    std::to_string(config_.min_series_length()) + ")");
  }
  start_ = config_.warmup();
  wealth_ = initial_wealth();
}

double TradingEnv::initial_wealth() const noexcept {
  return config_.shares * series_->prices[start_];
}

MarketState TradingEnv::reset() {
  clock_ = start_;
  started_ = true;
  done_ = false;
  last_action_ = Action::Neutral;
  wealth_ = initial_wealth();
  return observe();
}

MarketState TradingEnv::observe() const {
  const auto& s = *series_;
  const std::size_t t = clock_;
  MarketState state;
  state.diffs.resize(config_.window);
  state.hours.resize(config_.window);
  for (std::size_t k = 0; k < config_.window; ++k) {
    double z = s.diffs[t - k];
    if (config_.diff_normalization) {
      z = (z - config_.diff_normalization->mean) / config_.diff_normalization->scale;
    }
    state.diffs[k] = z;
    state.hours[k] = s.hours[t - k];
  }
  if (config_.use_sentiment) {
    state.sentiment.resize(config_.sentiment_window);
    for (std::size_t k = 0; k < config_.sentiment_window; ++k) {
      state.sentiment[k] = s.sentiment[t - k];
    }
  }
  state.last_action = last_action_;
  return state;
}

StepOutcome TradingEnv::step(Action action) {
  if (!started_) throw std::logic_error("TradingEnv::step before reset");
  if (done_) throw std::logic_error("TradingEnv::step after terminal state");

  const auto& s = *series_;
  const std::size_t t = clock_;
  const double price = s.prices[t];
  const double next_diff = s.prices[t + 1] - price;
  const double unit_cost =
      config_.cost_mode == CostMode::proportional ? config_.tc_rate * price : config_.tc_rate;
  const double cost =
      config_.shares * unit_cost * std::abs(position(action) - position(last_action_));
  const double reward = config_.shares * next_diff * position(action) - cost;

  wealth_ += reward;
  last_action_ = action;
  clock_ = t + 1;
  done_ = clock_ == s.size() - 1;

  StepOutcome out;
  out.reward = reward;
  out.next_state = observe();
  out.done = done_;
  out.info = {price, next_diff, cost};
  return out;
}

double episode_return(std::span<const double> rewards) {
  // Neumaier summation.
  double sum = 0.0;
  double carry = 0.0;
  for (double r : rewards) {
    const double t = sum + r;
    if (std::abs(sum) >= std::abs(r)) {
      carry += (sum - t) + r;
    } else {
      carry += (r - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

Policy baseline_policy(BaselineKind kind, std::uint64_t seed) {
  switch (kind) {
    case BaselineKind::buy_and_hold: return [](const MarketState&) { return Action::Long; };
    case BaselineKind::always_short: return [](const MarketState&) { return Action::Short; };
    case BaselineKind::always_neutral: return [](const MarketState&) { return Action::Neutral; };
    case BaselineKind::random: {
      auto rng = std::make_shared<Rng>(seed);
      return [rng](const MarketState&) { return action_from_index(rng->below(kActionCount)); };
    }
  }
  throw std::invalid_argument("unknown baseline");
}

double EpisodeRecord::total_return() const {
  if (!(initial_wealth > 0.0)) throw std::invalid_argument("initial wealth must be positive");
  return episode_return(rewards) / initial_wealth;
}

EpisodeRecord run_episode(TradingEnv& env, const Policy& policy) {
  EpisodeRecord rec;
  MarketState state = env.reset();
  rec.initial_wealth = env.initial_wealth();
  const std::size_t steps = env.steps_per_episode();
  rec.clock.reserve(steps);
  rec.actions.reserve(steps);
  rec.rewards.reserve(steps);
  rec.costs.reserve(steps);

  Action previous = env.last_action();
  while (!env.done()) {
    const std::size_t t = env.clock();
    const Action a = policy(state);
    StepOutcome out = env.step(a);
    rec.clock.push_back(t);
    rec.actions.push_back(a);
    rec.rewards.push_back(out.reward);
    rec.costs.push_back(out.info.cost);
    if (a != previous) ++rec.trade_count;
    previous = a;
    state = std::move(out.next_state);
  }
  rec.final_wealth = env.wealth();
  return rec;
}

EpisodeRecord run_buy_and_hold(const AlignedSeries& series, EnvConfig config) {
  config.tc_rate = 0.0;
  TradingEnv env(series, std::move(config));
  return run_episode(env, baseline_policy(BaselineKind::buy_and_hold));
}

void write_equity_csv(const EpisodeRecord& record, const AlignedSeries& series,
                      const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "t,timestamp,action,reward,cost,cum_return\n";
  double cum = 0.0;
  for (std::size_t i = 0; i < record.rewards.size(); ++i) {
    cum += record.rewards[i];
    const std::size_t t = record.clock[i];
    out << t << ',' << format_timestamp(series.timestamps[t]) << ','
        << position(record.actions[i]) << ',' << csv::format_double(record.rewards[i]) << ','
        << csv::format_double(record.costs[i]) << ','
        << csv::format_double(cum / record.initial_wealth) << '\n';
  }
}

DiffNormalization fit_diff_normalization(const AlignedSeries& series, std::size_t begin,
                                         std::size_t end) {
  begin = std::max<std::size_t>(begin, 1);
  end = std::min(end, series.size());
  if (end <= begin) return {};
  const double n = static_cast<double>(end - begin);
  double m = 0.0;
  for (std::size_t t = begin; t < end; ++t) m += series.diffs[t];
  m /= n;
  double var = 0.0;
  for (std::size_t t = begin; t < end; ++t) var += (series.diffs[t] - m) * (series.diffs[t] - m);
  const double sd = std::sqrt(var / n);
  return {m, sd > 0.0 ? sd : 1.0};
}

}  // namespace sentarl
