#include "sentarl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "sentarl/trading_env.hpp"

namespace sentarl {

double total_return(std::span<const double> rewards, double initial_wealth) {
  if (!(initial_wealth > 0.0)) throw std::invalid_argument("total_return: psi must be positive");
  return episode_return(rewards) / initial_wealth;
}

double annualized_return(double tr, std::size_t trading_days) {
  if (!(tr > -1.0)) throw std::invalid_argument("annualized_return: TR must exceed -100%");
  if (trading_days == 0) throw std::invalid_argument("annualized_return: trading days must be > 0");
  return std::pow(1.0 + tr, 365.0 / static_cast<double>(trading_days)) - 1.0;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean: empty input");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::optional<double> sharpe(std::span<const double> total_returns) {
  if (total_returns.size() < 2) throw std::invalid_argument("sharpe: need at least 2 values");
  if (std::all_of(total_returns.begin(), total_returns.end(),
                  [&](double v) { return v == total_returns.front(); })) {
    return std::nullopt;
  }
  const double m = mean(total_returns);
  double ss = 0.0;
  for (double v : total_returns) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(total_returns.size() - 1));
  if (!(sd > 0.0)) return std::nullopt;
  return m / sd;
}

std::size_t trading_days(std::span<const Timestamp> timestamps) {
  std::set<std::chrono::sys_days> dates;
  for (auto ts : timestamps) dates.insert(calendar_date(ts));
  return dates.size();
}

}  // namespace sentarl
