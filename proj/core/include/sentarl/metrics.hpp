#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "sentarl/time_util.hpp"

namespace sentarl {

/// Sum of rewards over the initial wealth. Throws std::invalid_argument for
/// psi <= 0.
double total_return(std::span<const double> rewards, double initial_wealth);

/// (1 + tr)^(365 / days) - 1. Throws std::invalid_argument for tr <= -1 or
/// days == 0.
double annualized_return(double tr, std::size_t trading_days);

/// mean / sample standard deviation. nullopt for zero variance. Throws
/// std::invalid_argument for fewer than two values.
std::optional<double> sharpe(std::span<const double> total_returns);

double mean(std::span<const double> values);

/// Number of distinct UTC calendar dates.
std::size_t trading_days(std::span<const Timestamp> timestamps);

}  // namespace sentarl
