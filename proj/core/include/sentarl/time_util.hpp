#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace sentarl {

using Timestamp = std::chrono::sys_seconds;

/// Parses `YYYY-MM-DD[T| ]HH:MM[:SS][Z]` as UTC. Throws std::invalid_argument.
Timestamp parse_timestamp(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(Timestamp ts);

Timestamp floor_to_hour(Timestamp ts);
int hour_of_day(Timestamp ts);
std::chrono::sys_days calendar_date(Timestamp ts);

}  // namespace sentarl
