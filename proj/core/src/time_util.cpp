#include "sentarl/time_util.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

namespace sentarl {

namespace {

int digits(std::string_view s, std::size_t pos, std::size_t count) {
  if (pos + count > s.size()) throw std::invalid_argument("timestamp too short");
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') throw std::invalid_argument("bad digit in timestamp");
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect(std::string_view s, std::size_t pos, char c) {
  if (pos >= s.size() || s[pos] != c) throw std::invalid_argument("bad timestamp separator");
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  try {
    const int y = digits(text, 0, 4);
    expect(text, 4, '-');
    const int mo = digits(text, 5, 2);
    expect(text, 7, '-');
    const int d = digits(text, 8, 2);
    if (text.size() < 11 || (text[10] != 'T' && text[10] != ' ')) {
      throw std::invalid_argument("missing time part");
    }
    const int hh = digits(text, 11, 2);
    expect(text, 13, ':');
    const int mm = digits(text, 14, 2);
    std::size_t pos = 16;
    int ss = 0;
    if (pos < text.size() && text[pos] == ':') {
      ss = digits(text, pos + 1, 2);
      pos += 3;
    }
    if (pos < text.size() && text[pos] == 'Z') ++pos;
    if (pos != text.size()) throw std::invalid_argument("trailing characters");

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59) {
      throw std::invalid_argument("field out of range");
    }
    return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("invalid timestamp '" + std::string(text) + "': " + e.what());
  }
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{ts - day_point};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Timestamp floor_to_hour(Timestamp ts) { return std::chrono::floor<std::chrono::hours>(ts); }

int hour_of_day(Timestamp ts) {
  using namespace std::chrono;
  return static_cast<int>(duration_cast<hours>(ts - floor<days>(ts)).count());
}

std::chrono::sys_days calendar_date(Timestamp ts) { return std::chrono::floor<std::chrono::days>(ts); }

}  // namespace sentarl
