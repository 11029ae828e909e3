#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "sentarl/series.hpp"
#include "sentarl/time_util.hpp"

namespace sentarl::testing {

inline Timestamp epoch() { return parse_timestamp("2021-01-04T00:00:00Z"); }

/// Hourly series starting at epoch(). Sentiment defaults to zeros; has_news
/// marks non-zero sentiment. Row 0 diff is 0, like a freshly aligned series.
inline AlignedSeries make_series(const std::vector<double>& prices,
                                 std::vector<double> sentiment = {},
                                 std::string asset = "SYN") {
  AlignedSeries s;
  s.asset = std::move(asset);
  if (sentiment.empty()) sentiment.assign(prices.size(), 0.0);
  for (std::size_t i = 0; i < prices.size(); ++i) {
    const Timestamp ts = epoch() + std::chrono::hours(static_cast<long>(i));
    s.timestamps.push_back(ts);
    s.prices.push_back(prices[i]);
    s.diffs.push_back(i == 0 ? 0.0 : prices[i] - prices[i - 1]);
    s.hours.push_back(hour_of_day(ts) / 24.0);
    s.sentiment.push_back(sentiment[i]);
    s.has_news.push_back(sentiment[i] != 0.0);
  }
  return s;
}

inline std::vector<double> sinusoid(std::size_t n, std::size_t phase = 0) {
  std::vector<double> p(n);
  for (std::size_t t = 0; t < n; ++t) {
    p[t] = 100.0 + 10.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t + phase) / 24.0);
  }
  return p;
}

/// Positive random walk with steps uniform in [-step, step].
inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed, double start = 100.0,
                                       double step = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-step, step);
  std::vector<double> p(n);
  double x = start;
  for (std::size_t t = 0; t < n; ++t) {
    p[t] = x;
    x = std::max(1.0, x + u(gen));
  }
  return p;
}

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("sentarl_test_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Writes a `timestamp,close` file for the given prices, hourly from epoch().
inline void write_price_csv(const std::filesystem::path& path, const std::vector<double>& prices) {
  std::ostringstream os;
  os.precision(17);
  os << "timestamp,close\n";
  for (std::size_t i = 0; i < prices.size(); ++i) {
    os << format_timestamp(epoch() + std::chrono::hours(static_cast<long>(i))) << ','
       << prices[i] << '\n';
  }
  write_text(path, os.str());
}

}  // namespace sentarl::testing
