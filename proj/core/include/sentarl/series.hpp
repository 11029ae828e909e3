#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sentarl/time_util.hpp"

namespace sentarl {

/// One hourly close bid price.
struct PriceRecord {
  Timestamp timestamp;
  double close = 0.0;
};

/// One news headline. `score` is set when the file carries a precomputed
/// sentiment label; otherwise the headline is scored by a SentimentScorer.
struct HeadlineRecord {
  Timestamp timestamp;
  std::string headline;
  std::optional<double> score;
};

/// Grouped sentiment e_t for one hour slot.
struct HourlySentiment {
  Timestamp hour;
  double value = 0.0;
};

/// Hourly-gridded channels for one asset. All vectors have length size().
///
/// diffs[t] = prices[t] - prices[t-1] for t >= 1. diffs[0] has no
/// predecessor inside the series; it is 0 for a freshly aligned series and
/// keeps the original difference for a slice(). States never read it.
/// hours[t] is the hour of day divided by 24, in [0, 1).
struct AlignedSeries {
  std::string asset;
  std::vector<Timestamp> timestamps;
  std::vector<double> prices;
  std::vector<double> diffs;
  std::vector<double> hours;
  std::vector<double> sentiment;
  std::vector<bool> has_news;

  std::size_t size() const noexcept { return prices.size(); }
  bool empty() const noexcept { return prices.empty(); }

  /// Copy of rows [begin, end). Throws std::out_of_range.
  AlignedSeries slice(std::size_t begin, std::size_t end) const;

  /// Same series with every sentiment value replaced by `value` and has_news
  /// cleared. Used for ablations.
  AlignedSeries with_constant_sentiment(double value) const;
};

}  // namespace sentarl
