#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sentarl/sentiment.hpp"
#include "sentarl/series.hpp"

namespace sentarl {

/// Reads a `timestamp,close` CSV. Timestamps are truncated to the hour.
/// Throws ParseError (with line number) for malformed rows, non-positive
/// prices, duplicate or non-increasing timestamps.
std::vector<PriceRecord> load_prices(const std::filesystem::path& path);

/// Reads a `timestamp,headline,score` CSV; an empty score cell means the
/// headline still has to be scored. Scores must lie in [-1, 1].
std::vector<HeadlineRecord> load_headlines(const std::filesystem::path& path);

/// z_t = p_t - p_{t-1}. Output has one element fewer than the input.
/// Throws std::invalid_argument for fewer than two prices.
std::vector<double> compute_diffs(std::span<const double> prices);

/// Puts grouped sentiment onto the price grid. Grouped timestamps are
/// truncated to the hour; hours absent from the price grid are dropped.
/// Throws DataError for an empty price series or two grouped values landing
/// in the same hour.
AlignedSeries align(std::string asset, std::span<const PriceRecord> prices,
                    std::span<const HourlySentiment> grouped,
                    FillPolicy fill = FillPolicy::neutral_zero);

/// Fraction of hours that carry at least one headline.
double coverage(const AlignedSeries& series);

/// Columnar cache with header `timestamp,close,diff,tau,sentiment,has_news`.
/// The first row's diff cell is empty.
void write_aligned_csv(const AlignedSeries& series, const std::filesystem::path& path);
AlignedSeries read_aligned_csv(const std::filesystem::path& path, std::string asset);

}  // namespace sentarl
