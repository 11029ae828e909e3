#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentarl/series.hpp"

namespace sentarl {

enum class GroupingMethod { min, mean, max };
enum class FillPolicy { neutral_zero, forward_fill };

std::string_view to_string(GroupingMethod method);
std::string_view to_string(FillPolicy policy);
/// Throw std::invalid_argument for unknown names.
GroupingMethod parse_grouping(std::string_view name);
FillPolicy parse_fill_policy(std::string_view name);

/// Maps a headline to a sentiment score in [-1, 1]. Implementations must be
/// deterministic and safe to call concurrently.
class SentimentScorer {
 public:
  virtual ~SentimentScorer() = default;
  virtual double score(std::string_view headline) const = 0;
};

using Lexicon = std::unordered_map<std::string, double>;

/// Mean weight of the lexicon words found in the headline, clamped to
/// [-1, 1]; 0 when nothing matches. Words are lower-cased runs of letters,
/// digits and apostrophes.
double lexicon_score(std::string_view headline, const Lexicon& lexicon);

/// Reads a `word,weight` CSV. Words are lower-cased; weights must be in [-1, 1].
Lexicon load_lexicon(const std::filesystem::path& path);

/// Polarity word-list scorer. A baseline stand-in for a trained extractor.
class LexiconScorer final : public SentimentScorer {
 public:
  /// Throws std::invalid_argument for an empty lexicon.
  explicit LexiconScorer(Lexicon lexicon);

  double score(std::string_view headline) const override;
  const Lexicon& lexicon() const noexcept { return lexicon_; }

 private:
  Lexicon lexicon_;
};

/// Aggregates the scores of one hour. Throws std::invalid_argument when empty.
double group_hourly(std::span<const double> scores, GroupingMethod method);

/// Fills hours without news. forward_fill uses 0 before the first observation.
std::vector<double> fill_gaps(std::span<const std::optional<double>> grouped, FillPolicy policy);

/// Scores every headline (a precomputed score wins over the scorer), buckets
/// them by hour and groups each bucket. Result is sorted by hour. Throws
/// DataError when a headline needs scoring and `scorer` is null.
std::vector<HourlySentiment> group_headlines(std::span<const HeadlineRecord> headlines,
                                             const SentimentScorer* scorer,
                                             GroupingMethod method);

/// [e_t, e_{t-1}, ..., e_{t-l+1}], newest first. `t` is a 0-based row index.
/// Throws DataError when fewer than l rows end at t.
std::vector<double> sentiment_window(const AlignedSeries& series, std::size_t t, std::size_t l);

/// Population Pearson correlation. nullopt when either side has zero variance.
/// Throws std::invalid_argument on length mismatch or fewer than 2 points.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Lagged correlation profile. correlations[i] pairs e_t with z_{t+k} for
/// k = shifts[i]; nullopt marks a constant overlap.
struct CorrelationPulse {
  std::vector<int> shifts;
  std::vector<std::optional<double>> correlations;

  std::optional<double> at(int shift) const;
  /// Shift with the largest defined correlation (first one on ties).
  std::optional<int> peak_shift() const;
};

inline constexpr int kDefaultMinShift = -10;
inline constexpr int kDefaultMaxShift = 3;

/// Throws std::invalid_argument on length mismatch, an empty range, or when
/// some shift leaves fewer than 3 overlapping points.
CorrelationPulse correlation_pulse(std::span<const double> sentiment,
                                   std::span<const double> diffs, int min_shift,
                                   int max_shift);

/// Pulse of an aligned series, skipping row 0 whose diff is undefined.
CorrelationPulse correlation_pulse(const AlignedSeries& series,
                                   int min_shift = kDefaultMinShift,
                                   int max_shift = kDefaultMaxShift);

/// `shift,correlation` with an empty cell for undefined values.
void write_pulse_csv(const CorrelationPulse& pulse, const std::filesystem::path& path);

}  // namespace sentarl
