#include "sentarl/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "sentarl/csv.hpp"
#include "sentarl/error.hpp"

namespace sentarl {

std::string_view to_string(GroupingMethod method) {
  switch (method) {
    case GroupingMethod::min: return "min";
    case GroupingMethod::mean: return "mean";
    case GroupingMethod::max: return "max";
  }
  return "?";
}

std::string_view to_string(FillPolicy policy) {
  switch (policy) {
    case FillPolicy::neutral_zero: return "neutral-zero";
    case FillPolicy::forward_fill: return "forward-fill";
  }
  return "?";
}

GroupingMethod parse_grouping(std::string_view name) {
  if (name == "min") return GroupingMethod::min;
  if (name == "mean") return GroupingMethod::mean;
  if (name == "max") return GroupingMethod::max;
  throw std::invalid_argument("unknown grouping method '" + std::string(name) + "'");
}

FillPolicy parse_fill_policy(std::string_view name) {
  if (name == "neutral-zero") return FillPolicy::neutral_zero;
  if (name == "forward-fill") return FillPolicy::forward_fill;
  throw std::invalid_argument("unknown fill policy '" + std::string(name) + "'");
}

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '\''; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

double lexicon_score(std::string_view headline, const Lexicon& lexicon) {
  double sum = 0.0;
  std::size_t hits = 0;
  std::size_t i = 0;
  while (i < headline.size()) {
    while (i < headline.size() && !is_word_char(static_cast<unsigned char>(headline[i]))) ++i;
    const std::size_t start = i;
    while (i < headline.size() && is_word_char(static_cast<unsigned char>(headline[i]))) ++i;
    if (i == start) continue;
    const auto it = lexicon.find(lower(headline.substr(start, i - start)));
    if (it != lexicon.end()) {
      sum += it->second;
      ++hits;
    }
  }
  if (hits == 0) return 0.0;
  return std::clamp(sum / static_cast<double>(hits), -1.0, 1.0);
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  csv::Reader reader(path);
  reader.expect_header({"word", "weight"});
  Lexicon lexicon;
  while (auto row = reader.next()) {
    if (row->size() != 2) throw ParseError(reader.source(), reader.line(), "malformed row");
    double weight = 0.0;
    try {
      weight = csv::parse_double((*row)[1]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(reader.source(), reader.line(), std::string("malformed row: ") + e.what());
    }
    if (!(weight >= -1.0 && weight <= 1.0)) {
      throw ParseError(reader.source(), reader.line(), "weight outside [-1, 1]");
    }
    std::string word = lower((*row)[0]);
    if (word.empty()) throw ParseError(reader.source(), reader.line(), "empty word");
    lexicon[std::move(word)] = weight;
  }
  return lexicon;
}

LexiconScorer::LexiconScorer(Lexicon lexicon) : lexicon_(std::move(lexicon)) {
  if (lexicon_.empty()) throw std::invalid_argument("LexiconScorer: empty lexicon");
}

double LexiconScorer::score(std::string_view headline) const {
  return lexicon_score(headline, lexicon_);
}

double group_hourly(std::span<const double> scores, GroupingMethod method) {
  if (scores.empty()) throw std::invalid_argument("group_hourly: no scores in hour");
  switch (method) {
    case GroupingMethod::min: return *std::min_element(scores.begin(), scores.end());
    case GroupingMethod::max: return *std::max_element(scores.begin(), scores.end());
    case GroupingMethod::mean: {
      double sum = 0.0;
      for (double s : scores) sum += s;
      // Rounding can push a mean of boundary values a hair outside the range.
      const double m = sum / static_cast<double>(scores.size());
      const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
      return std::clamp(m, *lo, *hi);
    }
  }
  throw std::invalid_argument("group_hourly: bad method");
}

std::vector<double> fill_gaps(std::span<const std::optional<double>> grouped, FillPolicy policy) {
  std::vector<double> out(grouped.size(), 0.0);
  double last = 0.0;
  for (std::size_t i = 0; i < grouped.size(); ++i) {
    if (grouped[i]) {
      out[i] = *grouped[i];
      last = *grouped[i];
    } else {
      out[i] = policy == FillPolicy::forward_fill ? last : 0.0;
    }
  }
  return out;
}

std::vector<HourlySentiment> group_headlines(std::span<const HeadlineRecord> headlines,
                                             const SentimentScorer* scorer,
                                             GroupingMethod method) {
  std::map<Timestamp, std::vector<double>> buckets;
  for (const auto& h : headlines) {
    double s = 0.0;
    if (h.score) {
      s = *h.score;
    } else if (scorer != nullptr) {
      s = std::clamp(scorer->score(h.headline), -1.0, 1.0);
    } else {
      throw DataError("headline at " + format_timestamp(h.timestamp) +
                      " has no score and no scorer is configured");
    }
    buckets[floor_to_hour(h.timestamp)].push_back(s);
  }
  std::vector<HourlySentiment> out;
  out.reserve(buckets.size());
  for (const auto& [hour, scores] : buckets) out.push_back({hour, group_hourly(scores, method)});
  return out;
}

std::vector<double> sentiment_window(const AlignedSeries& series, std::size_t t, std::size_t l) {
  if (t >= series.size()) throw DataError("sentiment_window: index past end of series");
  if (l > t + 1) throw DataError("sentiment_window: insufficient history");
  std::vector<double> out(l);
  for (std::size_t k = 0; k < l; ++k) out[k] = series.sentiment[t - k];
  return out;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 points");

  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (constant(x) || constant(y)) return std::nullopt;

  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  // Population normalisation; the 1/n factors cancel in the ratio.
  const double denom = std::sqrt(sxx / n) * std::sqrt(syy / n);
  if (!(denom > 0.0)) return std::nullopt;
  return std::clamp((sxy / n) / denom, -1.0, 1.0);
}

std::optional<double> CorrelationPulse::at(int shift) const {
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (shifts[i] == shift) return correlations[i];
  }
  return std::nullopt;
}

std::optional<int> CorrelationPulse::peak_shift() const {
  std::optional<int> best;
  double best_value = 0.0;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (correlations[i] && (!best || *correlations[i] > best_value)) {
      best = shifts[i];
      best_value = *correlations[i];
    }
  }
  return best;
}

CorrelationPulse correlation_pulse(std::span<const double> sentiment,
                                   std::span<const double> diffs, int min_shift,
                                   int max_shift) {
  if (sentiment.size() != diffs.size()) {
    throw std::invalid_argument("correlation_pulse: series lengths differ");
  }
  if (min_shift > max_shift) throw std::invalid_argument("correlation_pulse: empty shift range");

  const auto n = static_cast<long long>(sentiment.size());
  CorrelationPulse pulse;
  for (int k = min_shift; k <= max_shift; ++k) {
    // Pairs (e_t, z_{t+k}) for every t with both indices inside the series.
    const long long first = std::max(0LL, -static_cast<long long>(k));
    const long long last = std::min(n, n - k);
    const long long overlap = last - first;
    if (overlap < 3) {
      throw std::invalid_argument("correlation_pulse: overlap shorter than 3 at shift " +
                                  std::to_string(k));
    }
    const auto e = sentiment.subspan(static_cast<std::size_t>(first),
                                     static_cast<std::size_t>(overlap));
    const auto z = diffs.subspan(static_cast<std::size_t>(first + k),
                                 static_cast<std::size_t>(overlap));
    pulse.shifts.push_back(k);
    pulse.correlations.push_back(pearson(e, z));
  }
  return pulse;
}

CorrelationPulse correlation_pulse(const AlignedSeries& series, int min_shift, int max_shift) {
  if (series.size() < 2) throw DataError("correlation_pulse: series too short");
  return correlation_pulse(std::span(series.sentiment).subspan(1),
                           std::span(series.diffs).subspan(1), min_shift, max_shift);
}

void write_pulse_csv(const CorrelationPulse& pulse, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "shift,correlation\n";
  for (std::size_t i = 0; i < pulse.shifts.size(); ++i) {
    out << pulse.shifts[i] << ','
        << (pulse.correlations[i] ? csv::format_double(*pulse.correlations[i]) : std::string())
        << '\n';
  }
}

}  // namespace sentarl
