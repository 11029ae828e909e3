#include "sentarl/data_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "sentarl/csv.hpp"
#include "sentarl/error.hpp"

namespace sentarl {

AlignedSeries AlignedSeries::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw std::out_of_range("AlignedSeries::slice: bad range");
  const auto b = static_cast<std::ptrdiff_t>(begin);
  const auto e = static_cast<std::ptrdiff_t>(end);
  AlignedSeries out;
  out.asset = asset;
  out.timestamps.assign(timestamps.begin() + b, timestamps.begin() + e);
  out.prices.assign(prices.begin() + b, prices.begin() + e);
  out.diffs.assign(diffs.begin() + b, diffs.begin() + e);
  out.hours.assign(hours.begin() + b, hours.begin() + e);
  out.sentiment.assign(sentiment.begin() + b, sentiment.begin() + e);
  out.has_news.assign(has_news.begin() + b, has_news.begin() + e);
  return out;
}

AlignedSeries AlignedSeries::with_constant_sentiment(double value) const {
  AlignedSeries out = *this;
  std::fill(out.sentiment.begin(), out.sentiment.end(), value);
  std::fill(out.has_news.begin(), out.has_news.end(), false);
  return out;
}

std::vector<PriceRecord> load_prices(const std::filesystem::path& path) {
  csv::Reader reader(path);
  reader.expect_header({"timestamp", "close"});

  std::vector<PriceRecord> records;
  while (auto row = reader.next()) {
    if (row->size() != 2) throw ParseError(reader.source(), reader.line(), "malformed row");
    PriceRecord rec;
    try {
      rec.timestamp = floor_to_hour(parse_timestamp((*row)[0]));
      rec.close = csv::parse_double((*row)[1]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(reader.source(), reader.line(),
                       std::string("malformed row: ") + e.what());
    }
    if (!(rec.close > 0.0) || !std::isfinite(rec.close)) {
      throw ParseError(reader.source(), reader.line(), "non-positive price");
    }
    if (!records.empty()) {
      if (rec.timestamp == records.back().timestamp) {
        throw ParseError(reader.source(), reader.line(), "duplicate timestamp");
      }
      if (rec.timestamp < records.back().timestamp) {
        throw ParseError(reader.source(), reader.line(), "non-monotonic timestamp");
      }
    }
    records.push_back(rec);
  }
  return records;
}

std::vector<HeadlineRecord> load_headlines(const std::filesystem::path& path) {
  csv::Reader reader(path);
  reader.expect_header({"timestamp", "headline", "score"});

  std::vector<HeadlineRecord> records;
  while (auto row = reader.next()) {
    if (row->size() != 3) throw ParseError(reader.source(), reader.line(), "malformed row");
    HeadlineRecord rec;
    try {
      rec.timestamp = parse_timestamp((*row)[0]);
      rec.headline = std::move((*row)[1]);
      const auto& cell = (*row)[2];
      if (cell.find_first_not_of(" \t") != std::string::npos) rec.score = csv::parse_double(cell);
    } catch (const std::invalid_argument& e) {
      throw ParseError(reader.source(), reader.line(),
                       std::string("malformed row: ") + e.what());
    }
    if (rec.score && !(*rec.score >= -1.0 && *rec.score <= 1.0)) {
      throw ParseError(reader.source(), reader.line(), "score outside [-1, 1]");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<double> compute_diffs(std::span<const double> prices) {
  if (prices.size() < 2) throw std::invalid_argument("compute_diffs: need at least 2 prices");
  std::vector<double> out(prices.size() - 1);
  for (std::size_t i = 1; i < prices.size(); ++i) out[i - 1] = prices[i] - prices[i - 1];
  return out;
}

AlignedSeries align(std::string asset, std::span<const PriceRecord> prices,
                    std::span<const HourlySentiment> grouped, FillPolicy fill) {
  if (prices.empty()) throw DataError("align: empty price series");

  AlignedSeries s;
  s.asset = std::move(asset);
  const std::size_t n = prices.size();
  s.timestamps.reserve(n);
  s.prices.reserve(n);
  s.hours.reserve(n);
  for (const auto& p : prices) {
    s.timestamps.push_back(p.timestamp);
    s.prices.push_back(p.close);
    s.hours.push_back(hour_of_day(p.timestamp) / 24.0);
  }
  if (!std::is_sorted(s.timestamps.begin(), s.timestamps.end()) ||
      std::adjacent_find(s.timestamps.begin(), s.timestamps.end()) != s.timestamps.end()) {
    throw DataError("align: price timestamps must be strictly increasing");
  }

  s.diffs.assign(n, 0.0);
  for (std::size_t t = 1; t < n; ++t) s.diffs[t] = s.prices[t] - s.prices[t - 1];

  std::vector<std::optional<double>> slots(n);
  for (const auto& g : grouped) {
    const Timestamp hour = floor_to_hour(g.hour);
    const auto it = std::lower_bound(s.timestamps.begin(), s.timestamps.end(), hour);
    if (it == s.timestamps.end() || *it != hour) continue;
    auto& slot = slots[static_cast<std::size_t>(it - s.timestamps.begin())];
    if (slot) throw DataError("align: two grouped values for hour " + format_timestamp(hour));
    slot = g.value;
  }

  s.sentiment = fill_gaps(slots, fill);
  s.has_news.resize(n);
  for (std::size_t t = 0; t < n; ++t) s.has_news[t] = slots[t].has_value();
  return s;
}

double coverage(const AlignedSeries& series) {
  if (series.empty()) return 0.0;
  const auto hits = std::count(series.has_news.begin(), series.has_news.end(), true);
  return static_cast<double>(hits) / static_cast<double>(series.size());
}

void write_aligned_csv(const AlignedSeries& series, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "timestamp,close,diff,tau,sentiment,has_news\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    out << format_timestamp(series.timestamps[t]) << ',' << csv::format_double(series.prices[t])
        << ',' << (t == 0 ? std::string() : csv::format_double(series.diffs[t])) << ','
        << csv::format_double(series.hours[t]) << ','
        << csv::format_double(series.sentiment[t]) << ',' << (series.has_news[t] ? 1 : 0)
        << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

AlignedSeries read_aligned_csv(const std::filesystem::path& path, std::string asset) {
  csv::Reader reader(path);
  reader.expect_header({"timestamp", "close", "diff", "tau", "sentiment", "has_news"});

  AlignedSeries s;
  s.asset = std::move(asset);
  while (auto row = reader.next()) {
    const auto fail = [&](const std::string& msg) {
      throw ParseError(reader.source(), reader.line(), msg);
    };
    if (row->size() != 6) fail("malformed row");
    try {
      const Timestamp ts = parse_timestamp((*row)[0]);
      const double close = csv::parse_double((*row)[1]);
      const double tau = csv::parse_double((*row)[3]);
      const double e = csv::parse_double((*row)[4]);
      const long long flag = csv::parse_int((*row)[5]);

      if (!(close > 0.0) || !std::isfinite(close)) fail("non-positive price");
      if (!s.timestamps.empty() && ts <= s.timestamps.back()) fail("non-monotonic timestamp");
      if (tau != hour_of_day(ts) / 24.0) fail("tau does not match timestamp");
      if (!(e >= -1.0 && e <= 1.0)) fail("sentiment outside [-1, 1]");
      if (flag != 0 && flag != 1) fail("has_news must be 0 or 1");

      double diff = 0.0;
      if (!s.prices.empty()) {
        diff = close - s.prices.back();
        if (csv::parse_double((*row)[2]) != diff) fail("diff does not match prices");
      }
      s.timestamps.push_back(ts);
      s.prices.push_back(close);
      s.diffs.push_back(diff);
      s.hours.push_back(tau);
      s.sentiment.push_back(e);
      s.has_news.push_back(flag == 1);
    } catch (const std::invalid_argument& e) {
      fail(std::string("malformed row: ") + e.what());
    }
  }
  if (s.empty()) throw ParseError(reader.source(), 0, "aligned cache has no rows");
  return s;
}

}  // namespace sentarl
