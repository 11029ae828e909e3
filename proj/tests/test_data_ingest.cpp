#include <random>

#include "doctest.h"
#include "sentarl/data_ingest.hpp"
#include "sentarl/error.hpp"
#include "support.hpp"

using namespace sentarl;
using namespace sentarl::testing;

TEST_CASE("load_prices reads a two-row file") {
  TempDir dir;
  write_text(dir / "p.csv", "timestamp,close\n2021-03-01T09:00:00Z,100.0\n2021-03-01T10:00:00Z,101.5\n");
  const auto recs = load_prices(dir / "p.csv");
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].close == 100.0);
  CHECK(recs[1].close == 101.5);
  CHECK(format_timestamp(recs[1].timestamp) == "2021-03-01T10:00:00Z");
}

TEST_CASE("load_prices truncates timestamps to the hour") {
  TempDir dir;
  write_text(dir / "p.csv", "timestamp,close\n2021-03-01 09:59,100\n");
  CHECK(format_timestamp(load_prices(dir / "p.csv")[0].timestamp) == "2021-03-01T09:00:00Z");
}

TEST_CASE("load_prices rejects bad rows with their line number") {
  TempDir dir;
  const auto expect_error = [&](const std::string& body, std::size_t line, const std::string& text) {
    write_text(dir / "p.csv", "timestamp,close\n" + body);
    try {
      load_prices(dir / "p.csv");
      FAIL("expected a ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
      CHECK(std::string(e.what()).find(text) != std::string::npos);
      CHECK(std::string(e.what()).find("line " + std::to_string(line)) != std::string::npos);
    }
  };
  expect_error("2021-03-01T09:00Z,100\n2021-03-01T10:00Z,-1.0\n", 3, "non-positive price");
  expect_error("2021-03-01T09:00Z,0\n", 2, "non-positive price");
  expect_error("2021-03-01T09:00Z,100\n2021-03-01T09:00Z,101\n", 3, "duplicate timestamp");
  expect_error("2021-03-01T10:00Z,100\n2021-03-01T09:00Z,101\n", 3, "non-monotonic");
  expect_error("2021-03-01T10:00Z,abc\n", 2, "malformed");
  expect_error("2021-03-01T10:00Z\n", 2, "malformed");
  expect_error("yesterday,100\n", 2, "malformed");
}

TEST_CASE("load_prices rejects a wrong header") {
  TempDir dir;
  write_text(dir / "p.csv", "time,price\n2021-03-01T10:00Z,1\n");
  CHECK_THROWS_AS(load_prices(dir / "p.csv"), ParseError);
}

TEST_CASE("load_prices handles a multi-year hourly file") {
  TempDir dir;
  std::vector<double> prices(5267);
  for (std::size_t i = 0; i < prices.size(); ++i) prices[i] = 50.0 + 0.001 * static_cast<double>(i);
  write_price_csv(dir / "p.csv", prices);
  CHECK(load_prices(dir / "p.csv").size() == 5267);
}

TEST_CASE("load_headlines keeps empty scores unset and checks the range") {
  TempDir dir;
  write_text(dir / "n.csv",
             "timestamp,headline,score\n"
             "2021-03-01T09:37:00Z,\"Profit, at last\",\n"
             "2021-03-01T10:05:00Z,,0.25\n");
  const auto recs = load_headlines(dir / "n.csv");
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].headline == "Profit, at last");
  CHECK_FALSE(recs[0].score.has_value());
  CHECK(recs[1].score == doctest::Approx(0.25));

  write_text(dir / "bad.csv", "timestamp,headline,score\n2021-03-01T09:37:00Z,x,1.5\n");
  CHECK_THROWS_AS(load_headlines(dir / "bad.csv"), ParseError);
}

TEST_CASE("compute_diffs follows the definition") {
  CHECK(compute_diffs(std::vector<double>{100, 100}) == std::vector<double>{0});
  CHECK(compute_diffs(std::vector<double>{100, 102, 101}) == std::vector<double>{2, -1});
  CHECK_THROWS_AS(compute_diffs(std::vector<double>{100}), std::invalid_argument);
}

TEST_CASE("diffs telescope to the end-to-end change") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = random_walk(50, seed);
    const auto z = compute_diffs(p);
    CHECK(z.size() == 49);
    double sum = 0.0;
    for (double v : z) sum += v;
    CHECK(sum == doctest::Approx(p.back() - p.front()).epsilon(1e-12));
  }
}

namespace {

std::vector<PriceRecord> hourly(std::size_t n, int first_hour = 0) {
  std::vector<PriceRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({epoch() + std::chrono::hours(first_hour + static_cast<long>(i)),
                   100.0 + static_cast<double>(i)});
  }
  return out;
}

}  // namespace

TEST_CASE("align marks news slots and computes coverage") {
  const auto prices = hourly(3);
  const std::vector<HourlySentiment> grouped = {{prices[1].timestamp, 0.4}};
  const AlignedSeries s = align("X", prices, grouped);
  CHECK(s.has_news == std::vector<bool>{false, true, false});
  CHECK(s.sentiment == std::vector<double>{0.0, 0.4, 0.0});
  CHECK(coverage(s) == doctest::Approx(1.0 / 3.0));
  CHECK(s.diffs == std::vector<double>{0.0, 1.0, 1.0});
}

TEST_CASE("align computes hour fractions and truncates news timestamps") {
  const auto prices = hourly(3, 9);
  CHECK(align("X", prices, {}).hours[0] == 0.375);

  const std::vector<HourlySentiment> grouped = {
      {prices[0].timestamp + std::chrono::minutes(37), -0.3}};
  const AlignedSeries s = align("X", prices, grouped);
  CHECK(s.has_news[0]);
  CHECK(s.sentiment[0] == -0.3);
}

TEST_CASE("align drops off-grid news and rejects bad input") {
  const auto prices = hourly(3);
  const std::vector<HourlySentiment> off = {{prices[2].timestamp + std::chrono::hours(5), 0.9}};
  CHECK(coverage(align("X", prices, off)) == 0.0);
  CHECK_THROWS_AS(align("X", std::vector<PriceRecord>{}, {}), DataError);
  const std::vector<HourlySentiment> twice = {{prices[0].timestamp, 0.1},
                                              {prices[0].timestamp, 0.2}};
  CHECK_THROWS_AS(align("X", prices, twice), DataError);
}

TEST_CASE("coverage extremes and the reference 25% regime") {
  const auto prices = hourly(100);
  CHECK(coverage(align("X", prices, {})) == 0.0);
  std::vector<HourlySentiment> all, quarter;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    all.push_back({prices[i].timestamp, 0.1});
    if (i % 4 == 0) quarter.push_back({prices[i].timestamp, 0.1});
  }
  CHECK(coverage(align("X", prices, all)) == 1.0);
  CHECK(coverage(align("X", prices, quarter)) == 0.25);
}

TEST_CASE("coverage never decreases when news is added") {
  std::mt19937_64 gen(3);
  const auto prices = hourly(60);
  std::vector<HourlySentiment> grouped;
  double last = 0.0;
  std::vector<bool> used(prices.size(), false);
  for (int k = 0; k < 80; ++k) {
    const std::size_t i = gen() % prices.size();
    if (!used[i]) {
      used[i] = true;
      grouped.push_back({prices[i].timestamp, 0.5});
      std::sort(grouped.begin(), grouped.end(),
                [](const auto& a, const auto& b) { return a.hour < b.hour; });
    }
    const double c = coverage(align("X", prices, grouped));
    CHECK(c >= last);
    last = c;
  }
}

TEST_CASE("hour fractions stay in [0, 1) and depend only on the hour of day") {
  const AlignedSeries s = align("X", hourly(72), {});
  for (std::size_t t = 0; t < s.size(); ++t) {
    CHECK(s.hours[t] >= 0.0);
    CHECK(s.hours[t] < 1.0);
    if (t >= 24) CHECK(s.hours[t] == s.hours[t - 24]);
  }
}

TEST_CASE("aligned cache round-trips prices bit-exactly") {
  TempDir dir;
  const auto p = random_walk(200, 11, 1234.5678, 3.3);
  std::vector<PriceRecord> recs;
  for (std::size_t i = 0; i < p.size(); ++i) recs.push_back({epoch() + std::chrono::hours(i), p[i]});
  std::vector<HourlySentiment> grouped;
  for (std::size_t i = 0; i < p.size(); i += 3) grouped.push_back({recs[i].timestamp, -0.123456789});
  const AlignedSeries s = align("RT", recs, grouped, FillPolicy::forward_fill);
  write_aligned_csv(s, dir / "c.csv");
  const AlignedSeries back = read_aligned_csv(dir / "c.csv", "RT");
  CHECK(back.prices == s.prices);
  CHECK(back.diffs == s.diffs);
  CHECK(back.hours == s.hours);
  CHECK(back.sentiment == s.sentiment);
  CHECK(back.has_news == s.has_news);
  CHECK(back.timestamps == s.timestamps);
}

TEST_CASE("aligned cache rejects tampered rows") {
  TempDir dir;
  write_text(dir / "c.csv",
             "timestamp,close,diff,tau,sentiment,has_news\n"
             "2021-01-04T00:00:00Z,100,,0,0,0\n"
             "2021-01-04T01:00:00Z,101,5,0.041666666666666664,0,0\n");
  try {
    read_aligned_csv(dir / "c.csv", "X");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}
