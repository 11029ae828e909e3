#include <cmath>
#include <random>

#include "doctest.h"
#include "sentarl/error.hpp"
#include "sentarl/sentiment.hpp"
#include "support.hpp"

using namespace sentarl;
using namespace sentarl::testing;

TEST_CASE("lexicon_score averages matched weights") {
  const Lexicon lex = {{"profit", 0.5}, {"soars", 0.7}, {"loss", -0.5}};
  CHECK(lexicon_score("", lex) == 0.0);
  CHECK(lexicon_score("profit soars", lex) == doctest::Approx(0.6));
  CHECK(lexicon_score("profit loss", lex) == 0.0);
  CHECK(lexicon_score("Profit SOARS!", lex) == doctest::Approx(0.6));
  CHECK(lexicon_score("nothing relevant here", lex) == 0.0);
}

TEST_CASE("lexicon_score stays in [-1, 1]") {
  const Lexicon lex = {{"crash", -1.0}, {"boom", 1.0}};
  CHECK(lexicon_score("crash crash crash", lex) == -1.0);
  CHECK(lexicon_score("boom", lex) == 1.0);
}

TEST_CASE("bundled-style lexicon file loads and scores") {
  TempDir dir;
  write_text(dir / "lex.csv", "word,weight\nGain,0.6\nplunge,-0.8\n");
  const LexiconScorer scorer(load_lexicon(dir / "lex.csv"));
  CHECK(scorer.score("Stocks plunge") == doctest::Approx(-0.8));
  CHECK(scorer.score("gain") == doctest::Approx(0.6));

  write_text(dir / "bad.csv", "word,weight\nup,1.2\n");
  CHECK_THROWS_AS(load_lexicon(dir / "bad.csv"), ParseError);
  CHECK_THROWS_AS(LexiconScorer(Lexicon{}), std::invalid_argument);
}

TEST_CASE("group_hourly applies the selected aggregate") {
  const std::vector<double> scores = {0.2, -0.5, 0.4};
  CHECK(group_hourly(scores, GroupingMethod::min) == -0.5);
  CHECK(group_hourly(scores, GroupingMethod::mean) == doctest::Approx(0.1 / 3.0));
  CHECK(group_hourly(scores, GroupingMethod::max) == 0.4);
  for (auto m : {GroupingMethod::min, GroupingMethod::mean, GroupingMethod::max}) {
    CHECK(group_hourly(std::vector<double>{-0.7}, m) == -0.7);
  }
  CHECK_THROWS_AS(group_hourly(std::vector<double>{}, GroupingMethod::min), std::invalid_argument);
}

TEST_CASE("min <= mean <= max for random score sets") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    std::vector<double> s(1 + gen() % 12);
    for (auto& v : s) v = u(gen);
    const double lo = group_hourly(s, GroupingMethod::min);
    const double mid = group_hourly(s, GroupingMethod::mean);
    const double hi = group_hourly(s, GroupingMethod::max);
    CHECK(lo <= mid);
    CHECK(mid <= hi);
  }
}

TEST_CASE("fill_gaps policies") {
  using O = std::optional<double>;
  const std::vector<O> a = {0.5, std::nullopt, std::nullopt};
  CHECK(fill_gaps(a, FillPolicy::neutral_zero) == std::vector<double>{0.5, 0.0, 0.0});
  CHECK(fill_gaps(a, FillPolicy::forward_fill) == std::vector<double>{0.5, 0.5, 0.5});
  const std::vector<O> b = {std::nullopt, -0.2};
  CHECK(fill_gaps(b, FillPolicy::forward_fill) == std::vector<double>{0.0, -0.2});
}

TEST_CASE("fill_gaps never alters hours that had news") {
  std::mt19937_64 gen(2);
  for (int k = 0; k < 100; ++k) {
    std::vector<std::optional<double>> slots(30);
    for (auto& s : slots) {
      if (gen() % 3 == 0) s = std::uniform_real_distribution<double>(-1, 1)(gen);
    }
    for (auto p : {FillPolicy::neutral_zero, FillPolicy::forward_fill}) {
      const auto filled = fill_gaps(slots, p);
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]) CHECK(filled[i] == *slots[i]);
      }
    }
  }
}

TEST_CASE("group_headlines prefers precomputed scores and buckets by hour") {
  const LexiconScorer scorer(Lexicon{{"up", 0.8}, {"down", -0.6}});
  const Timestamp h = epoch() + std::chrono::hours(9);
  const std::vector<HeadlineRecord> news = {
      {h + std::chrono::minutes(5), "up", std::nullopt},
      {h + std::chrono::minutes(40), "up", -0.9},
      {h + std::chrono::hours(1) + std::chrono::minutes(1), "down", std::nullopt},
  };
  const auto grouped = group_headlines(news, &scorer, GroupingMethod::min);
  REQUIRE(grouped.size() == 2);
  CHECK(grouped[0].hour == h);
  CHECK(grouped[0].value == -0.9);
  CHECK(grouped[1].value == doctest::Approx(-0.6));

  const auto mean = group_headlines(news, &scorer, GroupingMethod::mean);
  CHECK(mean[0].value == doctest::Approx((0.8 - 0.9) / 2.0));

  CHECK_THROWS_AS(group_headlines(news, nullptr, GroupingMethod::min), DataError);
  const std::vector<HeadlineRecord> scored = {{h, "", 0.3}};
  CHECK(group_headlines(scored, nullptr, GroupingMethod::min)[0].value == 0.3);
}

TEST_CASE("sentiment_window returns newest first") {
  const AlignedSeries s = make_series({1, 2, 3, 4, 5}, {.1, .2, .3, .4, .5});
  // Row indices are 0-based: the fifth hour is row 4.
  CHECK(sentiment_window(s, 4, 3) == std::vector<double>{.5, .4, .3});
  CHECK(sentiment_window(s, 2, 1) == std::vector<double>{.3});
  CHECK(sentiment_window(s, 4, 5) == std::vector<double>{.5, .4, .3, .2, .1});
  CHECK_THROWS_AS(sentiment_window(s, 3, 5), DataError);
  CHECK_THROWS_AS(sentiment_window(s, 5, 1), DataError);
}

namespace {

// Textbook two-pass population Pearson, kept independent of the library.
std::optional<double> oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST_CASE("pearson matches a two-pass oracle") {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n(0, 1);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> x(20 + gen() % 50), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = n(gen);
      y[i] = 0.3 * x[i] + n(gen);
    }
    CHECK(*pearson(x, y) == doctest::Approx(*oracle_pearson(x, y)).epsilon(1e-12));
  }
  CHECK_FALSE(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}).has_value());
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
}

TEST_CASE("correlation_pulse shift semantics match a hand-shifted oracle") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> e(80), z(80);
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = n(gen);
    z[i] = n(gen);
  }
  const CorrelationPulse pulse = correlation_pulse(e, z, -10, 3);
  CHECK(pulse.shifts.size() == 14);
  CHECK(pulse.shifts.front() == -10);
  CHECK(pulse.shifts.back() == 3);
  for (int k = -10; k <= 3; ++k) {
    std::vector<double> xs, ys;
    for (int t = 0; t < 80; ++t) {
      if (t + k >= 0 && t + k < 80) {
        xs.push_back(e[static_cast<std::size_t>(t)]);
        ys.push_back(z[static_cast<std::size_t>(t + k)]);
      }
    }
    CHECK(*pulse.at(k) == doctest::Approx(*oracle_pearson(xs, ys)).epsilon(1e-12));
  }
}

TEST_CASE("correlation_pulse special cases") {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> x(50);
  for (auto& v : x) v = n(gen);
  CHECK(*correlation_pulse(x, x, 0, 0).at(0) == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> flat(50, 0.2);
  const auto pulse = correlation_pulse(flat, x, -10, 3);
  for (const auto& c : pulse.correlations) CHECK_FALSE(c.has_value());
  CHECK_FALSE(pulse.peak_shift().has_value());

  CHECK_THROWS_AS(correlation_pulse(x, x, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(correlation_pulse(std::vector<double>(4, 1.0), std::vector<double>(4, 1.0), -2, 0),
                  std::invalid_argument);
}

TEST_CASE("correlation_pulse is invariant under positive affine maps") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> e(120), z(120);
  for (std::size_t i = 0; i < e.size(); ++i) {
    z[i] = n(gen);
    e[i] = i >= 3 ? 0.5 * z[i - 3] + n(gen) : n(gen);
  }
  const auto base = correlation_pulse(e, z, -10, 3);
  std::vector<double> e2 = e, z2 = z;
  for (auto& v : e2) v = 3.5 * v - 2.0;
  for (auto& v : z2) v = 0.01 * v + 7.0;
  const auto moved = correlation_pulse(e2, z2, -10, 3);
  for (std::size_t i = 0; i < base.shifts.size(); ++i) {
    CHECK(*moved.correlations[i] == doctest::Approx(*base.correlations[i]).epsilon(1e-9));
  }
  CHECK(base.peak_shift() == -3);
}

TEST_CASE("series pulse skips the undefined first diff") {
  const auto p = random_walk(200, 8);
  std::vector<double> sent(p.size());
  for (std::size_t t = 1; t < p.size(); ++t) sent[t] = (p[t] - p[t - 1]);
  const AlignedSeries s = make_series(p, sent);
  const auto pulse = correlation_pulse(s);
  CHECK(pulse.shifts.size() == 14);
  CHECK(*pulse.at(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pulse.peak_shift() == 0);
}

TEST_CASE("pulse csv has one row per shift and blanks undefined cells") {
  TempDir dir;
  CorrelationPulse p;
  p.shifts = {-1, 0};
  p.correlations = {std::nullopt, 0.5};
  write_pulse_csv(p, dir / "p.csv");
  CHECK(read_text(dir / "p.csv") == "shift,correlation\n-1,\n0,0.5\n");
}

TEST_CASE("names parse and print") {
  CHECK(parse_grouping("mean") == GroupingMethod::mean);
  CHECK(to_string(GroupingMethod::min) == "min");
  CHECK(parse_fill_policy("forward-fill") == FillPolicy::forward_fill);
  CHECK(to_string(FillPolicy::neutral_zero) == "neutral-zero");
  CHECK_THROWS_AS(parse_grouping("median"), std::invalid_argument);
}
