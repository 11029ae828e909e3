#include "sentarl/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "sentarl/csv.hpp"
#include "sentarl/error.hpp"
#include "sentarl/metrics.hpp"

namespace sentarl {

namespace fs = std::filesystem;

namespace {

std::optional<double> sharpe_or_none(const std::vector<double>& trs) {
  if (trs.size() < 2) return std::nullopt;
  return sharpe(trs);
}

std::string cell(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string();
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

Report build_report(std::span<const TrialResult> results, std::span<const SeriesMeta> meta) {
  if (results.empty()) throw std::invalid_argument("build_report: no results");

  Report report;
  std::vector<std::string> assets;
  std::set<double> tcs;
  std::set<Strategy> learners;
  for (const auto& r : results) {
    if (std::find(assets.begin(), assets.end(), r.key.asset) == assets.end()) {
      assets.push_back(r.key.asset);
    }
    if (is_learning(r.key.strategy)) {
      tcs.insert(r.key.tc);
      learners.insert(r.key.strategy);
    }
  }
  report.tc_rates.assign(tcs.begin(), tcs.end());
  report.learners.assign(learners.begin(), learners.end());

  // Buy-and-hold pays no costs and ignores the seed: one value per (asset, window).
  std::map<std::pair<std::string, std::size_t>, const TrialResult*> bh;
  for (const auto& r : results) {
    if (r.key.strategy == Strategy::buy_and_hold) bh.try_emplace({r.key.asset, r.key.window}, &r);
  }

  const auto summarize = [](const std::vector<const TrialResult*>& rows) {
    OverallRow row;
    std::vector<double> trs, ars;
    for (const auto* r : rows) {
      trs.push_back(r->tr);
      ars.push_back(r->ar);
    }
    row.mean_tr = mean(trs);
    row.mean_ar = mean(ars);
    row.sr = sharpe_or_none(trs);
    row.trials = rows.size();
    return row;
  };

  if (!bh.empty()) {
    std::vector<const TrialResult*> rows;
    for (const auto& [k, r] : bh) rows.push_back(r);
    OverallRow row = summarize(rows);
    row.strategy = Strategy::buy_and_hold;
    report.overall.push_back(row);
  }
  for (double tc : report.tc_rates) {
    for (auto s : report.learners) {
      std::vector<const TrialResult*> rows;
      for (const auto& r : results) {
        if (r.key.strategy == s && r.key.tc == tc) rows.push_back(&r);
      }
      if (rows.empty()) continue;
      OverallRow row = summarize(rows);
      row.tc = tc;
      row.strategy = s;
      report.overall.push_back(row);
    }
  }

  const auto trs_for = [&](const std::string& asset, double tc, Strategy s) {
    std::vector<double> trs;
    for (const auto& r : results) {
      if (r.key.asset == asset && r.key.tc == tc && r.key.strategy == s) trs.push_back(r.tr);
    }
    return trs;
  };

  for (const auto& asset : assets) {
    AssetSrRow row;
    row.asset = asset;
    std::vector<double> bh_trs;
    for (const auto& [k, r] : bh) {
      if (k.first == asset) bh_trs.push_back(r->tr);
    }
    row.bh = sharpe_or_none(bh_trs);
    for (double tc : report.tc_rates) {
      std::vector<std::optional<double>> srs;
      std::optional<Strategy> best;
      std::optional<double> best_sr;
      for (auto s : report.learners) {
        const auto sr = sharpe_or_none(trs_for(asset, tc, s));
        srs.push_back(sr);
        if (sr && (!best_sr || *sr > *best_sr)) {
          best_sr = sr;
          best = s;
        }
      }
      row.sr.push_back(std::move(srs));
      row.best.push_back(best);
    }
    report.by_asset.push_back(std::move(row));
  }

  const bool ablation = learners.count(Strategy::sentarl) && learners.count(Strategy::no_sentiment);
  for (double tc : report.tc_rates) {
    std::vector<ScatterRow> rows;
    if (ablation) {
      for (const auto& asset : assets) {
        const auto with = trs_for(asset, tc, Strategy::sentarl);
        const auto without = trs_for(asset, tc, Strategy::no_sentiment);
        if (with.empty() || without.empty()) continue;
        ScatterRow row;
        row.asset = asset;
        const auto it = std::find_if(meta.begin(), meta.end(),
                                     [&](const SeriesMeta& m) { return m.asset == asset; });
        if (it != meta.end()) {
          row.coverage = it->coverage;
          row.correlation = it->correlation;
        }
        row.tr_diff = mean(with) - mean(without);
        rows.push_back(std::move(row));
      }
    }
    report.scatter.push_back(std::move(rows));
  }
  return report;
}

void write_report(const Report& report, const fs::path& dir) {
  {
    auto out = open_out(dir / "summary_overall.csv");
    out << "tc,strategy,mean_tr,mean_ar,sr,trials\n";
    for (const auto& row : report.overall) {
      csv::write_row(out, {row.tc ? csv::format_double(*row.tc) : "-",
                           std::string(to_string(row.strategy)), csv::format_double(row.mean_tr),
                           csv::format_double(row.mean_ar), cell(row.sr),
                           std::to_string(row.trials)});
    }
  }
  {
    auto out = open_out(dir / "summary_by_asset.csv");
    std::vector<std::string> header{"asset", "buy-and-hold"};
    for (double tc : report.tc_rates) {
      for (auto s : report.learners) {
        header.push_back(std::string(to_string(s)) + "@tc" + csv::format_double(tc));
      }
      header.push_back("best@tc" + csv::format_double(tc));
    }
    csv::write_row(out, header);
    for (const auto& row : report.by_asset) {
      std::vector<std::string> fields{row.asset, cell(row.bh)};
      for (std::size_t i = 0; i < row.sr.size(); ++i) {
        for (const auto& sr : row.sr[i]) fields.push_back(cell(sr));
        fields.push_back(row.best[i] ? std::string(to_string(*row.best[i])) : std::string());
      }
      csv::write_row(out, fields);
    }
  }
  for (std::size_t i = 0; i < report.tc_rates.size(); ++i) {
    if (report.scatter[i].empty()) continue;
    auto out = open_out(dir / ("scatter_tc" + csv::format_double(report.tc_rates[i]) + ".csv"));
    out << "asset,coverage,corr_shift0,tr_diff\n";
    for (const auto& row : report.scatter[i]) {
      csv::write_row(out, {row.asset, csv::format_double(row.coverage), cell(row.correlation),
                           csv::format_double(row.tr_diff)});
    }
  }
}

void write_series_meta(std::span<const SeriesMeta> meta, const fs::path& path) {
  auto out = open_out(path);
  out << "asset,coverage,corr_shift0\n";
  for (const auto& m : meta) {
    csv::write_row(out, {m.asset, csv::format_double(m.coverage), cell(m.correlation)});
  }
}

std::vector<SeriesMeta> read_series_meta(const fs::path& path) {
  csv::Reader reader(path);
  reader.expect_header({"asset", "coverage", "corr_shift0"});
  std::vector<SeriesMeta> out;
  while (auto row = reader.next()) {
    if (row->size() != 3) throw ParseError(reader.source(), reader.line(), "malformed row");
    try {
      SeriesMeta m;
      m.asset = (*row)[0];
      m.coverage = csv::parse_double((*row)[1]);
      if (!(*row)[2].empty()) m.correlation = csv::parse_double((*row)[2]);
      out.push_back(std::move(m));
    } catch (const std::invalid_argument& e) {
      throw ParseError(reader.source(), reader.line(), std::string("malformed row: ") + e.what());
    }
  }
  return out;
}

}  // namespace sentarl
