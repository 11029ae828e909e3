#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentarl/experiment.hpp"

namespace sentarl {

/// Per-asset facts needed for the coverage/correlation scatter.
struct SeriesMeta {
  std::string asset;
  double coverage = 0.0;
  std::optional<double> correlation;  ///< pulse value at the chosen shift
};

struct OverallRow {
  std::optional<double> tc;  ///< nullopt for buy-and-hold, which pays no costs
  Strategy strategy = Strategy::sentarl;
  double mean_tr = 0.0;
  double mean_ar = 0.0;
  std::optional<double> sr;
  std::size_t trials = 0;
};

struct AssetSrRow {
  std::string asset;
  std::optional<double> bh;
  /// sr[i][j]: tc_rates[i], learners[j].
  std::vector<std::vector<std::optional<double>>> sr;
  /// Best learner per tc, nullopt when none is defined.
  std::vector<std::optional<Strategy>> best;
};

struct ScatterRow {
  std::string asset;
  double coverage = 0.0;
  std::optional<double> correlation;
  double tr_diff = 0.0;  ///< mean sentarl TR - mean no-sentiment TR
};

struct Report {
  std::vector<double> tc_rates;
  std::vector<Strategy> learners;
  std::vector<OverallRow> overall;
  std::vector<AssetSrRow> by_asset;
  /// scatter[i] belongs to tc_rates[i]; empty unless both learners ran.
  std::vector<std::vector<ScatterRow>> scatter;
};

/// Buy-and-hold rows are de-duplicated per (asset, window) before
/// aggregation. Throws std::invalid_argument for empty results.
Report build_report(std::span<const TrialResult> results, std::span<const SeriesMeta> meta);

/// Writes summary_overall.csv, summary_by_asset.csv and scatter_tc<tc>.csv.
void write_report(const Report& report, const std::filesystem::path& dir);

/// `asset,coverage,corr_shift0` sidecar so `report` can run from a results
/// directory alone.
void write_series_meta(std::span<const SeriesMeta> meta, const std::filesystem::path& path);
std::vector<SeriesMeta> read_series_meta(const std::filesystem::path& path);

}  // namespace sentarl
