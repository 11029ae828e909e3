#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentarl/a2c.hpp"
#include "sentarl/series.hpp"
#include "sentarl/trading_env.hpp"

namespace sentarl {

/// Half-open row range.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct Window {
  IndexRange train;
  IndexRange test;
};

struct WindowSpec {
  std::size_t train_len = 3377;
  std::size_t test_len = 374;
  std::size_t stride = 374;
  std::size_t count = 5;
};

struct RollingWindows {
  WindowSpec spec;
  std::vector<Window> windows;
};

/// Rolling train/test splits anchored so the last test range ends at the
/// end of the series. Throws DataError when the series is too short.
RollingWindows make_windows(std::size_t series_length, const WindowSpec& spec = {});

enum class Strategy { sentarl, no_sentiment, buy_and_hold };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);
bool is_learning(Strategy s) noexcept;

struct TrialKey {
  std::string asset;
  std::size_t window = 0;
  std::uint64_t seed = 0;
  double tc = 0.0;
  Strategy strategy = Strategy::sentarl;

  friend auto operator<=>(const TrialKey&, const TrialKey&) = default;
};

struct TrialResult {
  TrialKey key;
  double tr = 0.0;
  double ar = 0.0;
  std::size_t trade_count = 0;
  /// Per-step rewards on the test range. Empty for rows loaded from disk.
  std::vector<double> rewards;
};

struct TrialFailure {
  TrialKey key;
  std::string message;
};

/// Everything that determines a trial matrix.
struct MatrixSpec {
  std::vector<std::shared_ptr<const AlignedSeries>> assets;
  WindowSpec windows;
  std::vector<std::uint64_t> seeds;
  std::vector<double> tc_rates;
  std::vector<Strategy> strategies;
  EnvConfig env;  ///< tc_rate and use_sentiment are overridden per trial
  A2cConfig a2c;  ///< seed is overridden per trial
  /// Days used for annualisation; 0 counts distinct dates of the test range.
  std::size_t trading_days = 0;
  /// Fit the optional diff normalisation on each training range.
  bool normalize_diffs = false;
};

struct MatrixOptions {
  std::size_t workers = 1;
  /// Results, journal, logs, models and equity curves go here when set.
  std::optional<std::filesystem::path> output_dir;
  /// Skip trials already recorded in output_dir.
  bool resume = false;
  /// Stop taking new trials once this many result rows have been produced
  /// in this invocation. Used to emulate an interrupted run.
  std::optional<std::size_t> stop_after;
  /// Per-trial training logs, checkpoints and equity curves.
  bool write_artifacts = true;
  std::function<void(const std::string&)> log;
};

struct MatrixOutcome {
  std::vector<TrialResult> results;  ///< canonical order
  std::vector<TrialFailure> failures;
  std::size_t resumed = 0;
  bool interrupted = false;
};

/// One result row per (asset, window, seed, tc, strategy). Buy-and-hold is
/// simulated once per (asset, window) and replicated across seeds and costs.
/// Trials that throw are recorded in failures; the matrix continues.
MatrixOutcome run_matrix(const MatrixSpec& spec, const MatrixOptions& options = {});

/// Trains on the window's train range and evaluates greedily on its test
/// range. `artifacts` receives the training log, checkpoint and equity curve.
TrialResult run_learning_trial(const AlignedSeries& series, const Window& window,
                               const TrialKey& key, const MatrixSpec& spec,
                               const std::optional<std::filesystem::path>& artifacts = {});

TrialResult run_buy_and_hold_trial(const AlignedSeries& series, const Window& window,
                                   const TrialKey& key, const MatrixSpec& spec);

/// Test-range row slice with enough leading history to fill every window.
AlignedSeries test_segment(const AlignedSeries& series, const Window& window,
                           const EnvConfig& env);

/// `asset,window,seed,tc,strategy,tr,ar,trade_count`.
void write_results_csv(std::span<const TrialResult> results, const std::filesystem::path& path);
std::vector<TrialResult> read_results_csv(const std::filesystem::path& path);
void append_result_row(std::ostream& out, const TrialResult& result);

inline constexpr std::string_view kResultsHeader =
    "asset,window,seed,tc,strategy,tr,ar,trade_count";

}  // namespace sentarl
