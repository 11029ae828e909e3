#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "run_config.hpp"

namespace sentarl::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,          ///< bad flags or an unexpected internal error
  kExitConfig = 2,         ///< invalid config file or missing input path
  kExitData = 3,           ///< ingestion/parse error or missing cache
  kExitTrialFailures = 4,  ///< run finished but some trials failed
  kExitInterrupted = 5,    ///< run stopped early (--stop-after)
};

/// Overrides the config's output_dir when set.
inline constexpr const char* kOutputEnvVar = "SENTARL_OUTPUT_DIR";

class Console {
 public:
  Console(std::ostream& out, std::ostream& err, bool quiet) : out_(out), err_(err), quiet_(quiet) {}

  void info(const std::string& line) const;
  void warn(const std::string& line) const;
  void error(const std::string& line) const;

 private:
  std::ostream& out_;
  std::ostream& err_;
  bool quiet_;
};

struct CommonOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> output;  ///< --output flag
};

/// --output, then $SENTARL_OUTPUT_DIR, then the config value.
std::filesystem::path output_root(const RunConfig& config,
                                  const std::optional<std::filesystem::path>& flag);

std::filesystem::path cache_path(const std::filesystem::path& root, const std::string& asset);

/// Aligns one asset (all assets when empty) and writes <out>/cache/<asset>.csv.
int cmd_ingest(const CommonOptions& common, const std::string& asset, const Console& console);

/// Writes <out>/pulse/<asset>.csv from the cached series.
int cmd_corr_pulse(const CommonOptions& common, const std::string& asset, int min_shift,
                   int max_shift, const Console& console);

struct TrainOptions {
  std::string asset;
  std::size_t window = 0;
  std::uint64_t seed = 0;
  double tc = 0.0;
  std::string strategy = "sentarl";
  std::optional<std::size_t> episodes;
};

/// One trial with artifacts under <out>/train.
int cmd_train(const CommonOptions& common, const TrainOptions& options, const Console& console);

struct RunOptions {
  std::optional<std::size_t> workers;
  bool resume = false;
  std::optional<std::size_t> stop_after;
};

/// Full matrix plus summary tables.
int cmd_run(const CommonOptions& common, const RunOptions& options, const Console& console);

/// Rebuilds the summary tables from <dir>/results.csv.
int cmd_report(const std::filesystem::path& results_dir, const Console& console);

}  // namespace sentarl::cli
