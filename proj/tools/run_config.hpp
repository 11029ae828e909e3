#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sentarl/error.hpp"
#include "sentarl/a2c.hpp"
#include "sentarl/experiment.hpp"
#include "sentarl/sentiment.hpp"
#include "sentarl/trading_env.hpp"

namespace sentarl::cli {

/// Raised for invalid configuration content; maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct AssetPaths {
  std::string name;
  std::filesystem::path prices;
  std::optional<std::filesystem::path> news;

  friend bool operator==(const AssetPaths&, const AssetPaths&) = default;
};

/// Declarative description of a whole experiment. Defaults reproduce the
/// reference hyper-parameters (w = 20, l = 5, min grouping, 64x64 networks,
/// n = 5, 100 episodes, five seeds, 0% and 0.25% costs, 3377/374 windows).
struct RunConfig {
  std::vector<AssetPaths> assets;

  std::string scorer = "lexicon";  ///< "lexicon" or "none" (precomputed scores only)
  std::optional<std::filesystem::path> lexicon;  ///< bundled list when unset
  GroupingMethod grouping = GroupingMethod::min;
  FillPolicy fill = FillPolicy::neutral_zero;

  EnvConfig env;
  std::vector<double> tc_rates = {0.0, 0.0025};
  bool normalize_diffs = false;

  A2cConfig a2c;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};

  WindowSpec windows;
  std::size_t trading_days = 0;
  std::vector<Strategy> strategies = {Strategy::sentarl, Strategy::no_sentiment,
                                      Strategy::buy_and_hold};
  int corr_shift = 0;

  std::filesystem::path output_dir = "out";
  std::size_t workers = 1;

  const AssetPaths& asset(const std::string& name) const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

/// Parses and range-checks a config tree. Relative paths are resolved
/// against `base_dir`. Unknown keys are rejected. Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Reads the file, parses it and checks that price (and lexicon) paths exist.
RunConfig load_run_config(const std::filesystem::path& path);

void validate_paths(const RunConfig& config);

/// Full tree with every field spelled out and absolute paths.
nlohmann::json to_json(const RunConfig& config);

/// Effective lexicon path: explicit value or the bundled word list.
std::filesystem::path lexicon_path(const RunConfig& config);

}  // namespace sentarl::cli
