#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "sentarl/csv.hpp"
#include "sentarl/data_ingest.hpp"
#include "sentarl/error.hpp"
#include "sentarl/metrics.hpp"
#include "sentarl/report.hpp"

namespace sentarl::cli {

namespace fs = std::filesystem;

void Console::info(const std::string& line) const {
  if (!quiet_) out_ << line << '\n';
}

void Console::warn(const std::string& line) const { err_ << "warning: " << line << '\n'; }

void Console::error(const std::string& line) const { err_ << "error: " << line << '\n'; }

fs::path output_root(const RunConfig& config, const std::optional<fs::path>& flag) {
  if (flag) return fs::absolute(*flag);
  if (const char* env = std::getenv(kOutputEnvVar); env && *env) return fs::absolute(env);
  return fs::absolute(config.output_dir);
}

fs::path cache_path(const fs::path& root, const std::string& asset) {
  return root / "cache" / (asset + ".csv");
}

namespace {

class MissingCache : public Error {
 public:
  using Error::Error;
};

template <class F>
int guarded(const Console& console, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    console.error(e.what());
    return kExitConfig;
  } catch (const ParseError& e) {
    console.error(e.what());
    return kExitData;
  } catch (const DataError& e) {
    console.error(e.what());
    return kExitData;
  } catch (const MissingCache& e) {
    console.error(e.what());
    return kExitData;
  } catch (const std::exception& e) {
    console.error(e.what());
    return kExitUsage;
  }
}

AlignedSeries load_cache(const fs::path& root, const std::string& asset) {
  const fs::path path = cache_path(root, asset);
  if (!fs::exists(path)) {
    throw MissingCache("no cached series for " + asset + " at " + path.string() +
                       "; run `sentarl ingest` first");
  }
  return read_aligned_csv(path, asset);
}

AlignedSeries ingest_asset(const RunConfig& config, const AssetPaths& paths,
                           const Console& console) {
  const auto prices = load_prices(paths.prices);

  std::vector<HeadlineRecord> headlines;
  if (!paths.news) {
    console.warn(paths.name + ": no news file configured; sentiment is neutral throughout");
  } else if (!fs::exists(*paths.news)) {
    console.warn(paths.name + ": news file not found (" + paths.news->string() +
                 "); sentiment is neutral throughout");
  } else {
    headlines = load_headlines(*paths.news);
  }

  std::unique_ptr<SentimentScorer> scorer;
  if (config.scorer == "lexicon" && !headlines.empty()) {
    scorer = std::make_unique<LexiconScorer>(load_lexicon(lexicon_path(config)));
  }
  const auto grouped = group_headlines(headlines, scorer.get(), config.grouping);
  return align(paths.name, prices, grouped, config.fill);
}

MatrixSpec matrix_spec(const RunConfig& config) {
  MatrixSpec spec;
  spec.windows = config.windows;
  spec.seeds = config.seeds;
  spec.tc_rates = config.tc_rates;
  spec.strategies = config.strategies;
  spec.env = config.env;
  spec.a2c = config.a2c;
  spec.trading_days = config.trading_days;
  spec.normalize_diffs = config.normalize_diffs;
  return spec;
}

std::optional<double> correlation_at(const AlignedSeries& series, int shift) {
  try {
    return correlation_pulse(series, shift, shift).at(shift);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  } catch (const DataError&) {
    return std::nullopt;
  }
}

std::string percent(double fraction) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << fraction * 100.0 << '%';
  return os.str();
}

}  // namespace

int cmd_ingest(const CommonOptions& common, const std::string& asset, const Console& console) {
  return guarded(console, [&] {
    const RunConfig config = load_run_config(common.config);
    const fs::path root = output_root(config, common.output);
    std::vector<AssetPaths> targets;
    if (asset.empty()) {
      targets = config.assets;
    } else {
      targets.push_back(config.asset(asset));
    }
    for (const auto& paths : targets) {
      const AlignedSeries series = ingest_asset(config, paths, console);
      const fs::path out = cache_path(root, paths.name);
      write_aligned_csv(series, out);
      console.info(paths.name + ": " + std::to_string(series.size()) + " hours, coverage " +
                   csv::format_double(coverage(series)) + " -> " + out.string());
    }
    return int{kExitOk};
  });
}

int cmd_corr_pulse(const CommonOptions& common, const std::string& asset, int min_shift,
                   int max_shift, const Console& console) {
  return guarded(console, [&] {
    if (min_shift > max_shift) throw ConfigError("--min-shift must not exceed --max-shift");
    const RunConfig config = load_run_config(common.config);
    const fs::path root = output_root(config, common.output);
    config.asset(asset);
    const AlignedSeries series = load_cache(root, asset);
    const CorrelationPulse pulse = correlation_pulse(series, min_shift, max_shift);
    const fs::path out = root / "pulse" / (asset + ".csv");
    write_pulse_csv(pulse, out);
    const auto peak = pulse.peak_shift();
    console.info(asset + ": " + std::to_string(pulse.shifts.size()) + " shifts, peak " +
                 (peak ? "at shift " + std::to_string(*peak) + " (" +
                             csv::format_double(*pulse.at(*peak)) + ")"
                       : std::string("undefined")) +
                 " -> " + out.string());
    return int{kExitOk};
  });
}

int cmd_train(const CommonOptions& common, const TrainOptions& options, const Console& console) {
  return guarded(console, [&] {
    RunConfig config = load_run_config(common.config);
    if (options.episodes) config.a2c.episodes = *options.episodes;
    config.a2c.validate();
    const Strategy strategy = [&] {
      try {
        return parse_strategy(options.strategy);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }();
    if (!(options.tc >= 0.0)) throw ConfigError("--tc must be non-negative");
    const fs::path root = output_root(config, common.output);
    config.asset(options.asset);
    const AlignedSeries series = load_cache(root, options.asset);
    const RollingWindows windows = make_windows(series.size(), config.windows);
    if (options.window >= windows.windows.size()) {
      throw ConfigError("--window out of range: config defines " +
                        std::to_string(windows.windows.size()) + " windows");
    }
    const Window& window = windows.windows[options.window];
    const MatrixSpec spec = matrix_spec(config);
    const TrialKey key{options.asset, options.window, options.seed, options.tc, strategy};

    console.info("training " + std::string(to_string(strategy)) + " on " + options.asset +
                 " window " + std::to_string(options.window) + " (train rows " +
                 std::to_string(window.train.begin) + ".." + std::to_string(window.train.end) +
                 ", test rows " + std::to_string(window.test.begin) + ".." +
                 std::to_string(window.test.end) + ")");
    const TrialResult r = is_learning(strategy)
                              ? run_learning_trial(series, window, key, spec, root / "train")
                              : run_buy_and_hold_trial(series, window, key, spec);
    console.info("TR " + percent(r.tr) + ", AR " + percent(r.ar) + ", trades " +
                 std::to_string(r.trade_count));
    if (is_learning(strategy)) console.info("artifacts in " + (root / "train").string());
    return int{kExitOk};
  });
}

int cmd_run(const CommonOptions& common, const RunOptions& options, const Console& console) {
  return guarded(console, [&] {
    RunConfig config = load_run_config(common.config);
    if (options.workers) {
      if (*options.workers == 0) throw ConfigError("--workers must be >= 1");
      config.workers = *options.workers;
    }
    const fs::path root = output_root(config, common.output);
    config.output_dir = root;

    MatrixSpec spec = matrix_spec(config);
    std::vector<SeriesMeta> meta;
    for (const auto& a : config.assets) {
      auto series = std::make_shared<const AlignedSeries>(load_cache(root, a.name));
      meta.push_back({a.name, coverage(*series), correlation_at(*series, config.corr_shift)});
      spec.assets.push_back(std::move(series));
    }

    fs::create_directories(root);
    {
      std::ofstream echo(root / "config.resolved.json", std::ios::binary | std::ios::trunc);
      echo << to_json(config).dump(2) << '\n';
      if (!echo) throw Error("cannot write " + (root / "config.resolved.json").string());
    }
    write_series_meta(meta, root / "series_meta.csv");

    MatrixOptions mopts;
    mopts.workers = config.workers;
    mopts.output_dir = root;
    mopts.resume = options.resume;
    mopts.stop_after = options.stop_after;
    mopts.log = [&console](const std::string& line) { console.info(line); };

    const MatrixOutcome outcome = run_matrix(spec, mopts);
    if (outcome.interrupted) {
      console.warn("run stopped after " + std::to_string(outcome.results.size()) +
                   " result rows; rerun with --resume to finish");
      return int{kExitInterrupted};
    }
    if (!outcome.results.empty()) {
      write_report(build_report(outcome.results, meta), root);
    }
    console.info(std::to_string(outcome.results.size()) + " results (" +
                 std::to_string(outcome.resumed) + " resumed), " +
                 std::to_string(outcome.failures.size()) + " failures -> " + root.string());
    if (!outcome.failures.empty()) {
      console.error(std::to_string(outcome.failures.size()) +
                    " trials failed; see failures.csv");
      return int{kExitTrialFailures};
    }
    return int{kExitOk};
  });
}

int cmd_report(const fs::path& results_dir, const Console& console) {
  return guarded(console, [&] {
    const fs::path results = results_dir / "results.csv";
    if (!fs::exists(results)) throw MissingCache("no results.csv in " + results_dir.string());
    const auto rows = read_results_csv(results);
    if (rows.empty()) throw DataError(results.string() + " has no result rows");
    std::vector<SeriesMeta> meta;
    if (fs::exists(results_dir / "series_meta.csv")) {
      meta = read_series_meta(results_dir / "series_meta.csv");
    } else {
      console.warn("series_meta.csv not found; scatter rows will lack coverage and correlation");
    }
    write_report(build_report(rows, meta), results_dir);
    console.info("report for " + std::to_string(rows.size()) + " results written to " +
                 results_dir.string());
    return int{kExitOk};
  });
}

}  // namespace sentarl::cli
