#include "sentarl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "sentarl/csv.hpp"
#include "sentarl/error.hpp"
#include "sentarl/metrics.hpp"

namespace sentarl {

namespace fs = std::filesystem;

RollingWindows make_windows(std::size_t series_length, const WindowSpec& spec) {
  if (spec.count == 0 || spec.train_len == 0 || spec.test_len == 0) {
    throw std::invalid_argument("make_windows: count, train_len and test_len must be positive");
  }
  if (spec.count > 1 && spec.stride == 0) {
    throw std::invalid_argument("make_windows: stride must be positive for several windows");
  }
  const std::size_t required = spec.train_len + spec.test_len + (spec.count - 1) * spec.stride;
  if (series_length < required) {
    throw DataError("make_windows: series has " + std::to_string(series_length) +
                    " rows, windows need " + std::to_string(required));
  }
  const std::size_t offset = series_length - required;
  RollingWindows out;
  out.spec = spec;
  for (std::size_t j = 0; j < spec.count; ++j) {
    Window w;
    w.train.begin = offset + j * spec.stride;
    w.train.end = w.train.begin + spec.train_len;
    w.test.begin = w.train.end;
    w.test.end = w.test.begin + spec.test_len;
    out.windows.push_back(w);
  }
  return out;
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::sentarl: return "sentarl";
    case Strategy::no_sentiment: return "no-sentiment";
    case Strategy::buy_and_hold: return "buy-and-hold";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "sentarl") return Strategy::sentarl;
  if (name == "no-sentiment") return Strategy::no_sentiment;
  if (name == "buy-and-hold") return Strategy::buy_and_hold;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

bool is_learning(Strategy s) noexcept { return s != Strategy::buy_and_hold; }

AlignedSeries test_segment(const AlignedSeries& series, const Window& window,
                           const EnvConfig& env) {
  const std::size_t warmup = env.warmup();
  if (window.test.begin < warmup) {
    throw DataError("test range starts before enough history for the state windows");
  }
  return series.slice(window.test.begin - warmup, window.test.end);
}

namespace {

std::string trial_stem(const TrialKey& key) {
  std::string stem = key.asset + "_w" + std::to_string(key.window) + "_s" +
                     std::to_string(key.seed) + "_tc" + csv::format_double(key.tc) + "_" +
                     std::string(to_string(key.strategy));
  for (auto& c : stem) {
    if (c == '/' || c == '\\' || c == ' ') c = '_';
  }
  return stem;
}

std::size_t days_for(const AlignedSeries& series, const Window& window, const MatrixSpec& spec) {
  if (spec.trading_days > 0) return spec.trading_days;
  const auto ts = std::span(series.timestamps).subspan(window.test.begin, window.test.size());
  return trading_days(ts);
}

EnvConfig trial_env(const AlignedSeries& series, const Window& window, const TrialKey& key,
                    const MatrixSpec& spec) {
  EnvConfig env = spec.env;
  env.tc_rate = key.tc;
  env.use_sentiment = key.strategy == Strategy::sentarl;
  if (spec.normalize_diffs) {
    env.diff_normalization = fit_diff_normalization(series, window.train.begin, window.train.end);
  }
  return env;
}

}  // namespace

TrialResult run_learning_trial(const AlignedSeries& series, const Window& window,
                               const TrialKey& key, const MatrixSpec& spec,
                               const std::optional<fs::path>& artifacts) {
  const EnvConfig env = trial_env(series, window, key, spec);
  A2cConfig a2c = spec.a2c;
  a2c.seed = key.seed;

  const AlignedSeries train_segment = series.slice(window.train.begin, window.train.end);
  TrainResult trained = train(train_segment, env, a2c);

  const AlignedSeries test = test_segment(series, window, env);
  TradingEnv test_env(test, env);
  const EpisodeRecord rec = evaluate(trained.agent, test_env, EvalMode::greedy);

  TrialResult result;
  result.key = key;
  result.tr = rec.total_return();
  result.ar = annualized_return(result.tr, days_for(series, window, spec));
  result.trade_count = rec.trade_count;
  result.rewards = rec.rewards;

  if (artifacts) {
    const std::string stem = trial_stem(key);
    write_training_log(trained.log, *artifacts / "logs" / (stem + ".csv"));
    save_model(trained.agent.policy_net(), *artifacts / "models" / (stem + ".policy.json"));
    save_model(trained.agent.value_net(), *artifacts / "models" / (stem + ".value.json"));
    write_equity_csv(rec, test, *artifacts / "equity" / (stem + ".csv"));
  }
  return result;
}

TrialResult run_buy_and_hold_trial(const AlignedSeries& series, const Window& window,
                                   const TrialKey& key, const MatrixSpec& spec) {
  const EnvConfig env = trial_env(series, window, key, spec);
  const AlignedSeries test = test_segment(series, window, env);
  const EpisodeRecord rec = run_buy_and_hold(test, env);

  TrialResult result;
  result.key = key;
  result.tr = rec.total_return();
  result.ar = annualized_return(result.tr, days_for(series, window, spec));
  result.trade_count = rec.trade_count;
  result.rewards = rec.rewards;
  return result;
}

void append_result_row(std::ostream& out, const TrialResult& r) {
  csv::write_row(out, {r.key.asset, std::to_string(r.key.window), std::to_string(r.key.seed),
                       csv::format_double(r.key.tc), std::string(to_string(r.key.strategy)),
                       csv::format_double(r.tr), csv::format_double(r.ar),
                       std::to_string(r.trade_count)});
}

void write_results_csv(std::span<const TrialResult> results, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << kResultsHeader << '\n';
    for (const auto& r : results) append_result_row(out, r);
    if (!out) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<TrialResult> read_results_csv(const fs::path& path) {
  csv::Reader reader(path);
  reader.expect_header(
      {"asset", "window", "seed", "tc", "strategy", "tr", "ar", "trade_count"});
  std::vector<TrialResult> out;
  while (auto row = reader.next()) {
    if (row->size() != 8) throw ParseError(reader.source(), reader.line(), "malformed row");
    try {
      TrialResult r;
      r.key.asset = (*row)[0];
      r.key.window = static_cast<std::size_t>(csv::parse_int((*row)[1]));
      r.key.seed = static_cast<std::uint64_t>(csv::parse_int((*row)[2]));
      r.key.tc = csv::parse_double((*row)[3]);
      r.key.strategy = parse_strategy((*row)[4]);
      r.tr = csv::parse_double((*row)[5]);
      r.ar = csv::parse_double((*row)[6]);
      r.trade_count = static_cast<std::size_t>(csv::parse_int((*row)[7]));
      out.push_back(std::move(r));
    } catch (const std::invalid_argument& e) {
      throw ParseError(reader.source(), reader.line(), std::string("malformed row: ") + e.what());
    }
  }
  return out;
}

namespace {

// A unit of work: one learning trial, or one buy-and-hold simulation that is
// replicated into several result rows.
struct Job {
  std::size_t asset = 0;
  std::size_t window = 0;
  std::vector<TrialKey> keys;
};

}  // namespace

MatrixOutcome run_matrix(const MatrixSpec& spec, const MatrixOptions& options) {
  if (spec.assets.empty() || spec.seeds.empty() || spec.tc_rates.empty() ||
      spec.strategies.empty()) {
    throw std::invalid_argument("run_matrix: assets, seeds, tc_rates and strategies must be non-empty");
  }
  spec.env.validate();
  spec.a2c.validate();
  const auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  MatrixOutcome outcome;
  std::vector<TrialKey> order;  // canonical row order
  std::vector<Job> jobs;
  std::vector<std::optional<RollingWindows>> windows(spec.assets.size());

  for (std::size_t a = 0; a < spec.assets.size(); ++a) {
    const auto& series = *spec.assets[a];
    std::string window_error;
    try {
      windows[a] = make_windows(series.size(), spec.windows);
    } catch (const std::exception& e) {
      window_error = e.what();
    }
    for (std::size_t w = 0; w < spec.windows.count; ++w) {
      std::optional<Job> bh;
      for (auto seed : spec.seeds) {
        for (double tc : spec.tc_rates) {
          for (auto strategy : spec.strategies) {
            TrialKey key{series.asset, w, seed, tc, strategy};
            order.push_back(key);
            if (!window_error.empty()) {
              outcome.failures.push_back({key, window_error});
              continue;
            }
            if (is_learning(strategy)) {
              jobs.push_back({a, w, {key}});
            } else {
              if (!bh) bh = Job{a, w, {}};
              bh->keys.push_back(key);
            }
          }
        }
      }
      if (bh) jobs.push_back(std::move(*bh));
    }
  }

  std::map<TrialKey, TrialResult> done;
  std::optional<fs::path> journal_path;
  std::optional<fs::path> artifacts;
  if (options.output_dir) {
    fs::create_directories(*options.output_dir);
    journal_path = *options.output_dir / "results.journal.csv";
    if (options.write_artifacts) artifacts = *options.output_dir;
    if (options.resume) {
      for (const auto& p : {*options.output_dir / "results.csv", *journal_path}) {
        if (!fs::exists(p)) continue;
        for (auto& r : read_results_csv(p)) done[r.key] = std::move(r);
      }
    }
  }

  std::vector<Job> pending;
  for (auto& job : jobs) {
    const bool complete = std::all_of(job.keys.begin(), job.keys.end(),
                                      [&](const TrialKey& k) { return done.count(k) > 0; });
    if (complete) {
      outcome.resumed += job.keys.size();
    } else {
      pending.push_back(std::move(job));
    }
  }
  if (outcome.resumed > 0) log("resuming: " + std::to_string(outcome.resumed) + " trials on disk");

  std::ofstream journal;
  if (journal_path) {
    const bool keep = options.resume && fs::exists(*journal_path);
    journal.open(*journal_path, std::ios::binary | (keep ? std::ios::app : std::ios::trunc));
    if (!journal) throw Error("cannot write " + journal_path->string());
    if (!keep) journal << kResultsHeader << '\n' << std::flush;
  }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::size_t produced = 0;

  const auto record = [&](std::vector<TrialResult> rows, std::vector<TrialFailure> failed) {
    std::lock_guard lock(mu);
    for (auto& r : rows) {
      if (journal.is_open()) append_result_row(journal, r);
      log("trial " + r.key.asset + " w" + std::to_string(r.key.window) + " s" +
          std::to_string(r.key.seed) + " tc" + csv::format_double(r.key.tc) + " " +
          std::string(to_string(r.key.strategy)) + ": TR " + csv::format_double(r.tr));
      done[r.key] = std::move(r);
      ++produced;
    }
    if (journal.is_open()) journal.flush();
    for (auto& f : failed) {
      log("trial failed: " + f.key.asset + " " + std::string(to_string(f.key.strategy)) + ": " +
          f.message);
      outcome.failures.push_back(std::move(f));
    }
    if (options.stop_after && produced >= *options.stop_after) stop = true;
  };

  const auto worker = [&] {
    while (!stop) {
      const std::size_t i = next++;
      if (i >= pending.size()) return;
      const Job& job = pending[i];
      const auto& series = *spec.assets[job.asset];
      const Window& window = windows[job.asset]->windows[job.window];
      try {
        std::vector<TrialResult> rows;
        if (is_learning(job.keys.front().strategy)) {
          rows.push_back(run_learning_trial(series, window, job.keys.front(), spec, artifacts));
        } else {
          const TrialResult bh = run_buy_and_hold_trial(series, window, job.keys.front(), spec);
          if (artifacts) {
            const EnvConfig env = spec.env;
            const AlignedSeries test = test_segment(series, window, env);
            const EpisodeRecord rec = run_buy_and_hold(test, env);
            write_equity_csv(rec, test,
                             *artifacts / "equity" /
                                 (series.asset + "_w" + std::to_string(job.window) +
                                  "_buy-and-hold.csv"));
          }
          for (const auto& key : job.keys) {
            TrialResult copy = bh;
            copy.key = key;
            rows.push_back(std::move(copy));
          }
        }
        record(std::move(rows), {});
      } catch (const std::exception& e) {
        std::vector<TrialFailure> failed;
        for (const auto& key : job.keys) failed.push_back({key, e.what()});
        record({}, std::move(failed));
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, pending.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  journal.close();

  outcome.interrupted = next.load() < pending.size() && stop.load();
  std::stable_sort(outcome.failures.begin(), outcome.failures.end(),
                   [](const TrialFailure& a, const TrialFailure& b) { return a.key < b.key; });
  for (const auto& key : order) {
    auto it = done.find(key);
    if (it != done.end()) outcome.results.push_back(std::move(it->second));
  }

  if (options.output_dir && !outcome.interrupted) {
    write_results_csv(outcome.results, *options.output_dir / "results.csv");
    std::ofstream failures(*options.output_dir / "failures.csv", std::ios::binary | std::ios::trunc);
    failures << "asset,window,seed,tc,strategy,message\n";
    for (const auto& f : outcome.failures) {
      csv::write_row(failures, {f.key.asset, std::to_string(f.key.window),
                                std::to_string(f.key.seed), csv::format_double(f.key.tc),
                                std::string(to_string(f.key.strategy)), f.message});
    }
    fs::remove(*journal_path);
  }
  return outcome;
}

}  // namespace sentarl
