#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "sentarl/sentiment.hpp"

using namespace sentarl::cli;

int main(int argc, char** argv) {
  CLI::App app{"Sentiment-aware A2C single-asset trading experiments"};
  app.require_subcommand(1);

  bool quiet = false;
  std::string output;
  app.add_flag("-q,--quiet", quiet, "Only print warnings and errors");
  app.add_option("-o,--output", output,
                 "Output root (overrides $SENTARL_OUTPUT_DIR and the config)");

  CommonOptions common;
  const auto add_config = [&common](CLI::App* sub) {
    sub->add_option("-c,--config", common.config, "JSON run config")->required();
  };

  std::string asset;
  auto* ingest = app.add_subcommand("ingest", "Align prices and news into a cached series");
  add_config(ingest);
  ingest->add_option("-a,--asset", asset, "Asset name (all assets when omitted)");

  int min_shift = sentarl::kDefaultMinShift;
  int max_shift = sentarl::kDefaultMaxShift;
  auto* pulse = app.add_subcommand("corr-pulse", "Lagged sentiment/price-change correlation");
  add_config(pulse);
  pulse->add_option("-a,--asset", asset, "Asset name")->required();
  pulse->add_option("--min-shift", min_shift, "Smallest shift")->capture_default_str();
  pulse->add_option("--max-shift", max_shift, "Largest shift")->capture_default_str();

  TrainOptions train;
  std::size_t episodes = 0;
  auto* train_cmd = app.add_subcommand("train", "Train and evaluate one trial");
  add_config(train_cmd);
  train_cmd->add_option("-a,--asset", train.asset, "Asset name")->required();
  train_cmd->add_option("--window", train.window, "Window index")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Initialisation seed")->capture_default_str();
  train_cmd->add_option("--tc", train.tc, "Transaction cost rate")->capture_default_str();
  train_cmd->add_option("--strategy", train.strategy, "sentarl, no-sentiment or buy-and-hold")
      ->capture_default_str();
  auto* episodes_opt = train_cmd->add_option("--episodes", episodes, "Override episode count");

  RunOptions run;
  std::size_t workers = 0;
  std::size_t stop_after = 0;
  auto* run_cmd = app.add_subcommand("run", "Run the full trial matrix and write reports");
  add_config(run_cmd);
  auto* workers_opt = run_cmd->add_option("-j,--workers", workers, "Concurrent trials");
  run_cmd->add_flag("--resume", run.resume, "Skip trials already recorded in the output dir");
  auto* stop_opt =
      run_cmd->add_option("--stop-after", stop_after, "Stop after N result rows (testing aid)");

  std::string results_dir;
  auto* report = app.add_subcommand("report", "Rebuild summary tables from results.csv");
  report->add_option("-r,--results", results_dir, "Directory holding results.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (!output.empty()) common.output = output;
  const Console console(std::cout, std::cerr, quiet);

  if (ingest->parsed()) return cmd_ingest(common, asset, console);
  if (pulse->parsed()) return cmd_corr_pulse(common, asset, min_shift, max_shift, console);
  if (train_cmd->parsed()) {
    if (episodes_opt->count() > 0) train.episodes = episodes;
    return cmd_train(common, train, console);
  }
  if (run_cmd->parsed()) {
    if (workers_opt->count() > 0) run.workers = workers;
    if (stop_opt->count() > 0) run.stop_after = stop_after;
    return cmd_run(common, run, console);
  }
  if (report->parsed()) return cmd_report(results_dir, console);
  return kExitUsage;
}
