#include "run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace sentarl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get_or(const json& obj, const std::string& where, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

std::size_t get_count(const json& obj, const std::string& where, const std::string& key,
                      std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(where + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

template <class F>
auto checked(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

const AssetPaths& RunConfig::asset(const std::string& name) const {
  for (const auto& a : assets) {
    if (a.name == name) return a;
  }
  throw ConfigError("asset '" + name + "' is not in the config");
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  reject_unknown(j, "config",
                 {"assets", "sentiment", "env", "a2c", "seeds", "windows", "strategies",
                  "corr_shift", "output_dir", "workers"});
  RunConfig c;

  if (!j.contains("assets") || !j.at("assets").is_array() || j.at("assets").empty()) {
    throw ConfigError("config.assets: expected a non-empty array");
  }
  std::set<std::string> names;
  for (const auto& a : j.at("assets")) {
    reject_unknown(a, "config.assets[]", {"name", "prices", "news"});
    AssetPaths paths;
    paths.name = get_or<std::string>(a, "assets[]", "name", "");
    if (paths.name.empty()) throw ConfigError("config.assets[]: missing name");
    if (!names.insert(paths.name).second) {
      throw ConfigError("config.assets: duplicate asset '" + paths.name + "'");
    }
    const auto prices = get_or<std::string>(a, "assets[]", "prices", "");
    if (prices.empty()) throw ConfigError("config.assets[" + paths.name + "]: missing prices");
    paths.prices = resolve(base_dir, prices);
    if (a.contains("news")) paths.news = resolve(base_dir, get_or<std::string>(a, "assets[]", "news", ""));
    c.assets.push_back(std::move(paths));
  }

  if (j.contains("sentiment")) {
    const auto& s = j.at("sentiment");
    reject_unknown(s, "config.sentiment", {"scorer", "lexicon", "grouping", "fill"});
    c.scorer = get_or<std::string>(s, "sentiment", "scorer", c.scorer);
    if (c.scorer != "lexicon" && c.scorer != "none") {
      throw ConfigError("config.sentiment.scorer: expected 'lexicon' or 'none'");
    }
    if (s.contains("lexicon")) c.lexicon = resolve(base_dir, get_or<std::string>(s, "sentiment", "lexicon", ""));
    c.grouping = checked("config.sentiment.grouping", [&] {
      return parse_grouping(get_or<std::string>(s, "sentiment", "grouping", "min"));
    });
    c.fill = checked("config.sentiment.fill", [&] {
      return parse_fill_policy(get_or<std::string>(s, "sentiment", "fill", "neutral-zero"));
    });
  }

  if (j.contains("env")) {
    const auto& e = j.at("env");
    reject_unknown(e, "config.env",
                   {"window", "sentiment_window", "shares", "tc_rates", "cost_mode",
                    "normalize_diffs"});
    c.env.window = get_count(e, "env", "window", c.env.window);
    c.env.sentiment_window = get_count(e, "env", "sentiment_window", c.env.sentiment_window);
    c.env.shares = get_or<double>(e, "env", "shares", c.env.shares);
    c.tc_rates = get_or<std::vector<double>>(e, "env", "tc_rates", c.tc_rates);
    c.env.cost_mode = checked("config.env.cost_mode", [&] {
      return parse_cost_mode(get_or<std::string>(e, "env", "cost_mode", "proportional"));
    });
    c.normalize_diffs = get_or<bool>(e, "env", "normalize_diffs", c.normalize_diffs);
  }
  checked("config.env", [&] {
    c.env.validate();
    return 0;
  });
  if (c.tc_rates.empty()) throw ConfigError("config.env.tc_rates: must not be empty");
  for (double tc : c.tc_rates) {
    if (!(tc >= 0.0)) throw ConfigError("config.env.tc_rates: rates must be non-negative");
  }

  if (j.contains("a2c")) {
    const auto& a = j.at("a2c");
    reject_unknown(a, "config.a2c",
                   {"gamma", "lr_actor", "lr_critic", "n_steps", "episodes", "entropy_coef",
                    "hidden", "activation", "optimizer", "momentum", "rms_decay", "epsilon",
                    "clip_norm", "n_step_returns"});
    auto& x = c.a2c;
    x.gamma = get_or<double>(a, "a2c", "gamma", x.gamma);
    x.lr_actor = get_or<double>(a, "a2c", "lr_actor", x.lr_actor);
    x.lr_critic = get_or<double>(a, "a2c", "lr_critic", x.lr_critic);
    x.n_steps = get_count(a, "a2c", "n_steps", x.n_steps);
    x.episodes = get_count(a, "a2c", "episodes", x.episodes);
    x.entropy_coef = get_or<double>(a, "a2c", "entropy_coef", x.entropy_coef);
    x.hidden = get_or<std::vector<std::size_t>>(a, "a2c", "hidden", x.hidden);
    x.activation = checked("config.a2c.activation", [&] {
      return parse_activation(get_or<std::string>(a, "a2c", "activation", "tanh"));
    });
    x.optimizer.kind = checked("config.a2c.optimizer", [&] {
      return parse_optimizer(get_or<std::string>(a, "a2c", "optimizer", "sgd"));
    });
    x.optimizer.momentum = get_or<double>(a, "a2c", "momentum", x.optimizer.momentum);
    x.optimizer.rms_decay = get_or<double>(a, "a2c", "rms_decay", x.optimizer.rms_decay);
    x.optimizer.epsilon = get_or<double>(a, "a2c", "epsilon", x.optimizer.epsilon);
    x.optimizer.clip_norm = get_or<double>(a, "a2c", "clip_norm", x.optimizer.clip_norm);
    x.n_step_returns = get_or<bool>(a, "a2c", "n_step_returns", x.n_step_returns);
  }
  checked("config.a2c", [&] {
    c.a2c.validate();
    return 0;
  });

  if (j.contains("seeds")) {
    c.seeds = get_or<std::vector<std::uint64_t>>(j, "config", "seeds", c.seeds);
  }
  if (c.seeds.empty()) throw ConfigError("config.seeds: must not be empty");

  if (j.contains("windows")) {
    const auto& w = j.at("windows");
    reject_unknown(w, "config.windows",
                   {"train_len", "test_len", "stride", "count", "trading_days"});
    c.windows.train_len = get_count(w, "windows", "train_len", c.windows.train_len);
    c.windows.test_len = get_count(w, "windows", "test_len", c.windows.test_len);
    c.windows.stride = get_count(w, "windows", "stride", c.windows.stride);
    c.windows.count = get_count(w, "windows", "count", c.windows.count);
    c.trading_days = get_count(w, "windows", "trading_days", c.trading_days);
  }
  if (c.windows.count == 0 || c.windows.train_len == 0 || c.windows.test_len == 0) {
    throw ConfigError("config.windows: count, train_len and test_len must be positive");
  }
  if (c.windows.train_len < c.env.min_series_length()) {
    throw ConfigError("config.windows.train_len: shorter than the state windows require");
  }

  if (j.contains("strategies")) {
    const auto names = get_or<std::vector<std::string>>(j, "config", "strategies", {});
    c.strategies.clear();
    for (const auto& n : names) {
      c.strategies.push_back(checked("config.strategies", [&] { return parse_strategy(n); }));
    }
    if (c.strategies.empty()) throw ConfigError("config.strategies: must not be empty");
  }

  c.corr_shift = get_or<int>(j, "config", "corr_shift", c.corr_shift);
  c.output_dir = resolve(base_dir, get_or<std::string>(j, "config", "output_dir", "out"));
  c.workers = get_count(j, "config", "workers", c.workers);
  if (c.workers == 0) throw ConfigError("config.workers: must be >= 1");
  return c;
}

void validate_paths(const RunConfig& config) {
  for (const auto& a : config.assets) {
    if (!fs::exists(a.prices)) {
      throw ConfigError("asset " + a.name + ": price file not found: " + a.prices.string());
    }
  }
  if (config.scorer == "lexicon" && !fs::exists(lexicon_path(config))) {
    throw ConfigError("lexicon file not found: " + lexicon_path(config).string());
  }
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  RunConfig c = parse_run_config(j, fs::absolute(path).parent_path());
  validate_paths(c);
  return c;
}

json to_json(const RunConfig& c) {
  json assets = json::array();
  for (const auto& a : c.assets) {
    json entry{{"name", a.name}, {"prices", fs::absolute(a.prices).string()}};
    if (a.news) entry["news"] = fs::absolute(*a.news).string();
    assets.push_back(std::move(entry));
  }
  json sentiment{{"scorer", c.scorer},
                 {"grouping", std::string(to_string(c.grouping))},
                 {"fill", std::string(to_string(c.fill))}};
  if (c.lexicon) sentiment["lexicon"] = fs::absolute(*c.lexicon).string();

  std::vector<std::string> strategies;
  for (auto s : c.strategies) strategies.emplace_back(to_string(s));

  return json{
      {"assets", std::move(assets)},
      {"sentiment", std::move(sentiment)},
      {"env",
       {{"window", c.env.window},
        {"sentiment_window", c.env.sentiment_window},
        {"shares", c.env.shares},
        {"tc_rates", c.tc_rates},
        {"cost_mode", std::string(to_string(c.env.cost_mode))},
        {"normalize_diffs", c.normalize_diffs}}},
      {"a2c",
       {{"gamma", c.a2c.gamma},
        {"lr_actor", c.a2c.lr_actor},
        {"lr_critic", c.a2c.lr_critic},
        {"n_steps", c.a2c.n_steps},
        {"episodes", c.a2c.episodes},
        {"entropy_coef", c.a2c.entropy_coef},
        {"hidden", c.a2c.hidden},
        {"activation", std::string(to_string(c.a2c.activation))},
        {"optimizer", std::string(to_string(c.a2c.optimizer.kind))},
        {"momentum", c.a2c.optimizer.momentum},
        {"rms_decay", c.a2c.optimizer.rms_decay},
        {"epsilon", c.a2c.optimizer.epsilon},
        {"clip_norm", c.a2c.optimizer.clip_norm},
        {"n_step_returns", c.a2c.n_step_returns}}},
      {"seeds", c.seeds},
      {"windows",
       {{"train_len", c.windows.train_len},
        {"test_len", c.windows.test_len},
        {"stride", c.windows.stride},
        {"count", c.windows.count},
        {"trading_days", c.trading_days}}},
      {"strategies", strategies},
      {"corr_shift", c.corr_shift},
      {"output_dir", fs::absolute(c.output_dir).string()},
      {"workers", c.workers},
  };
}

fs::path lexicon_path(const RunConfig& config) {
  return config.lexicon ? *config.lexicon : fs::path(SENTARL_BUNDLED_LEXICON);
}

}  // namespace sentarl::cli
