#include "txmotif/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "txmotif/backtest.hpp"
#include "txmotif/ensemble.hpp"
#include "txmotif/error.hpp"
#include "txmotif/features.hpp"
#include "txmotif/ingest.hpp"
#include "txmotif/korder.hpp"
#include "txmotif/synth.hpp"
#include "txmotif/txgraph.hpp"

namespace txmotif {
namespace {

constexpr const char* kEnvPrefix = "TXMOTIF_";

std::string env_name(std::string flag) {
  std::string out = kEnvPrefix;
  for (char c : flag) out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

struct CommonFlags {
  unsigned threads = 0;
  std::uint64_t seed = 42;
  std::string config;
};

struct PipelineFlags {
  std::string tx_path;
  std::string price_path;
  std::string interval = "custom";
  double train_fraction = 0.8;
  int k = 2;
  double r = 0.8;
  int window = 1;
  int horizon = 1;
  std::string model = "ridge";
  RegressorSpec spec;
};

CLI::Option* flag(CLI::App* app, const std::string& name, auto& target, const std::string& help) {
  return app->add_option("--" + name, target, help)->envname(env_name(name));
}

void add_common(CLI::App* app, CommonFlags& c) {
  flag(app, "threads", c.threads, "Worker threads for data-parallel sections (0 = all cores)");
  flag(app, "seed", c.seed, "RNG seed");
  app->add_option("--config", c.config, "Flat key=value file supplying any flag; command line wins");
}

void add_model_flags(CLI::App* app, PipelineFlags& p) {
  flag(app, "model", p.model, "Regressor: ridge | svr")->check(CLI::IsMember({"ridge", "svr", "linear_svr"}));
  flag(app, "lambda", p.spec.ridge_lambda, "Ridge regularization");
  flag(app, "svr-c", p.spec.svr_c, "SVR penalty C");
  flag(app, "svr-epsilon", p.spec.svr_epsilon, "SVR tube width");
  flag(app, "svr-epochs", p.spec.svr_epochs, "SVR epochs");
  flag(app, "svr-lr", p.spec.svr_learning_rate, "SVR initial learning rate");
}

void add_pipeline(CLI::App* app, PipelineFlags& p, bool with_split) {
  flag(app, "tx", p.tx_path, "transactions.csv")->required();
  flag(app, "prices", p.price_path, "prices.csv")->required();
  flag(app, "k", p.k, "Max subgraph order s");
  flag(app, "r", p.r, "Weight decay r in (0,1)");
  flag(app, "window", p.window, "History window h' (number of offset models)");
  flag(app, "horizon", p.horizon, "Offset of the nearest model (days ahead)");
  if (with_split) {
    flag(app, "interval", p.interval, "custom | interval1 | interval2")
        ->check(CLI::IsMember({"custom", "interval1", "interval2"}));
    flag(app, "train-fraction", p.train_fraction, "Training share of days (custom interval)");
  }
  add_model_flags(app, p);
}

BacktestConfig make_config(const PipelineFlags& p, const CommonFlags& c) {
  BacktestConfig config;
  if (p.interval == "custom")
    config.split.train_fraction = p.train_fraction;
  else
    config.split = interval_preset(p.interval);
  config.max_order = p.k;
  config.r = p.r;
  config.window = p.window;
  config.horizon = p.horizon;
  config.model = p.spec;
  config.model.kind = parse_regressor_kind(p.model);
  config.model.seed = c.seed;
  config.threads = c.threads;
  return config;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::MissingFile, "cannot write " + path);
  f << text;
}

std::string format_mape(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v << '%';
  return s.str();
}

/// Reads a flat key=value file into `--key value` tokens. Keys whose
/// environment override is set are left out so the environment wins.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::BadSpec, "config line without '=': " + line);
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    if (key == "config" || std::getenv(env_name(key).c_str())) continue;
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return !a.starts_with("-"); });
  if (sub == args.end()) return args;
  auto tokens = config_tokens(path);
  args.insert(sub + 1, tokens.begin(), tokens.end());
  return args;
}

int cmd_weights(double r, int window, std::ostream& out) {
  const auto w = decay_weights(r, window);
  for (std::size_t i = 0; i < w.alphas.size(); ++i) out << (i ? " " : "") << w.alphas[i];
  out << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"k-order transaction graph features and price prediction backtests", "txmotif"};
  app.option_defaults()->always_capture_default();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  CommonFlags common;
  PipelineFlags pipe;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate synthetic transactions.csv and prices.csv");
  SynthSpec sspec;
  std::string start_date = "2020-01-01", price_model = "random_walk", synth_interval, out_tx, out_prices;
  flag(synth, "days", sspec.days, "Number of days");
  flag(synth, "tx-per-day", sspec.tx_per_day, "Mean transactions per day (Poisson)");
  flag(synth, "spend-prob", sspec.spend_probability, "Chance an output is spent the same day");
  flag(synth, "coinbase-per-day", sspec.coinbase_per_day, "Coinbase transactions per day");
  flag(synth, "start-date", start_date, "First day (YYYY-MM-DD)");
  flag(synth, "interval", synth_interval, "Cover a preset's days instead of --start-date/--days")
      ->check(CLI::IsMember({"", "interval1", "interval2"}));
  flag(synth, "price-model", price_model, "random_walk | planted_linear")
      ->check(CLI::IsMember({"random_walk", "planted_linear", "planted"}));
  flag(synth, "start-price", sspec.start_price, "Initial price");
  flag(synth, "volatility", sspec.walk_volatility, "Random-walk daily log volatility");
  flag(synth, "planted-order", sspec.planted_order, "Feature order used by the planted relation");
  flag(synth, "noise", sspec.noise_fraction, "Planted noise sd as a fraction of price");
  flag(synth, "out-tx", out_tx, "Output transactions.csv")->required();
  flag(synth, "out-prices", out_prices, "Output prices.csv")->required();
  add_common(synth, common);

  // features
  auto* features = app.add_subcommand("features", "Per-day k-order occurrence features");
  std::string feat_tx, feat_out, feat_prices, dump_graph;
  int feat_k = 2, feat_horizon = 1;
  flag(features, "tx", feat_tx, "transactions.csv")->required();
  flag(features, "k", feat_k, "Max subgraph order s");
  flag(features, "out", feat_out, "Output CSV")->required();
  flag(features, "prices", feat_prices, "With prices, write the supervised dataset instead");
  flag(features, "horizon", feat_horizon, "Dataset target horizon (with --prices)");
  flag(features, "dump-graph", dump_graph, "Write per-day adjacency listings to this file");
  add_common(features, common);

  // train
  auto* train = app.add_subcommand("train", "Fit the offset models and save the ensemble");
  std::string train_out, train_until;
  add_pipeline(train, pipe, false);
  flag(train, "until", train_until, "Only use targets dated before this day (default: all)");
  flag(train, "out", train_out, "Output model JSON")->required();
  add_common(train, common);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Predict one day's price from a saved ensemble");
  std::string model_file, pred_tx, pred_prices, pred_date;
  flag(predict_cmd, "model-file", model_file, "Ensemble JSON from `train`")->required();
  flag(predict_cmd, "tx", pred_tx, "transactions.csv")->required();
  flag(predict_cmd, "prices", pred_prices, "prices.csv")->required();
  flag(predict_cmd, "date", pred_date, "Day to predict (YYYY-MM-DD)")->required();
  add_common(predict_cmd, common);

  // backtest
  auto* backtest = app.add_subcommand("backtest", "Chronological train/test evaluation");
  std::string report_out, report_csv;
  add_pipeline(backtest, pipe, true);
  flag(backtest, "out", report_out, "Report JSON path (stdout when empty)");
  flag(backtest, "csv", report_csv, "Per-day date,true,predicted CSV path");
  add_common(backtest, common);

  // sweeps
  auto* sweep_h = app.add_subcommand("sweep-horizon", "Single-model backtests across horizons");
  std::vector<int> horizons{1, 2, 3, 4, 5, 6, 7};
  std::string sweep_out;
  add_pipeline(sweep_h, pipe, true);
  flag(sweep_h, "horizons", horizons, "Comma-separated horizons")->delimiter(',');
  flag(sweep_h, "out", sweep_out, "Sweep JSON path");
  add_common(sweep_h, common);

  auto* sweep_w = app.add_subcommand("sweep-window", "Backtests across history window sizes");
  std::vector<int> windows{1, 2, 3, 4, 5};
  add_pipeline(sweep_w, pipe, true);
  flag(sweep_w, "windows", windows, "Comma-separated window sizes")->delimiter(',');
  flag(sweep_w, "out", sweep_out, "Sweep JSON path");
  add_common(sweep_w, common);

  // weights
  auto* weights = app.add_subcommand("weights", "Print the decay weights alpha_1..alpha_window");
  double w_r = 0.8;
  int w_window = 1;
  flag(weights, "r", w_r, "Decay r in (0,1)");
  flag(weights, "window", w_window, "History window h'");
  add_common(weights, common);

  // oracle-check
  auto* oracle = app.add_subcommand("oracle-check", "Compare matrix and traversal occurrence counts per day");
  std::string oracle_tx;
  int oracle_k = 4;
  flag(oracle, "tx", oracle_tx, "transactions.csv")->required();
  flag(oracle, "k", oracle_k, "Check orders 1..k");
  add_common(oracle, common);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (synth->parsed()) {
      sspec.seed = common.seed;
      sspec.price_model = parse_price_model(price_model);
      if (!synth_interval.empty()) {
        const auto preset = interval_preset(synth_interval);
        sspec.start_date = *preset.start;
        sspec.days = static_cast<int>((*preset.end - *preset.start).count());
      } else {
        const auto d = parse_date(start_date);
        if (!d) throw Error(ErrorCode::UnparseableDate, start_date);
        sspec.start_date = *d;
      }
      const auto generated = generate(sspec);
      write_synth(generated, out_tx, out_prices);
      out << "wrote " << generated.transactions.size() << " transactions over " << sspec.days << " days\n";
      return 0;
    }

    if (features->parsed()) {
      const auto records = parse_transactions(feat_tx);
      const auto windows = partition_daily(records);
      if (!dump_graph.empty()) {
        std::ofstream dump(dump_graph);
        if (!dump) throw Error(ErrorCode::MissingFile, "cannot write " + dump_graph);
        for (const auto& w : windows) {
          dump << "# " << format_date(w.date) << '\n';
          build_graph(w).dump(dump);
        }
      }
      const auto daily = extract_daily_features(windows, feat_k, common.threads);
      std::ostringstream text;
      if (feat_prices.empty())
        write_feature_csv(text, daily);
      else
        write_dataset_csv(text, build_dataset(daily, parse_prices(feat_prices), feat_horizon));
      write_text(feat_out, text.str(), out);
      return 0;
    }

    if (train->parsed()) {
      auto config = make_config(pipe, common);
      const auto records = parse_transactions(pipe.tx_path);
      const auto prices = parse_prices(pipe.price_path);
      const auto windows = partition_daily(records);
      if (windows.empty()) throw Error(ErrorCode::InsufficientData, "no transactions");
      const auto daily = extract_daily_features(windows, config.max_order, config.threads);
      std::vector<double> closes;
      for (const auto& d : daily.dates) {
        const auto c = prices.close_on(d);
        if (!c) throw Error(ErrorCode::PriceMissing, format_date(d));
        closes.push_back(*c);
      }
      std::size_t limit = closes.size();
      if (!train_until.empty()) {
        const auto until = parse_date(train_until);
        if (!until) throw Error(ErrorCode::UnparseableDate, train_until);
        limit = static_cast<std::size_t>(std::lower_bound(daily.dates.begin(), daily.dates.end(), *until) -
                                         daily.dates.begin());
      }
      HorizonEnsemble ensemble;
      ensemble.max_order = config.max_order;
      ensemble.weights = decay_weights(config.r, config.window);
      for (int j = 0; j < config.window; ++j)
        ensemble.models.push_back(train_offset_model(daily, closes, config.horizon + j, config.model, limit));
      save_ensemble(train_out, ensemble);
      out << "trained " << ensemble.models.size() << " offset model(s) -> " << train_out << '\n';
      return 0;
    }

    if (predict_cmd->parsed()) {
      const auto ensemble = load_ensemble(model_file);
      const auto records = parse_transactions(pred_tx);
      const auto prices = parse_prices(pred_prices);
      const auto target = parse_date(pred_date);
      if (!target) throw Error(ErrorCode::UnparseableDate, pred_date);
      const auto windows = partition_daily(records);
      const auto daily = extract_daily_features(windows, ensemble.max_order, common.threads);
      std::map<int, std::vector<double>> feats;
      std::map<int, double> bases;
      for (const auto& m : ensemble.models) {
        const Day day = *target - std::chrono::days(m.offset);
        const auto idx = daily.index_of(day);
        const auto base = prices.close_on(day);
        if (!idx || !base) throw Error(ErrorCode::MissingOffset, "offset " + std::to_string(m.offset) +
                                                                     " needs data for " + format_date(day));
        feats.emplace(m.offset, daily.vectors[*idx]);
        bases.emplace(m.offset, *base);
      }
      const auto prediction = predict_price(ensemble, feats, bases);
      const double latest = bases.at(ensemble.first_offset());
      nlohmann::json j{{"date", pred_date},
                       {"predicted", prediction.price},
                       {"estimates", prediction.estimates},
                       {"base", latest},
                       {"trend", prediction.price > latest ? 1 : -1}};
      out << j.dump() << '\n';
      return 0;
    }

    if (backtest->parsed()) {
      const auto config = make_config(pipe, common);
      const auto started = std::chrono::steady_clock::now();
      const auto report =
          run_backtest(parse_transactions(pipe.tx_path), parse_prices(pipe.price_path), config);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      write_text(report_out, report_to_json(report).dump(2) + "\n", out);
      if (!report_csv.empty()) {
        std::ostringstream csv;
        write_report_csv(csv, report);
        write_text(report_csv, csv.str(), out);
      }
      if (!report_out.empty() && report_out != "-") {
        out << "interval      " << report.config.split.interval_name << '\n'
            << "k / r / h'    " << config.max_order << " / " << config.r << " / " << config.window << '\n'
            << "test days     " << report.records.size() << " (skipped " << report.skipped_days << ")\n"
            << "MAPE          " << format_mape(report.mape) << '\n'
            << "trend acc.    " << report.trend_accuracy << '\n'
            << "runtime       " << seconds << " s\n";
      }
      return 0;
    }

    if (sweep_h->parsed() || sweep_w->parsed()) {
      const bool by_horizon = sweep_h->parsed();
      const auto config = make_config(pipe, common);
      const auto data = prepare_backtest(parse_transactions(pipe.tx_path), parse_prices(pipe.price_path),
                                         config.split, config.max_order, config.threads);
      const auto points = by_horizon ? horizon_sweep(data, config, horizons) : window_sweep(data, config, windows);
      nlohmann::json j{{"schema_version", kReportSchemaVersion}, {"sweep", by_horizon ? "horizon" : "window"}};
      j["points"] = nlohmann::json::array();
      out << (by_horizon ? "horizon" : "window") << "  MAPE\n";
      for (const auto& p : points) {
        out << std::setw(7) << p.value << "  " << format_mape(p.mape) << '\n';
        j["points"].push_back({{"value", p.value}, {"mape", p.mape}, {"alphas", p.report.weights.alphas}});
      }
      if (!sweep_out.empty()) write_text(sweep_out, j.dump(2) + "\n", out);
      return 0;
    }

    if (weights->parsed()) return cmd_weights(w_r, w_window, out);

    if (oracle->parsed()) {
      if (oracle_k < 1) throw Error(ErrorCode::OrderOutOfRange, "k must be >= 1");
      const auto windows = partition_daily(parse_transactions(oracle_tx));
      std::size_t mismatches = 0;
      for (const auto& w : windows) {
        const auto graph = build_graph(w);
        const auto fast = occurrence_matrices(graph, oracle_k, common.threads);
        for (int k = 1; k <= oracle_k; ++k) {
          if (fast[static_cast<std::size_t>(k - 1)] == occurrence_matrix_oracle(graph, k)) continue;
          ++mismatches;
          out << "MISMATCH " << format_date(w.date) << " k=" << k << '\n';
        }
      }
      out << windows.size() << " day(s), orders 1.." << oracle_k << ": "
          << (mismatches == 0 ? "all equal" : std::to_string(mismatches) + " mismatch(es)") << '\n';
      return mismatches == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace txmotif
