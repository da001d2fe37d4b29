#include "txmotif/backtest.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "text_util.hpp"
#include "txmotif/error.hpp"
#include "txmotif/parallel.hpp"

namespace txmotif {
namespace {

Day must_parse(std::string_view text) { return *parse_date(text); }

void check_config(const BacktestConfig& config) {
  if (config.window < 1) throw Error(ErrorCode::BadWindow, "window must be >= 1");
  if (config.horizon < 1) throw Error(ErrorCode::BadWindow, "horizon must be >= 1");
  if (config.max_order < 1) throw Error(ErrorCode::OrderOutOfRange, "k must be >= 1");
  config.model.validate();
}

}  // namespace

SplitSpec interval_preset(std::string_view name) {
  if (name == "interval1") return {0.8, "interval1", must_parse("2013-08-19"), must_parse("2016-07-19")};
  if (name == "interval2") return {0.7, "interval2", must_parse("2013-04-01"), must_parse("2017-04-01")};
  throw Error(ErrorCode::BadSpec, "unknown interval '" + std::string(name) + "'");
}

PreparedData prepare_backtest(std::span<const TransactionRecord> records, const PriceSeries& prices,
                              const SplitSpec& split, int max_order, unsigned threads) {
  if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0))
    throw Error(ErrorCode::BadSpec, "train fraction must lie in (0, 1)");
  if (split.start.has_value() != split.end.has_value())
    throw Error(ErrorCode::BadSpec, "interval needs both start and end");

  const auto windows = split.start ? partition_range(records, *split.start, *split.end) : partition_daily(records);
  PreparedData data;
  data.split = split;
  for (const auto& w : windows) {
    data.transactions += w.transactions.size();
    for (const auto& t : w.transactions) data.coinbase += t.is_coinbase() ? 1 : 0;
  }
  data.features = extract_daily_features(windows, max_order, threads);
  data.closes.reserve(windows.size());
  for (const auto& w : windows) {
    const auto close = prices.close_on(w.date);
    if (!close) throw Error(ErrorCode::PriceMissing, format_date(w.date));
    data.closes.push_back(*close);
  }
  const std::size_t n = data.day_count();
  data.first_test = static_cast<std::size_t>(std::floor(split.train_fraction * static_cast<double>(n)));
  if (data.first_test == 0 || data.first_test >= n)
    throw Error(ErrorCode::InsufficientData, std::to_string(n) + " days cannot form both a train and a test split");
  return data;
}

OffsetModel train_offset_model(const DailyFeatures& features, std::span<const double> closes, int offset,
                               const RegressorSpec& spec, std::size_t limit) {
  if (offset < 1) throw Error(ErrorCode::BadWindow, "offset must be >= 1");
  const auto off = static_cast<std::size_t>(offset);
  const std::size_t rows = limit > off ? limit - off : 0;
  if (rows < 2)
    throw Error(ErrorCode::InsufficientData,
                "offset " + std::to_string(offset) + " leaves " + std::to_string(rows) + " training rows");
  std::vector<FeatureRow> train;
  train.reserve(rows);
  for (std::size_t d = 0; d < rows; ++d)
    train.push_back({features.dates[d], features.vectors[d], closes[d], closes[d + off] - closes[d], offset});
  OffsetModel out;
  out.offset = offset;
  out.scaler = fit_scaler(std::span<const FeatureRow>(train));
  out.model = fit(spec, apply_scaler(out.scaler, train));
  return out;
}

HorizonEnsemble train_ensemble(const PreparedData& data, const BacktestConfig& config, ModelCache* cache) {
  check_config(config);
  HorizonEnsemble ensemble;
  ensemble.max_order = data.features.max_order;
  ensemble.weights = decay_weights(config.r, config.window);
  ensemble.models.resize(static_cast<std::size_t>(config.window));

  std::vector<std::size_t> missing;
  for (int j = 0; j < config.window; ++j) {
    const int offset = config.horizon + j;
    if (cache && cache->contains(offset))
      ensemble.models[static_cast<std::size_t>(j)] = cache->at(offset);
    else
      missing.push_back(static_cast<std::size_t>(j));
  }
  parallel_for(missing.size(), config.threads, [&](std::size_t i) {
    const std::size_t j = missing[i];
    ensemble.models[j] = train_offset_model(data.features, data.closes, config.horizon + static_cast<int>(j),
                                            config.model, data.first_test);
  });
  if (cache)
    for (std::size_t j : missing) cache->emplace(ensemble.models[j].offset, ensemble.models[j]);

  // No training row may see a date at or after the first test day.
  for (const auto& m : ensemble.models)
    if (!m.model.train_range || m.model.train_range->last + std::chrono::days(m.offset) >= data.first_test_date())
      throw std::logic_error("offset model trained on data at or after the test split");
  ensemble.validate();
  return ensemble;
}

double mape(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(predicted.size()) + " predictions vs " +
                                               std::to_string(truth.size()) + " truths");
  if (truth.empty()) throw Error(ErrorCode::EmptyInput, "MAPE of zero points");
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!(truth[i] > 0.0)) throw Error(ErrorCode::NonPositiveTruth, "index " + std::to_string(i));
    total += std::abs(predicted[i] - truth[i]) / truth[i];
  }
  return 100.0 * total / static_cast<double>(truth.size());
}

std::vector<int> trend_labels(std::span<const double> predicted, std::span<const double> base) {
  if (predicted.size() != base.size()) throw Error(ErrorCode::LengthMismatch, "trend label inputs differ in length");
  std::vector<int> labels(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) labels[i] = predicted[i] > base[i] ? 1 : -1;
  return labels;
}

BacktestReport evaluate(const PreparedData& data, const BacktestConfig& config, ModelCache* cache) {
  const HorizonEnsemble ensemble = train_ensemble(data, config, cache);
  const auto& dates = data.features.dates;

  BacktestReport report;
  report.config = config;
  report.config.split = data.split;
  report.config.max_order = data.features.max_order;
  report.weights = ensemble.weights;
  report.train_first = dates.front();
  report.first_test = data.first_test_date();
  report.last_day = dates.back();
  report.day_count = data.day_count();
  report.transactions = data.transactions;
  report.coinbase = data.coinbase;
  for (const auto& m : ensemble.models) {
    const auto rows = data.first_test - static_cast<std::size_t>(m.offset);
    report.models.push_back({m.offset, rows, m.model.train_range->first, m.model.train_range->last,
                             m.model.train_range->last + std::chrono::days(m.offset)});
  }

  for (std::size_t t = data.first_test; t < data.day_count(); ++t) {
    std::map<int, std::vector<double>> features;
    std::map<int, double> bases;
    bool complete = true;
    for (const auto& m : ensemble.models) {
      const auto off = static_cast<std::size_t>(m.offset);
      if (off > t) {
        complete = false;
        break;
      }
      features.emplace(m.offset, data.features.vectors[t - off]);
      bases.emplace(m.offset, data.closes[t - off]);
    }
    if (!complete) {
      ++report.skipped_days;
      continue;
    }
    auto prediction = predict_price(ensemble, features, bases);
    report.records.push_back({dates[t], data.closes[t], prediction.price, bases.at(config.horizon),
                              std::move(prediction.estimates)});
  }
  if (report.records.empty()) throw Error(ErrorCode::InsufficientData, "no evaluable test days");

  std::vector<double> pred, truth, base;
  for (const auto& r : report.records) {
    pred.push_back(r.predicted);
    truth.push_back(r.truth);
    base.push_back(r.base_price);
  }
  report.mape = mape(pred, truth);
  const auto predicted_labels = trend_labels(pred, base);
  const auto true_labels = trend_labels(truth, base);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += predicted_labels[i] == true_labels[i] ? 1 : 0;
  report.trend_accuracy = static_cast<double>(hits) / static_cast<double>(pred.size());
  return report;
}

BacktestReport run_backtest(std::span<const TransactionRecord> records, const PriceSeries& prices,
                            const BacktestConfig& config) {
  check_config(config);
  return evaluate(prepare_backtest(records, prices, config.split, config.max_order, config.threads), config);
}

std::vector<SweepPoint> horizon_sweep(const PreparedData& data, const BacktestConfig& config,
                                      std::span<const int> horizons) {
  std::vector<SweepPoint> out;
  ModelCache cache;  // a window-1 model at horizon h is the offset-h model
  for (int h : horizons) {
    BacktestConfig c = config;
    c.horizon = h;
    c.window = 1;
    auto report = evaluate(data, c, &cache);
    out.push_back({h, report.mape, std::move(report)});
  }
  return out;
}

std::vector<SweepPoint> window_sweep(const PreparedData& data, const BacktestConfig& config,
                                     std::span<const int> windows) {
  std::vector<SweepPoint> out;
  ModelCache cache;
  for (int w : windows) {
    BacktestConfig c = config;
    c.window = w;
    auto report = evaluate(data, c, &cache);
    out.push_back({w, report.mape, std::move(report)});
  }
  return out;
}

nlohmann::json report_to_json(const BacktestReport& report) {
  using nlohmann::json;
  const auto& c = report.config;
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["interval"] = c.split.interval_name;
  j["train_fraction"] = c.split.train_fraction;
  j["k"] = c.max_order;
  j["r"] = c.r;
  j["window"] = c.window;
  j["horizon"] = c.horizon;
  j["model"] = to_json(c.model);
  j["alphas"] = report.weights.alphas;
  j["train_first"] = format_date(report.train_first);
  j["first_test"] = format_date(report.first_test);
  j["last_day"] = format_date(report.last_day);
  j["mape"] = report.mape;
  j["trend_accuracy"] = report.trend_accuracy;
  j["evaluated_days"] = report.records.size();
  j["skipped_days"] = report.skipped_days;
  j["stats"] = {{"days", report.day_count}, {"transactions", report.transactions}, {"coinbase", report.coinbase}};
  j["models"] = json::array();
  for (const auto& m : report.models)
    j["models"].push_back({{"offset", m.offset},
                           {"train_rows", m.train_rows},
                           {"train_first", format_date(m.train_first)},
                           {"train_last", format_date(m.train_last)},
                           {"last_target_date", format_date(m.last_target_date)}});
  j["records"] = json::array();
  for (const auto& r : report.records)
    j["records"].push_back({{"date", format_date(r.date)},
                            {"true", r.truth},
                            {"predicted", r.predicted},
                            {"base", r.base_price},
                            {"estimates", r.estimates}});
  return j;
}

void write_report_csv(std::ostream& out, const BacktestReport& report) {
  out << "date,true,predicted\n";
  for (const auto& r : report.records)
    out << format_date(r.date) << ',' << detail::format_double(r.truth) << ',' << detail::format_double(r.predicted)
        << '\n';
}

}  // namespace txmotif
