#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "txmotif/ensemble.hpp"
#include "txmotif/features.hpp"
#include "txmotif/ingest.hpp"
#include "txmotif/regress.hpp"

namespace txmotif {

/// Chronological split: the first train_fraction of days train, the rest test.
/// With a date range set, only days in [start, end) are used.
struct SplitSpec {
  double train_fraction = 0.8;
  std::string interval_name = "custom";
  std::optional<Day> start;
  std::optional<Day> end;
};

/// "interval1": 2013-08-19..2016-07-19, 80/20. "interval2": 2013-04-01..2017-04-01, 70/30.
/// Throws BadSpec for other names.
SplitSpec interval_preset(std::string_view name);

struct BacktestConfig {
  SplitSpec split;
  int max_order = 2;
  double r = 0.8;
  int window = 1;
  int horizon = 1;  // offset of the nearest ensemble member
  RegressorSpec model;
  unsigned threads = 0;
};

/// Day features and prices over the evaluation range, computed once and
/// shared by every model and sweep point.
struct PreparedData {
  SplitSpec split;
  DailyFeatures features;
  std::vector<double> closes;  // P_t aligned with features.dates
  std::size_t first_test = 0;  // index of the first test day
  std::size_t transactions = 0;
  std::size_t coinbase = 0;

  std::size_t day_count() const noexcept { return features.dates.size(); }
  Day first_test_date() const { return features.dates.at(first_test); }
};

/// Throws InsufficientData when either side of the split is empty and
/// PriceMissing when a day in range has no price.
PreparedData prepare_backtest(std::span<const TransactionRecord> records, const PriceSeries& prices,
                              const SplitSpec& split, int max_order, unsigned threads = 0);

/// Fits the model for one offset on days d with d + offset < limit, so both
/// the feature day and the target day precede day index `limit`.
/// Throws InsufficientData with fewer than 2 such days.
OffsetModel train_offset_model(const DailyFeatures& features, std::span<const double> closes, int offset,
                               const RegressorSpec& spec, std::size_t limit);

/// Offset models keyed by offset; valid for a single PreparedData and spec.
using ModelCache = std::map<int, OffsetModel>;

HorizonEnsemble train_ensemble(const PreparedData& data, const BacktestConfig& config, ModelCache* cache = nullptr);

struct DayRecord {
  Day date;
  double truth = 0.0;
  double predicted = 0.0;
  double base_price = 0.0;  // P_{t'-h}, the latest price known at prediction time
  std::vector<double> estimates;
};

struct ModelSummary {
  int offset = 1;
  std::size_t train_rows = 0;
  Day train_first;
  Day train_last;
  Day last_target_date;  // train_last + offset
};

struct BacktestReport {
  BacktestConfig config;
  EnsembleWeights weights;
  Day train_first;
  Day first_test;
  Day last_day;
  std::vector<ModelSummary> models;
  std::vector<DayRecord> records;
  double mape = 0.0;            // percent
  double trend_accuracy = 0.0;  // fraction in [0, 1]
  std::size_t skipped_days = 0;
  std::size_t day_count = 0;
  std::size_t transactions = 0;
  std::size_t coinbase = 0;
};

/// Mean of |pred - truth| / truth, as a percentage.
/// Throws LengthMismatch, EmptyInput, NonPositiveTruth.
double mape(std::span<const double> predicted, std::span<const double> truth);

/// +1 where predicted > base, -1 otherwise. Throws LengthMismatch.
std::vector<int> trend_labels(std::span<const double> predicted, std::span<const double> base);

BacktestReport evaluate(const PreparedData& data, const BacktestConfig& config, ModelCache* cache = nullptr);
BacktestReport run_backtest(std::span<const TransactionRecord> records, const PriceSeries& prices,
                            const BacktestConfig& config);

struct SweepPoint {
  int value = 0;  // horizon or window
  double mape = 0.0;
  BacktestReport report;
};

/// Single-model backtests, one per horizon.
std::vector<SweepPoint> horizon_sweep(const PreparedData& data, const BacktestConfig& config,
                                      std::span<const int> horizons);
/// One backtest per window size; offset models are shared across sizes.
std::vector<SweepPoint> window_sweep(const PreparedData& data, const BacktestConfig& config,
                                     std::span<const int> windows);

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json report_to_json(const BacktestReport& report);
/// `date,true,predicted`
void write_report_csv(std::ostream& out, const BacktestReport& report);

}  // namespace txmotif
