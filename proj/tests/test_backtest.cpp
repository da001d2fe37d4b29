#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "txmotif/backtest.hpp"
#include "txmotif/error.hpp"
#include "txmotif/synth.hpp"

namespace txmotif {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorCode::BadSpec;
}

SynthOutput small_market(PriceModel model, int days = 120, std::uint64_t seed = 42) {
  SynthSpec s;
  s.days = days;
  s.tx_per_day = 60;
  s.seed = seed;
  s.price_model = model;
  return generate(s);
}

BacktestConfig quick_config() {
  BacktestConfig c;
  c.max_order = 2;
  c.model.ridge_lambda = 10.0;
  c.threads = 2;
  return c;
}

TEST(Mape, Examples) {
  EXPECT_DOUBLE_EQ(mape(std::vector<double>{100, 200}, std::vector<double>{100, 200}), 0.0);
  EXPECT_DOUBLE_EQ(mape(std::vector<double>{110}, std::vector<double>{100}), 10.0);
  EXPECT_NEAR(mape(std::vector<double>{90, 110}, std::vector<double>{100, 100}), 10.0, 1e-12);
}

TEST(Mape, Errors) {
  EXPECT_EQ(code_of([] { mape(std::vector<double>{}, std::vector<double>{}); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([] { mape(std::vector<double>{1, 2}, std::vector<double>{1}); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([] { mape(std::vector<double>{1}, std::vector<double>{0}); }), ErrorCode::NonPositiveTruth);
}

TEST(Mape, OrderInvariantAndNonNegative) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(1.0, 1000.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<double, double>> pairs(1 + trial);
    for (auto& [p, t] : pairs) p = u(rng), t = u(rng);
    auto split = [](const auto& v) {
      std::vector<double> p, t;
      for (auto [a, b] : v) p.push_back(a), t.push_back(b);
      return std::pair{p, t};
    };
    auto [p1, t1] = split(pairs);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    auto [p2, t2] = split(pairs);
    const double a = mape(p1, t1), b = mape(p2, t2);
    EXPECT_GE(a, 0.0);
    EXPECT_NEAR(a, b, 1e-9 * a);
  }
}

TEST(TrendLabels, UpDownAndTies) {
  EXPECT_EQ(trend_labels(std::vector<double>{5, 3, 4}, std::vector<double>{4, 4, 4}), (std::vector<int>{1, -1, -1}));
  EXPECT_THROW(trend_labels(std::vector<double>{1}, std::vector<double>{}), Error);
}

TEST(IntervalPreset, KnownNames) {
  const auto a = interval_preset("interval1");
  EXPECT_DOUBLE_EQ(a.train_fraction, 0.8);
  EXPECT_EQ(format_date(*a.start), "2013-08-19");
  EXPECT_EQ(format_date(*a.end), "2016-07-19");
  EXPECT_EQ((*a.end - *a.start).count(), 1065);
  const auto b = interval_preset("interval2");
  EXPECT_DOUBLE_EQ(b.train_fraction, 0.7);
  EXPECT_EQ((*b.end - *b.start).count(), 1461);
  EXPECT_EQ(code_of([] { interval_preset("interval3"); }), ErrorCode::BadSpec);
}

TEST(PrepareBacktest, SplitIndex) {
  const auto m = small_market(PriceModel::RandomWalk, 50);
  SplitSpec split;
  split.train_fraction = 0.8;
  const auto d = prepare_backtest(m.transactions, m.prices, split, 1, 1);
  EXPECT_EQ(d.day_count(), 50u);
  EXPECT_EQ(d.first_test, 40u);
  EXPECT_EQ(d.closes.size(), 50u);
  split.train_fraction = 0.01;  // no training day left
  EXPECT_EQ(code_of([&] { prepare_backtest(m.transactions, m.prices, split, 1, 1); }), ErrorCode::InsufficientData);
  split.train_fraction = 1.0;
  EXPECT_EQ(code_of([&] { prepare_backtest(m.transactions, m.prices, split, 1, 1); }), ErrorCode::BadSpec);
}

TEST(PrepareBacktest, DateRangeRestricts) {
  const auto m = small_market(PriceModel::RandomWalk, 50);
  SplitSpec split;
  split.start = m.prices.first_date() + std::chrono::days(10);
  split.end = m.prices.first_date() + std::chrono::days(30);
  const auto d = prepare_backtest(m.transactions, m.prices, split, 1, 1);
  EXPECT_EQ(d.day_count(), 20u);
  EXPECT_EQ(d.features.dates.front(), *split.start);
}

TEST(Backtest, RecoversPlantedSignal) {
  SynthSpec s;
  s.days = 300;
  s.tx_per_day = 150;
  s.price_model = PriceModel::PlantedLinear;
  const auto m = generate(s);
  auto c = quick_config();
  c.model.ridge_lambda = 1e-6;
  const auto report = run_backtest(m.transactions, m.prices, c);
  EXPECT_LT(report.mape, 0.1);
  EXPECT_GT(report.trend_accuracy, 0.9);
}

TEST(Backtest, NoTargetReachesTheTestPeriod) {
  const auto m = small_market(PriceModel::RandomWalk);
  for (int h : {1, 3}) {
    for (int w : {1, 4}) {
      auto c = quick_config();
      c.horizon = h;
      c.window = w;
      const auto report = run_backtest(m.transactions, m.prices, c);
      ASSERT_EQ(report.models.size(), static_cast<std::size_t>(w));
      for (const auto& ms : report.models) {
        EXPECT_LT(ms.last_target_date, report.first_test);
        EXPECT_EQ(ms.last_target_date, ms.train_last + std::chrono::days(ms.offset));
      }
      EXPECT_EQ(report.models.front().offset, h);
    }
  }
}

TEST(Backtest, WindowOneEstimateIsThePrediction) {
  const auto m = small_market(PriceModel::RandomWalk);
  const auto report = run_backtest(m.transactions, m.prices, quick_config());
  ASSERT_FALSE(report.records.empty());
  for (const auto& r : report.records) {
    ASSERT_EQ(r.estimates.size(), 1u);
    EXPECT_EQ(r.predicted, r.estimates[0]);
    EXPECT_EQ(r.truth, *m.prices.close_on(r.date));
    EXPECT_EQ(r.base_price, *m.prices.close_on(r.date - std::chrono::days(1)));
  }
  std::vector<double> p, t;
  for (const auto& r : report.records) p.push_back(r.predicted), t.push_back(r.truth);
  EXPECT_DOUBLE_EQ(report.mape, mape(p, t));
}

TEST(Backtest, PredictionsIntegrateEstimates) {
  const auto m = small_market(PriceModel::RandomWalk);
  auto c = quick_config();
  c.window = 3;
  const auto report = run_backtest(m.transactions, m.prices, c);
  for (const auto& r : report.records) EXPECT_NEAR(r.predicted, integrate(r.estimates, report.weights), 1e-9);
}

TEST(Backtest, DeterministicReport) {
  const auto m = small_market(PriceModel::RandomWalk);
  auto c = quick_config();
  c.window = 2;
  c.threads = 1;
  const auto a = report_to_json(run_backtest(m.transactions, m.prices, c)).dump();
  c.threads = 4;
  const auto b = report_to_json(run_backtest(m.transactions, m.prices, c)).dump();
  EXPECT_EQ(a, b);
}

TEST(Backtest, SvrRunsEndToEnd) {
  const auto m = small_market(PriceModel::RandomWalk, 80);
  auto c = quick_config();
  c.model.kind = RegressorKind::LinearSvr;
  c.model.svr_epochs = 20;
  const auto report = run_backtest(m.transactions, m.prices, c);
  EXPECT_GT(report.mape, 0.0);
  EXPECT_LT(report.mape, 100.0);
}

TEST(WindowSweep, SingletonMatchesPlainBacktest) {
  const auto m = small_market(PriceModel::RandomWalk);
  auto c = quick_config();
  const auto data = prepare_backtest(m.transactions, m.prices, c.split, c.max_order, c.threads);
  const std::vector<int> one{1};
  const auto sweep = window_sweep(data, c, one);
  ASSERT_EQ(sweep.size(), 1u);
  EXPECT_EQ(sweep[0].mape, run_backtest(m.transactions, m.prices, c).mape);
}

TEST(WindowSweep, TooWideWindow) {
  const auto m = small_market(PriceModel::RandomWalk, 30);
  auto c = quick_config();
  const auto data = prepare_backtest(m.transactions, m.prices, c.split, c.max_order, c.threads);
  const std::vector<int> huge{40};
  EXPECT_EQ(code_of([&] { window_sweep(data, c, huge); }), ErrorCode::InsufficientData);
}

TEST(HorizonSweep, EmptyListAndOrdering) {
  const auto m = small_market(PriceModel::RandomWalk);
  auto c = quick_config();
  const auto data = prepare_backtest(m.transactions, m.prices, c.split, c.max_order, c.threads);
  EXPECT_TRUE(horizon_sweep(data, c, std::vector<int>{}).empty());
  const std::vector<int> hs{3, 1};
  const auto sweep = horizon_sweep(data, c, hs);
  ASSERT_EQ(sweep.size(), 2u);
  EXPECT_EQ(sweep[0].value, 3);
  EXPECT_EQ(sweep[0].report.models.front().offset, 3);
}

TEST(Ensemble, DuplicatedModelMatchesSingle) {
  const auto m = small_market(PriceModel::RandomWalk);
  auto c = quick_config();
  const auto data = prepare_backtest(m.transactions, m.prices, c.split, c.max_order, c.threads);
  const auto single = train_offset_model(data.features, data.closes, 1, c.model, data.first_test);
  HorizonEnsemble dup{c.max_order, {}, decay_weights(0.99, 3)};
  for (int j = 1; j <= 3; ++j) {
    auto copy = single;
    copy.offset = j;
    dup.models.push_back(copy);
  }
  const std::size_t t = data.first_test + 5;
  std::map<int, std::vector<double>> f;
  std::map<int, double> b;
  for (int j = 1; j <= 3; ++j) {
    f[j] = data.features.vectors[t - 1];
    b[j] = data.closes[t - 1];
  }
  const double expected = data.closes[t - 1] + predict(single.model, single.scaler.apply(f[1]));
  EXPECT_NEAR(predict_price(dup, f, b).price, expected, 1e-9 * expected);
}

TEST(Report, CsvAndJsonShape) {
  const auto m = small_market(PriceModel::RandomWalk, 40);
  const auto report = run_backtest(m.transactions, m.prices, quick_config());
  std::ostringstream csv;
  write_report_csv(csv, report);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, 20), "date,true,predicted\n");
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')),
            report.records.size() + 1);
  const auto j = report_to_json(report);
  EXPECT_EQ(j.at("schema_version"), kReportSchemaVersion);
  EXPECT_TRUE(j.contains("mape"));
  EXPECT_EQ(j.at("records").size(), report.records.size());
}

}  // namespace
}  // namespace txmotif
