#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "txmotif/error.hpp"
#include "txmotif/features.hpp"
#include "txmotif/korder.hpp"

namespace txmotif {
namespace {

const Day kStart = *parse_date("2020-03-01");

std::vector<DayWindow> empty_windows(int days) {
  std::vector<DayWindow> w(static_cast<std::size_t>(days));
  for (int i = 0; i < days; ++i) w[static_cast<std::size_t>(i)].date = kStart + std::chrono::days(i);
  return w;
}

PriceSeries series(std::vector<double> closes) {
  std::vector<PricePoint> pts;
  for (std::size_t i = 0; i < closes.size(); ++i) pts.push_back({kStart + std::chrono::days(i), closes[i]});
  return PriceSeries(pts);
}

FeatureRow row_with(std::vector<double> x) { return {kStart, std::move(x), 1.0, std::nullopt, 1}; }

TEST(BuildDataset, PredictionOnlyTail) {
  const auto ds = build_dataset(empty_windows(10), series({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), 1, 1, 1);
  ASSERT_EQ(ds.rows.size(), 10u);
  std::size_t with_target = 0;
  for (const auto& r : ds.rows) with_target += r.target_diff ? 1 : 0;
  EXPECT_EQ(with_target, 9u);
  EXPECT_FALSE(ds.rows.back().target_diff);
  EXPECT_EQ(ds.dimension(), kFeaturesPerOrder);
}

TEST(BuildDataset, ConstantPricesGiveZeroTargets) {
  const auto ds = build_dataset(empty_windows(6), series(std::vector<double>(6, 42.0)), 2, 2, 1);
  for (const auto& r : ds.rows)
    if (r.target_diff) EXPECT_EQ(*r.target_diff, 0.0);
  EXPECT_EQ(ds.dimension(), 2 * kFeaturesPerOrder);
}

TEST(BuildDataset, HorizonTwoDifference) {
  const auto ds = build_dataset(empty_windows(3), series({100, 110, 121}), 2, 1, 1);
  ASSERT_TRUE(ds.rows[0].target_diff);
  EXPECT_DOUBLE_EQ(*ds.rows[0].target_diff, 21.0);
  EXPECT_EQ(ds.rows[0].base_price, 100.0);
  EXPECT_FALSE(ds.rows[1].target_diff);
}

TEST(BuildDataset, MissingBasePrice) {
  auto windows = empty_windows(3);
  std::vector<PricePoint> pts{{kStart + std::chrono::days(1), 5.0}, {kStart + std::chrono::days(2), 6.0}};
  try {
    build_dataset(windows, PriceSeries(pts), 1, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PriceMissing);
    EXPECT_NE(std::string(e.what()).find("2020-03-01"), std::string::npos);
  }
}

TEST(BuildDataset, FeaturesComeFromTheDayGraph) {
  auto windows = empty_windows(2);
  windows[1].transactions = testing::toy_graph_records();
  const auto ds = build_dataset(windows, series({1, 2}), 1, 2, 2);
  const auto expected = feature_vector(build_graph(windows[1]), 2);
  EXPECT_EQ(ds.rows[1].x, expected);
}

TEST(Scaler, ZeroVarianceColumnMapsToZero) {
  const std::vector<FeatureRow> rows{row_with({5, 0}), row_with({5, 10})};
  const auto s = fit_scaler(std::span<const FeatureRow>(rows));
  const auto scaled = apply_scaler(s, rows);
  EXPECT_EQ(scaled[0].x[0], 0.0);
  EXPECT_EQ(scaled[1].x[0], 0.0);
  // Column [0, 10]: mean 5, population sd 5.
  EXPECT_DOUBLE_EQ(s.mean[1], 5.0);
  EXPECT_DOUBLE_EQ(s.stddev[1], 5.0);
  EXPECT_DOUBLE_EQ(scaled[0].x[1], -1.0);
  EXPECT_DOUBLE_EQ(scaled[1].x[1], 1.0);
}

TEST(Scaler, SelfApplicationCentres) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(3.0, 50.0);
  std::vector<FeatureRow> rows;
  for (int i = 0; i < 37; ++i) rows.push_back(row_with({noise(rng), noise(rng) * 1e4, 7.0}));
  const auto scaled = apply_scaler(fit_scaler(std::span<const FeatureRow>(rows)), rows);
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0.0;
    for (const auto& r : scaled) mean += r.x[j];
    EXPECT_NEAR(mean / static_cast<double>(scaled.size()), 0.0, 1e-9);
  }
}

TEST(Scaler, Errors) {
  const std::vector<FeatureRow> one{row_with({1})};
  try {
    fit_scaler(std::span<const FeatureRow>(one));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewRows);
  }
  const std::vector<FeatureRow> two{row_with({1}), row_with({2})};
  EXPECT_THROW(fit_scaler(std::span<const FeatureRow>(two)).apply(std::vector<double>{1, 2}), Error);
}

TEST(Dataset, TrainingScalerIgnoresTestRows) {
  auto ds = build_dataset(empty_windows(4), series({1, 2, 3, 4}), 1, 1, 1);
  ds.rows[3].x[0] = 1000.0;  // only in the test portion
  ds.rows[1].x[0] = 2.0;
  fit_training_scaler(ds, kStart + std::chrono::days(3));
  ASSERT_TRUE(ds.scaler);
  EXPECT_DOUBLE_EQ(ds.scaler->mean[0], 2.0 / 3.0);
}

TEST(DatasetCsv, ExportImport) {
  auto windows = empty_windows(3);
  windows[0].transactions = testing::toy_graph_records();
  const auto ds = build_dataset(windows, series({10.5, 11.25, 9.0}), 1, 2, 1);
  std::ostringstream out;
  write_dataset_csv(out, ds);
  std::istringstream in(out.str());
  const auto back = read_dataset_csv(in, 1);
  ASSERT_EQ(back.rows.size(), ds.rows.size());
  EXPECT_EQ(back.max_order, 2);
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].date, ds.rows[i].date);
    EXPECT_EQ(back.rows[i].x, ds.rows[i].x);
    EXPECT_EQ(back.rows[i].base_price, ds.rows[i].base_price);
    EXPECT_EQ(back.rows[i].target_diff, ds.rows[i].target_diff);
  }
}

TEST(FeatureCsv, HeaderAndWidth) {
  auto windows = empty_windows(2);
  windows[0].transactions = testing::toy_graph_records();
  const auto daily = extract_daily_features(windows, 2, 1);
  std::ostringstream out;
  write_feature_csv(out, daily);
  std::istringstream in(out.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 800);
  EXPECT_EQ(header.substr(0, 13), "date,f_0,f_1,");
  EXPECT_EQ(first.substr(0, 10), "2020-03-01");
  EXPECT_EQ(std::count(first.begin(), first.end(), ','), 800);
}

TEST(DailyFeatures, ThreadCountInvariant) {
  std::mt19937_64 rng(31);
  auto windows = empty_windows(12);
  for (auto& w : windows) w.transactions = testing::random_records(rng, 60, 90);
  const auto one = extract_daily_features(windows, 3, 1);
  EXPECT_EQ(extract_daily_features(windows, 3, 5).vectors, one.vectors);
}

}  // namespace
}  // namespace txmotif
