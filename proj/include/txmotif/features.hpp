#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "txmotif/ingest.hpp"

namespace txmotif {

/// Per-day k-order feature vectors, one entry per window in date order.
struct DailyFeatures {
  int max_order = 1;
  std::vector<Day> dates;
  std::vector<std::vector<double>> vectors;

  /// Index of `day`, or nullopt if the day is not covered.
  std::optional<std::size_t> index_of(Day day) const;
};

/// Builds each window's graph and concatenated OC^1..OC^s in parallel.
DailyFeatures extract_daily_features(std::span<const DayWindow> windows, int max_order, unsigned threads = 0);

struct FeatureRow {
  Day date;
  std::vector<double> x;
  double base_price = 0.0;               // P_t
  std::optional<double> target_diff;     // P_{t+h} - P_t when P_{t+h} is known
  int horizon = 1;
};

/// Per-column z-score parameters (population standard deviation).
struct Scaler {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t dimension() const noexcept { return mean.size(); }
  /// Zero-variance columns map to 0. Throws DimensionMismatch.
  std::vector<double> apply(std::span<const double> x) const;
};

Scaler fit_scaler(std::span<const FeatureRow> train_rows);
Scaler fit_scaler(std::span<const std::vector<double>> train_vectors);
std::vector<FeatureRow> apply_scaler(const Scaler& scaler, std::span<const FeatureRow> rows);

struct Dataset {
  int horizon = 1;
  int max_order = 1;
  std::vector<FeatureRow> rows;    // strictly increasing dates
  std::optional<Scaler> scaler;    // fitted on rows dated before the split

  std::size_t dimension() const noexcept { return rows.empty() ? 0 : rows.front().x.size(); }
};

/// One row per feature day; throws PriceMissing when P_t is unavailable.
Dataset build_dataset(const DailyFeatures& features, const PriceSeries& prices, int horizon);
Dataset build_dataset(std::span<const DayWindow> windows, const PriceSeries& prices, int horizon, int max_order,
                      unsigned threads = 0);

/// Fits the dataset scaler on rows dated strictly before `first_test_date`.
void fit_training_scaler(Dataset& dataset, Day first_test_date);

/// `date,f_0..f_{N-1}`
void write_feature_csv(std::ostream& out, const DailyFeatures& features);
/// `date,base_price,target_diff,f_0..f_{N-1}`; an empty target means prediction-only.
void write_dataset_csv(std::ostream& out, const Dataset& dataset);
Dataset read_dataset_csv(std::istream& in, int horizon);

}  // namespace txmotif
