#include "txmotif/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "text_util.hpp"
#include "txmotif/error.hpp"
#include "txmotif/korder.hpp"
#include "txmotif/parallel.hpp"
#include "txmotif/txgraph.hpp"

namespace txmotif {

std::optional<std::size_t> DailyFeatures::index_of(Day day) const {
  auto it = std::lower_bound(dates.begin(), dates.end(), day);
  if (it == dates.end() || *it != day) return std::nullopt;
  return static_cast<std::size_t>(it - dates.begin());
}

DailyFeatures extract_daily_features(std::span<const DayWindow> windows, int max_order, unsigned threads) {
  if (max_order < 1) throw Error(ErrorCode::OrderOutOfRange, "max order must be >= 1");
  DailyFeatures out;
  out.max_order = max_order;
  out.dates.reserve(windows.size());
  for (const auto& w : windows) {
    if (!out.dates.empty() && w.date <= out.dates.back())
      throw Error(ErrorCode::MalformedRow, "day windows must be strictly increasing");
    out.dates.push_back(w.date);
  }
  out.vectors.resize(windows.size());
  // Days are independent: each worker builds its own graph, one matrix thread each.
  parallel_for(windows.size(), threads,
               [&](std::size_t i) { out.vectors[i] = feature_vector(build_graph(windows[i]), max_order, 1); });
  return out;
}

std::vector<double> Scaler::apply(std::span<const double> x) const {
  if (x.size() != mean.size())
    throw Error(ErrorCode::DimensionMismatch,
                "scaler expects " + std::to_string(mean.size()) + " columns, got " + std::to_string(x.size()));
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = stddev[j] > 0.0 ? (x[j] - mean[j]) / stddev[j] : 0.0;
  return out;
}

Scaler fit_scaler(std::span<const std::vector<double>> train_vectors) {
  if (train_vectors.size() < 2)
    throw Error(ErrorCode::TooFewRows, "scaler needs at least 2 rows, got " + std::to_string(train_vectors.size()));
  const std::size_t dim = train_vectors.front().size();
  Scaler s;
  s.mean.assign(dim, 0.0);
  s.stddev.assign(dim, 0.0);
  for (const auto& x : train_vectors) {
    if (x.size() != dim) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
    for (std::size_t j = 0; j < dim; ++j) s.mean[j] += x[j];
  }
  const double n = static_cast<double>(train_vectors.size());
  for (auto& m : s.mean) m /= n;
  for (const auto& x : train_vectors)
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = x[j] - s.mean[j];
      s.stddev[j] += d * d;
    }
  for (auto& v : s.stddev) v = std::sqrt(v / n);
  return s;
}

Scaler fit_scaler(std::span<const FeatureRow> train_rows) {
  std::vector<std::vector<double>> xs;
  xs.reserve(train_rows.size());
  for (const auto& r : train_rows) xs.push_back(r.x);
  return fit_scaler(xs);
}

std::vector<FeatureRow> apply_scaler(const Scaler& scaler, std::span<const FeatureRow> rows) {
  std::vector<FeatureRow> out(rows.begin(), rows.end());
  for (auto& r : out) r.x = scaler.apply(r.x);
  return out;
}

Dataset build_dataset(const DailyFeatures& features, const PriceSeries& prices, int horizon) {
  if (horizon < 1) throw Error(ErrorCode::BadWindow, "horizon must be >= 1");
  Dataset ds;
  ds.horizon = horizon;
  ds.max_order = features.max_order;
  ds.rows.reserve(features.dates.size());
  for (std::size_t i = 0; i < features.dates.size(); ++i) {
    const Day date = features.dates[i];
    const auto base = prices.close_on(date);
    if (!base) throw Error(ErrorCode::PriceMissing, format_date(date));
    FeatureRow row{date, features.vectors[i], *base, std::nullopt, horizon};
    if (const auto future = prices.close_on(date + std::chrono::days(horizon))) row.target_diff = *future - *base;
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

Dataset build_dataset(std::span<const DayWindow> windows, const PriceSeries& prices, int horizon, int max_order,
                      unsigned threads) {
  return build_dataset(extract_daily_features(windows, max_order, threads), prices, horizon);
}

void fit_training_scaler(Dataset& dataset, Day first_test_date) {
  std::vector<std::vector<double>> train;
  for (const auto& r : dataset.rows)
    if (r.date < first_test_date) train.push_back(r.x);
  dataset.scaler = fit_scaler(train);
}

namespace {

void write_feature_header(std::ostream& out, std::size_t dim) {
  for (std::size_t j = 0; j < dim; ++j) out << ",f_" << j;
  out << '\n';
}

void write_values(std::ostream& out, std::span<const double> x) {
  for (double v : x) out << ',' << detail::format_double(v);
  out << '\n';
}

}  // namespace

void write_feature_csv(std::ostream& out, const DailyFeatures& features) {
  out << "date";
  write_feature_header(out, kFeaturesPerOrder * static_cast<std::size_t>(features.max_order));
  for (std::size_t i = 0; i < features.dates.size(); ++i) {
    out << format_date(features.dates[i]);
    write_values(out, features.vectors[i]);
  }
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
  out << "date,base_price,target_diff";
  write_feature_header(out, kFeaturesPerOrder * static_cast<std::size_t>(dataset.max_order));
  for (const auto& r : dataset.rows) {
    out << format_date(r.date) << ',' << detail::format_double(r.base_price) << ',';
    if (r.target_diff) out << detail::format_double(*r.target_diff);
    write_values(out, r.x);
  }
}

Dataset read_dataset_csv(std::istream& in, int horizon) {
  Dataset ds;
  ds.horizon = horizon;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::strip_cr(raw);
    if (line.empty()) continue;
    const auto fields = detail::split(line, ',');
    if (line_no == 1) {
      if (fields.size() < 3 || fields[0] != "date" || fields[1] != "base_price" || fields[2] != "target_diff")
        throw fail("expected dataset header");
      dim = fields.size() - 3;
      if (dim % kFeaturesPerOrder != 0) throw fail("feature count is not a multiple of one order");
      ds.max_order = static_cast<int>(dim / kFeaturesPerOrder);
      continue;
    }
    if (fields.size() != dim + 3) throw fail("expected " + std::to_string(dim + 3) + " fields");
    FeatureRow row;
    row.horizon = horizon;
    const auto date = parse_date(fields[0]);
    if (!date) throw Error(ErrorCode::UnparseableDate, "line " + std::to_string(line_no));
    row.date = *date;
    const auto base = detail::parse_double(fields[1]);
    if (!base) throw fail("bad base_price");
    row.base_price = *base;
    if (!fields[2].empty()) {
      const auto target = detail::parse_double(fields[2]);
      if (!target) throw fail("bad target_diff");
      row.target_diff = *target;
    }
    row.x.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const auto v = detail::parse_double(fields[3 + j]);
      if (!v) throw fail("bad feature value");
      row.x.push_back(*v);
    }
    if (!ds.rows.empty() && row.date <= ds.rows.back().date) throw fail("dates must be strictly increasing");
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

}  // namespace txmotif
