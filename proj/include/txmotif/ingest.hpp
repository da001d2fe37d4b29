#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace txmotif {

/// Calendar day in UTC.
using Day = std::chrono::sys_days;

std::optional<Day> parse_date(std::string_view text);
std::string format_date(Day day);
Day day_of_timestamp(std::int64_t unix_seconds);

struct TransactionRecord {
  std::string tx_id;
  std::int64_t timestamp = 0;  // seconds since epoch, UTC
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  // Block-reward transactions carry no inputs.
  bool is_coinbase() const noexcept { return inputs.empty(); }

  friend bool operator==(const TransactionRecord&, const TransactionRecord&) = default;
};

struct PricePoint {
  Day date;
  double close = 0.0;

  friend bool operator==(const PricePoint&, const PricePoint&) = default;
};

/// Daily closing prices, gap-free between first and last date.
class PriceSeries {
 public:
  PriceSeries() = default;
  /// Sorts, validates and forward-fills. Throws NonPositivePrice or
  /// MalformedRow on duplicate dates.
  explicit PriceSeries(std::vector<PricePoint> points);

  std::span<const PricePoint> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  Day first_date() const;
  Day last_date() const;

  /// Close on `day`, or nullopt outside [first_date, last_date].
  std::optional<double> close_on(Day day) const;

 private:
  std::vector<PricePoint> entries_;
};

struct DayWindow {
  Day date;
  std::vector<TransactionRecord> transactions;
};

std::vector<TransactionRecord> parse_transactions(const std::filesystem::path& path);
std::vector<TransactionRecord> parse_transactions(std::istream& in);
void write_transactions(std::ostream& out, std::span<const TransactionRecord> records);

PriceSeries parse_prices(const std::filesystem::path& path);
PriceSeries parse_prices(std::istream& in);
void write_prices(std::ostream& out, const PriceSeries& prices);

/// Groups records by UTC day. Covers every day from the earliest to the
/// latest record; days without records yield empty windows.
std::vector<DayWindow> partition_daily(std::span<const TransactionRecord> records);

/// Same grouping but over the fixed day range [first, end). Records outside
/// the range are dropped.
std::vector<DayWindow> partition_range(std::span<const TransactionRecord> records, Day first, Day end);

}  // namespace txmotif
