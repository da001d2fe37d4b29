#include "txmotif/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "txmotif/error.hpp"
#include "text_util.hpp"

namespace txmotif {
namespace {

using detail::format_double;
using detail::split;
using detail::strip_cr;

constexpr std::string_view kTxHeader = "tx_id,timestamp,inputs,outputs";
constexpr std::string_view kPriceHeader = "date,close";

[[noreturn]] void malformed(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": " + reason);
}

std::vector<std::string> parse_address_list(std::string_view field, std::size_t line, const char* what) {
  std::vector<std::string> out;
  if (field.empty()) return out;
  for (auto token : split(field, ';')) {
    if (token.empty()) malformed(line, std::string("empty address in ") + what);
    out.emplace_back(token);
  }
  return out;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(sep);
    out += items[i];
  }
  return out;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  return in;
}

std::vector<DayWindow> bucket(std::span<const TransactionRecord> records, Day first, Day end) {
  std::vector<DayWindow> windows;
  if (end <= first) return windows;
  const auto count = static_cast<std::size_t>((end - first).count());
  windows.resize(count);
  for (std::size_t i = 0; i < count; ++i) windows[i].date = first + std::chrono::days(i);
  for (const auto& record : records) {
    const Day day = day_of_timestamp(record.timestamp);
    if (day < first || day >= end) continue;
    windows[static_cast<std::size_t>((day - first).count())].transactions.push_back(record);
  }
  return windows;
}

}  // namespace

std::optional<Day> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  auto read = [&](std::size_t off, std::size_t len, auto& value) {
    auto [ptr, ec] = std::from_chars(text.data() + off, text.data() + off + len, value);
    return ec == std::errc{} && ptr == text.data() + off + len;
  };
  if (!read(0, 4, y) || !read(5, 2, m) || !read(8, 2, d)) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return Day{ymd};
}

std::string format_date(Day day) {
  const std::chrono::year_month_day ymd{day};
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf.data();
}

Day day_of_timestamp(std::int64_t unix_seconds) {
  return std::chrono::floor<std::chrono::days>(std::chrono::sys_seconds{std::chrono::seconds{unix_seconds}});
}

PriceSeries::PriceSeries(std::vector<PricePoint> points) {
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].close > 0.0) || !std::isfinite(points[i].close))
      throw Error(ErrorCode::NonPositivePrice, format_date(points[i].date));
    if (i > 0 && points[i].date == points[i - 1].date)
      throw Error(ErrorCode::MalformedRow, "duplicate price date " + format_date(points[i].date));
  }
  for (const auto& point : points) {
    // Carry the last close forward across missing days; never look ahead.
    while (!entries_.empty() && entries_.back().date + std::chrono::days(1) < point.date)
      entries_.push_back({entries_.back().date + std::chrono::days(1), entries_.back().close});
    entries_.push_back(point);
  }
}

Day PriceSeries::first_date() const {
  if (entries_.empty()) throw Error(ErrorCode::EmptyInput, "price series is empty");
  return entries_.front().date;
}

Day PriceSeries::last_date() const {
  if (entries_.empty()) throw Error(ErrorCode::EmptyInput, "price series is empty");
  return entries_.back().date;
}

std::optional<double> PriceSeries::close_on(Day day) const {
  if (entries_.empty() || day < entries_.front().date || day > entries_.back().date) return std::nullopt;
  return entries_[static_cast<std::size_t>((day - entries_.front().date).count())].close;
}

std::vector<TransactionRecord> parse_transactions(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_transactions(in);
}

std::vector<TransactionRecord> parse_transactions(std::istream& in) {
  std::vector<TransactionRecord> records;
  std::unordered_map<std::string, std::size_t> seen;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (!header_seen) {
      if (line != kTxHeader) malformed(line_no, "expected header '" + std::string(kTxHeader) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 4) malformed(line_no, "expected 4 fields, got " + std::to_string(fields.size()));

    TransactionRecord record;
    record.tx_id = std::string(fields[0]);
    if (record.tx_id.empty()) malformed(line_no, "empty tx_id");
    const auto ts = fields[1];
    auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), record.timestamp);
    if (ts.empty() || ec != std::errc{} || ptr != ts.data() + ts.size())
      malformed(line_no, "bad timestamp '" + std::string(ts) + "'");
    record.inputs = parse_address_list(fields[2], line_no, "inputs");
    record.outputs = parse_address_list(fields[3], line_no, "outputs");
    if (record.outputs.empty()) malformed(line_no, "transaction has no outputs");

    auto [it, inserted] = seen.emplace(record.tx_id, line_no);
    if (!inserted)
      throw Error(ErrorCode::DuplicateTxId, "'" + record.tx_id + "' on lines " + std::to_string(it->second) +
                                                " and " + std::to_string(line_no));
    records.push_back(std::move(record));
  }
  if (!header_seen) malformed(1, "missing header");
  return records;
}

void write_transactions(std::ostream& out, std::span<const TransactionRecord> records) {
  out << kTxHeader << '\n';
  for (const auto& r : records)
    out << r.tx_id << ',' << r.timestamp << ',' << join(r.inputs, ';') << ',' << join(r.outputs, ';') << '\n';
}

PriceSeries parse_prices(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_prices(in);
}

PriceSeries parse_prices(std::istream& in) {
  std::vector<PricePoint> points;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (!header_seen) {
      if (line != kPriceHeader) malformed(line_no, "expected header '" + std::string(kPriceHeader) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 2) malformed(line_no, "expected 2 fields, got " + std::to_string(fields.size()));
    const auto date = parse_date(fields[0]);
    if (!date) throw Error(ErrorCode::UnparseableDate, "line " + std::to_string(line_no) + ": '" +
                                                          std::string(fields[0]) + "'");
    const auto close = detail::parse_double(fields[1]);
    if (!close) malformed(line_no, "bad close '" + std::string(fields[1]) + "'");
    points.push_back({*date, *close});
  }
  if (!header_seen) malformed(1, "missing header");
  return PriceSeries(std::move(points));
}

void write_prices(std::ostream& out, const PriceSeries& prices) {
  out << kPriceHeader << '\n';
  for (const auto& p : prices.entries()) out << format_date(p.date) << ',' << format_double(p.close) << '\n';
}

std::vector<DayWindow> partition_daily(std::span<const TransactionRecord> records) {
  if (records.empty()) return {};
  auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                      [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  return bucket(records, day_of_timestamp(lo->timestamp), day_of_timestamp(hi->timestamp) + std::chrono::days(1));
}

std::vector<DayWindow> partition_range(std::span<const TransactionRecord> records, Day first, Day end) {
  return bucket(records, first, end);
}

}  // namespace txmotif
