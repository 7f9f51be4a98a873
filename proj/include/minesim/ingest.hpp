#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minesim/common.hpp"

namespace minesim::ingest {

/// One day of market data: BTC price in USD and network hash rate in TH/s.
struct MarketRecord {
  Date date;
  double price_usd = 0.0;
  double network_hashrate = 0.0;

  friend bool operator==(const MarketRecord&, const MarketRecord&) = default;
};

/// Date-ordered market records with strictly increasing dates.
struct MarketSeries {
  std::vector<MarketRecord> records;

  [[nodiscard]] bool empty() const { return records.empty(); }
  [[nodiscard]] std::size_t size() const { return records.size(); }
  [[nodiscard]] Date start() const { return records.front().date; }
  [[nodiscard]] Date end() const { return records.back().date; }
  /// Binary search by date; nullptr when absent.
  [[nodiscard]] const MarketRecord* find(Date d) const;
  [[nodiscard]] std::vector<double> prices() const;
  /// Records with from <= date <= to.
  [[nodiscard]] MarketSeries slice(Date from, Date to) const;

  friend bool operator==(const MarketSeries&, const MarketSeries&) = default;
};

struct SurplusRecord {
  std::string region;
  YearMonth month;
  std::int64_t households = 0;
  double surplus_kwh = 0.0;

  friend bool operator==(const SurplusRecord&, const SurplusRecord&) = default;
};

/// Surplus energy summed across every region for one month.
struct MonthlySurplusTotal {
  YearMonth month;
  double total_kwh = 0.0;
};

/// Months accepted by parse_surplus_csv; rows outside are dropped with a warning.
struct MonthWindow {
  YearMonth first{2021, 1};
  YearMonth last{2023, 12};
};

struct SurplusData {
  std::vector<SurplusRecord> records;
  std::vector<std::string> warnings;
};

struct FillResult {
  MarketSeries series;
  std::size_t filled = 0;
};

inline constexpr std::string_view kMarketHeader = "date,price_usd,network_hashrate_ths";
inline constexpr std::string_view kSurplusHeader = "region,month,households,surplus_kwh";

MarketSeries parse_market_csv(const std::filesystem::path& path);
MarketSeries parse_market_csv(std::istream& in, std::string_view source);
void write_market_csv(std::ostream& out, const MarketSeries& series);

SurplusData parse_surplus_csv(const std::filesystem::path& path, MonthWindow window = {});
SurplusData parse_surplus_csv(std::istream& in, std::string_view source, MonthWindow window = {});

/// Inserts every missing calendar day by carrying the previous day forward.
/// With `required_start`, the series must begin on that date.
FillResult fill_gaps(const MarketSeries& series, std::optional<Date> required_start = std::nullopt);

/// Sums surplus per month over all regions, in month order.
std::vector<MonthlySurplusTotal> monthly_totals(const std::vector<SurplusRecord>& records);

/// Average surplus per calendar day of the month.
double monthly_to_daily(const MonthlySurplusTotal& total);

}  // namespace minesim::ingest
