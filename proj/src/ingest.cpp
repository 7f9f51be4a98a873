#include "minesim/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <utility>

#include <fmt/format.h>

namespace minesim::ingest {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return fields;
}

/// Iterates data lines, skipping `#` comments and blank lines, checking the header.
template <typename RowFn>
void for_each_row(std::istream& in, std::string_view source, std::string_view header, RowFn&& on_row) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!seen_header) {
      if (line != header) {
        throw ValidationError(fmt::format("{}:{}: expected header '{}', got '{}'", source, line_no, header, line));
      }
      seen_header = true;
      continue;
    }
    try {
      on_row(split_fields(line), line_no);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
  }
  if (!seen_header) {
    throw ValidationError(fmt::format("{}: missing header '{}'", source, header));
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError(fmt::format("cannot open '{}'", path.string()));
  }
  return in;
}

}  // namespace

const MarketRecord* MarketSeries::find(Date d) const {
  auto it = std::lower_bound(records.begin(), records.end(), d,
                             [](const MarketRecord& r, Date key) { return r.date < key; });
  return (it != records.end() && it->date == d) ? &*it : nullptr;
}

std::vector<double> MarketSeries::prices() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.price_usd);
  return out;
}

MarketSeries MarketSeries::slice(Date from, Date to) const {
  MarketSeries out;
  for (const auto& r : records) {
    if (r.date >= from && r.date <= to) out.records.push_back(r);
  }
  return out;
}

MarketSeries parse_market_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_market_csv(in, path.filename().string());
}

MarketSeries parse_market_csv(std::istream& in, std::string_view source) {
  MarketSeries series;
  for_each_row(in, source, kMarketHeader, [&](const std::vector<std::string_view>& f, std::size_t) {
    if (f.size() != 3) {
      throw ValidationError(fmt::format("expected 3 fields, got {}", f.size()));
    }
    MarketRecord r{parse_date(f[0]), parse_double(f[1]), parse_double(f[2])};
    if (r.price_usd < 0.0) {
      throw ValidationError(fmt::format("negative price {}", f[1]));
    }
    if (r.network_hashrate <= 0.0) {
      throw ValidationError(fmt::format("non-positive network hash rate {}", f[2]));
    }
    series.records.push_back(r);
  });
  if (series.records.empty()) {
    throw ValidationError(fmt::format("{}: no records", source));
  }
  std::stable_sort(series.records.begin(), series.records.end(),
                   [](const MarketRecord& a, const MarketRecord& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < series.records.size(); ++i) {
    if (series.records[i].date == series.records[i - 1].date) {
      throw ValidationError(fmt::format("{}: duplicate date {}", source, format_date(series.records[i].date)));
    }
  }
  return series;
}

void write_market_csv(std::ostream& out, const MarketSeries& series) {
  out << kMarketHeader << '\n';
  for (const auto& r : series.records) {
    out << format_date(r.date) << ',' << format_double(r.price_usd) << ',' << format_double(r.network_hashrate)
        << '\n';
  }
}

SurplusData parse_surplus_csv(const std::filesystem::path& path, MonthWindow window) {
  auto in = open_input(path);
  return parse_surplus_csv(in, path.filename().string(), window);
}

SurplusData parse_surplus_csv(std::istream& in, std::string_view source, MonthWindow window) {
  SurplusData data;
  std::set<std::pair<std::string, YearMonth>> seen;
  std::size_t dropped = 0;
  for_each_row(in, source, kSurplusHeader, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
    if (f.size() != 4) {
      throw ValidationError(fmt::format("expected 4 fields, got {}", f.size()));
    }
    SurplusRecord r{std::string(f[0]), parse_year_month(f[1]), parse_int(f[2]), parse_double(f[3])};
    if (r.region.empty()) throw ValidationError("empty region");
    if (r.households < 0) throw ValidationError(fmt::format("negative household count {}", f[2]));
    if (r.surplus_kwh < 0.0) throw ValidationError(fmt::format("negative surplus_kwh {}", f[3]));
    if (!seen.emplace(r.region, r.month).second) {
      throw ValidationError(fmt::format("duplicate (region, month) ({}, {})", r.region, f[1]));
    }
    if (r.month < window.first || r.month > window.last) {
      ++dropped;
      return;
    }
    if (r.households == 0 && r.surplus_kwh > 0.0) {
      data.warnings.push_back(fmt::format("{}:{}: region {} reports {} kWh with 0 households", source, line_no,
                                          r.region, f[3]));
    }
    data.records.push_back(std::move(r));
  });
  if (dropped > 0) {
    data.warnings.push_back(fmt::format("{}: dropped {} rows outside {}..{}", source, dropped,
                                        format_year_month(window.first), format_year_month(window.last)));
  }
  if (data.records.empty()) {
    throw ValidationError(fmt::format("{}: no records", source));
  }
  return data;
}

FillResult fill_gaps(const MarketSeries& series, std::optional<Date> required_start) {
  if (series.size() < 2) {
    throw InsufficientDataError("fill_gaps needs at least 2 records");
  }
  if (required_start && series.start() != *required_start) {
    throw ValidationError(fmt::format("market series starts {} but {} is required; nothing to carry forward",
                                      format_date(series.start()), format_date(*required_start)));
  }
  FillResult result;
  result.series.records.reserve(static_cast<std::size_t>((series.end() - series.start()).count()) + 1);
  for (const auto& r : series.records) {
    if (!result.series.empty()) {
      const MarketRecord prev = result.series.records.back();
      for (Date d = prev.date + std::chrono::days{1}; d < r.date; d += std::chrono::days{1}) {
        result.series.records.push_back({d, prev.price_usd, prev.network_hashrate});
        ++result.filled;
      }
    }
    result.series.records.push_back(r);
  }
  return result;
}

std::vector<MonthlySurplusTotal> monthly_totals(const std::vector<SurplusRecord>& records) {
  std::map<YearMonth, double> sums;
  for (const auto& r : records) sums[r.month] += r.surplus_kwh;
  std::vector<MonthlySurplusTotal> out;
  out.reserve(sums.size());
  for (const auto& [month, kwh] : sums) out.push_back({month, kwh});
  return out;
}

double monthly_to_daily(const MonthlySurplusTotal& total) {
  return total.total_kwh / static_cast<double>(total.month.days());
}

}  // namespace minesim::ingest
