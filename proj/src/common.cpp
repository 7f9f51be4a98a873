#include "minesim/common.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>

#include <fmt/format.h>

namespace minesim {

namespace {

int parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  int value = 0;
  const char* first = text.data() + pos;
  const char* last = first + len;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError(fmt::format("invalid date '{}'", whole));
  }
  return value;
}

}  // namespace

unsigned YearMonth::days() const {
  using namespace std::chrono;
  const year_month_day_last last{std::chrono::year{year} / std::chrono::month{month} / std::chrono::last};
  return static_cast<unsigned>(last.day());
}

Date YearMonth::first_day() const {
  return std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{1};
}

YearMonth YearMonth::next() const {
  return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
}

YearMonth YearMonth::of(Date d) {
  const std::chrono::year_month_day ymd{d};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month())};
}

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw ValidationError(fmt::format("invalid date '{}' (expected YYYY-MM-DD)", text));
  }
  const int y = parse_fixed_int(text, 0, 4, text);
  const int m = parse_fixed_int(text, 5, 2, text);
  const int d = parse_fixed_int(text, 8, 2, text);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw ValidationError(fmt::format("invalid calendar date '{}'", text));
  }
  return ymd;
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()));
}

YearMonth parse_year_month(std::string_view text) {
  if (text.size() != 7 || text[4] != '-') {
    throw ValidationError(fmt::format("invalid month '{}' (expected YYYY-MM)", text));
  }
  const int y = parse_fixed_int(text, 0, 4, text);
  const int m = parse_fixed_int(text, 5, 2, text);
  if (m < 1 || m > 12) {
    throw ValidationError(fmt::format("invalid month '{}'", text));
  }
  return {y, static_cast<unsigned>(m)};
}

std::string format_year_month(YearMonth ym) { return fmt::format("{:04d}-{:02d}", ym.year, ym.month); }

double parse_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw ValidationError(fmt::format("invalid number '{}'", text));
  }
  return value;
}

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError(fmt::format("invalid integer '{}'", text));
  }
  return value;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

Cents Cents::from_dollars(double usd) { return {std::llround(usd * 100.0)}; }

std::string Cents::to_string() const {
  const std::int64_t mag = value < 0 ? -value : value;
  return fmt::format("{}{}.{:02d}", value < 0 ? "-" : "", mag / 100, mag % 100);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

}  // namespace minesim
