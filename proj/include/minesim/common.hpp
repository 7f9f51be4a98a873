#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace minesim {

/// Input data or configuration violates a documented rule (CLI exit code 2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Not enough rows to build features, windows or a model (CLI exit code 3).
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Date = std::chrono::sys_days;

/// Calendar month, ordered chronologically.
struct YearMonth {
  int year = 0;
  unsigned month = 1;

  friend auto operator<=>(const YearMonth&, const YearMonth&) = default;

  [[nodiscard]] unsigned days() const;
  [[nodiscard]] Date first_day() const;
  [[nodiscard]] YearMonth next() const;
  [[nodiscard]] static YearMonth of(Date d);
};

/// Parses `YYYY-MM-DD`; throws ValidationError on anything else.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// Parses `YYYY-MM`.
YearMonth parse_year_month(std::string_view text);
std::string format_year_month(YearMonth ym);

/// Strict decimal parse (no trailing garbage, finite).
double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

/// Money in integer cents.
struct Cents {
  std::int64_t value = 0;
  friend auto operator<=>(const Cents&, const Cents&) = default;
  friend Cents operator+(Cents a, Cents b) { return {a.value + b.value}; }
  friend Cents operator-(Cents a, Cents b) { return {a.value - b.value}; }
  /// Rounds half away from zero.
  static Cents from_dollars(double usd);
  [[nodiscard]] double dollars() const { return static_cast<double>(value) / 100.0; }
  /// "61584991.33", "-0.05"
  [[nodiscard]] std::string to_string() const;
};

/// 64-bit FNV-1a, used for config fingerprints in output headers.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace minesim
