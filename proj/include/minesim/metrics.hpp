#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>

namespace minesim::metrics {

/// Mean squared error. Throws ValidationError on empty or mismatched input.
double mse(std::span<const double> actual, std::span<const double> predicted);

/// Mean absolute error.
double mae(std::span<const double> actual, std::span<const double> predicted);

/// Coefficient of determination, 1 - SS_res / SS_tot. Undefined (throws)
/// for fewer than two points or a constant actual series.
double r2(std::span<const double> actual, std::span<const double> predicted);

struct EvalReport {
  std::string model;
  std::string split;
  std::size_t n = 0;
  double mae = 0.0;
  double mse = 0.0;
  double r2 = 0.0;
};

EvalReport evaluate(std::string model, std::string split, std::span<const double> actual,
                    std::span<const double> predicted);

inline constexpr const char* kEvalHeader = "model,split,n,mae,mse,r2";
/// One `eval.csv` row (no header).
void write_eval_row(std::ostream& out, const EvalReport& report);

}  // namespace minesim::metrics
