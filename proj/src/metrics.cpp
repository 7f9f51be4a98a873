#include "minesim/metrics.hpp"

#include <cmath>
#include <ostream>
#include <utility>

#include <fmt/format.h>

#include "minesim/common.hpp"

namespace minesim::metrics {

namespace {

void check_pair(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) {
    throw ValidationError(fmt::format("metric inputs differ in length ({} vs {})", actual.size(), predicted.size()));
  }
  if (actual.empty()) throw ValidationError("metric inputs are empty");
}

}  // namespace

double mse(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted);
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - predicted[i];
    sum += e * e;
  }
  return sum / static_cast<double>(actual.size());
}

double mae(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted);
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) sum += std::abs(actual[i] - predicted[i]);
  return sum / static_cast<double>(actual.size());
}

double r2(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted);
  if (actual.size() < 2) throw ValidationError("R^2 needs at least two points");
  double mean = 0.0;
  for (double y : actual) mean += y;
  mean /= static_cast<double>(actual.size());
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double dev = actual[i] - mean;
    const double res = actual[i] - predicted[i];
    ss_tot += dev * dev;
    ss_res += res * res;
  }
  if (ss_tot == 0.0) throw ValidationError("R^2 is undefined for a constant actual series");
  return 1.0 - ss_res / ss_tot;
}

EvalReport evaluate(std::string model, std::string split, std::span<const double> actual,
                    std::span<const double> predicted) {
  return {std::move(model), std::move(split), actual.size(), mae(actual, predicted), mse(actual, predicted),
          r2(actual, predicted)};
}

void write_eval_row(std::ostream& out, const EvalReport& report) {
  out << report.model << ',' << report.split << ',' << report.n << ',' << format_double(report.mae) << ','
      << format_double(report.mse) << ',' << format_double(report.r2) << '\n';
}

}  // namespace minesim::metrics
