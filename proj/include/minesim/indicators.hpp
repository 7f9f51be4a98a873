#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "minesim/common.hpp"
#include "minesim/ingest.hpp"

namespace minesim::indicators {

// Output alignment: for a window of n, element j of sma/wma/stoch_k corresponds
// to input index j + n - 1; element j of momentum/rsi corresponds to j + n.
// Inputs too short for one window yield an empty vector.

/// Trailing arithmetic mean over n values.
std::vector<double> sma(std::span<const double> prices, std::size_t n);

/// Trailing linearly weighted mean, weight i on the i-th oldest value (newest = n).
std::vector<double> wma(std::span<const double> prices, std::size_t n);

/// prices[t] - prices[t - n].
std::vector<double> momentum(std::span<const double> prices, std::size_t n = 1);

/// Stochastic K% over the n-day window ending at t. A flat window gives 50.
std::vector<double> stoch_k(std::span<const double> prices, std::size_t n = 14);

/// D% is the m-day simple mean of K%.
std::vector<double> stoch_d(std::span<const double> k_values, std::size_t m = 3);

/// RSI from simple means of the last n gains and losses.
/// No losses gives 100; no gains and no losses gives 50.
std::vector<double> rsi(std::span<const double> prices, std::size_t n = 14);

inline constexpr std::size_t kFeatureCount = 6;

struct FeatureRow {
  Date date;
  double sma14 = 0.0;
  double wma14 = 0.0;
  double momentum = 0.0;
  double k_pct = 0.0;
  double d_pct = 0.0;
  double rsi = 0.0;
  double price = 0.0;         ///< closing price of `date`
  double target_price = 0.0;  ///< price of the following day

  [[nodiscard]] std::array<double, kFeatureCount> features() const {
    return {sma14, wma14, momentum, k_pct, d_pct, rsi};
  }
};

struct FeatureMatrix {
  std::vector<FeatureRow> rows;

  [[nodiscard]] std::size_t size() const { return rows.size(); }
  [[nodiscard]] bool empty() const { return rows.empty(); }
  /// Rows with from <= date <= to.
  [[nodiscard]] FeatureMatrix slice(Date from, Date to) const;
};

struct IndicatorParams {
  std::size_t window = 14;
  std::size_t momentum_lag = 1;
  std::size_t d_window = 3;

  /// Index of the first day on which every indicator is defined.
  [[nodiscard]] std::size_t warmup() const;
};

/// One row per day with complete indicator history; the last day has no
/// target and is dropped. Throws InsufficientDataError when no row fits.
FeatureMatrix build_features(const ingest::MarketSeries& series, const IndicatorParams& params = {});

/// `date,sma14,wma14,momentum,k_pct,d_pct,rsi,target`
void write_features_csv(std::ostream& out, const FeatureMatrix& features);

}  // namespace minesim::indicators
