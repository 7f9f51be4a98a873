#include "minesim/indicators.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

namespace minesim::indicators {

std::vector<double> sma(std::span<const double> prices, std::size_t n) {
  std::vector<double> out;
  if (n == 0 || prices.size() < n) return out;
  out.reserve(prices.size() - n + 1);
  for (std::size_t t = n - 1; t < prices.size(); ++t) {
    double sum = 0.0;
    for (std::size_t i = t + 1 - n; i <= t; ++i) sum += prices[i];
    out.push_back(sum / static_cast<double>(n));
  }
  return out;
}

std::vector<double> wma(std::span<const double> prices, std::size_t n) {
  std::vector<double> out;
  if (n == 0 || prices.size() < n) return out;
  const double weight_total = static_cast<double>(n * (n + 1) / 2);
  out.reserve(prices.size() - n + 1);
  for (std::size_t t = n - 1; t < prices.size(); ++t) {
    double sum = 0.0;
    for (std::size_t w = 1; w <= n; ++w) sum += static_cast<double>(w) * prices[t + w - n];
    out.push_back(sum / weight_total);
  }
  return out;
}

std::vector<double> momentum(std::span<const double> prices, std::size_t n) {
  std::vector<double> out;
  if (prices.size() <= n) return out;
  out.reserve(prices.size() - n);
  for (std::size_t t = n; t < prices.size(); ++t) out.push_back(prices[t] - prices[t - n]);
  return out;
}

std::vector<double> stoch_k(std::span<const double> prices, std::size_t n) {
  std::vector<double> out;
  if (n == 0 || prices.size() < n) return out;
  out.reserve(prices.size() - n + 1);
  for (std::size_t t = n - 1; t < prices.size(); ++t) {
    const auto window = prices.subspan(t + 1 - n, n);
    const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
    if (*hi == *lo) {
      out.push_back(50.0);
    } else {
      out.push_back(100.0 * ((prices[t] - *lo) / (*hi - *lo)));
    }
  }
  return out;
}

std::vector<double> stoch_d(std::span<const double> k_values, std::size_t m) { return sma(k_values, m); }

std::vector<double> rsi(std::span<const double> prices, std::size_t n) {
  std::vector<double> out;
  if (n == 0 || prices.size() <= n) return out;
  out.reserve(prices.size() - n);
  for (std::size_t t = n; t < prices.size(); ++t) {
    double gains = 0.0;
    double losses = 0.0;
    for (std::size_t i = t + 1 - n; i <= t; ++i) {
      const double delta = prices[i] - prices[i - 1];
      if (delta > 0.0) gains += delta;
      if (delta < 0.0) losses += -delta;
    }
    const double avg_gain = gains / static_cast<double>(n);
    const double avg_loss = losses / static_cast<double>(n);
    if (avg_loss == 0.0) {
      out.push_back(avg_gain == 0.0 ? 50.0 : 100.0);
    } else {
      const double rs = avg_gain / avg_loss;
      out.push_back(100.0 - 100.0 / (1.0 + rs));
    }
  }
  return out;
}

FeatureMatrix FeatureMatrix::slice(Date from, Date to) const {
  FeatureMatrix out;
  for (const auto& r : rows) {
    if (r.date >= from && r.date <= to) out.rows.push_back(r);
  }
  return out;
}

std::size_t IndicatorParams::warmup() const {
  // sma/wma/K% need window - 1 earlier days, D% needs d_window - 1 more K%
  // values, RSI needs window deltas.
  return std::max({window - 1 + d_window - 1, window, momentum_lag});
}

FeatureMatrix build_features(const ingest::MarketSeries& series, const IndicatorParams& params) {
  if (params.window == 0 || params.d_window == 0 || params.momentum_lag == 0) {
    throw ValidationError("indicator windows must be positive");
  }
  const std::vector<double> prices = series.prices();
  const std::size_t first = params.warmup();
  if (prices.size() < first + 2) {
    throw InsufficientDataError(fmt::format("{} days of prices is too short for features (need at least {})",
                                            prices.size(), first + 2));
  }

  const auto sma_v = sma(prices, params.window);
  const auto wma_v = wma(prices, params.window);
  const auto mom_v = momentum(prices, params.momentum_lag);
  const auto k_v = stoch_k(prices, params.window);
  const auto d_v = stoch_d(k_v, params.d_window);
  const auto rsi_v = rsi(prices, params.window);

  const std::size_t w = params.window;
  FeatureMatrix fm;
  fm.rows.reserve(prices.size() - 1 - first);
  for (std::size_t t = first; t + 1 < prices.size(); ++t) {
    FeatureRow row;
    row.date = series.records[t].date;
    row.sma14 = sma_v[t - (w - 1)];
    row.wma14 = wma_v[t - (w - 1)];
    row.momentum = mom_v[t - params.momentum_lag];
    row.k_pct = k_v[t - (w - 1)];
    row.d_pct = d_v[t - (w - 1) - (params.d_window - 1)];
    row.rsi = rsi_v[t - w];
    row.price = prices[t];
    row.target_price = prices[t + 1];
    fm.rows.push_back(row);
  }
  return fm;
}

void write_features_csv(std::ostream& out, const FeatureMatrix& features) {
  out << "date,sma14,wma14,momentum,k_pct,d_pct,rsi,target\n";
  for (const auto& r : features.rows) {
    out << format_date(r.date) << ',' << format_double(r.sma14) << ',' << format_double(r.wma14) << ','
        << format_double(r.momentum) << ',' << format_double(r.k_pct) << ',' << format_double(r.d_pct) << ','
        << format_double(r.rsi) << ',' << format_double(r.target_price) << '\n';
  }
}

}  // namespace minesim::indicators
