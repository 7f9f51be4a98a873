#include "minesim/economics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace minesim::economics {

namespace {

int source_rank(const std::string& source) {
  if (source == "actual") return 0;
  if (source == "forest") return 1;
  if (source == "lstm") return 2;
  return 3;
}

std::string display_source(const std::string& source) {
  if (source == "actual") return "Actual";
  if (source == "forest") return "RF";
  if (source == "lstm") return "LSTM";
  return source;
}

struct PricedDay {
  double price = 0.0;
  bool fallback = false;
};

PricedDay price_for(const PriceSeries& series, Date d) {
  if (series.prices.empty()) {
    throw ValidationError(fmt::format("price source '{}' has no prices", series.label));
  }
  auto it = series.prices.lower_bound(d);
  if (it != series.prices.end() && it->first == d) return {it->second, false};
  if (series.label == "actual") {
    throw ValidationError(fmt::format("missing actual price for {}", format_date(d)));
  }
  if (it != series.prices.begin()) return {std::prev(it)->second, true};
  return {it->second, true};
}

std::string millions(Cents c) { return fmt::format("${}", std::llround(c.dollars() / 1e6)); }

}  // namespace

double btc_per_day(double fleet_hashrate, double network_hashrate, double reward, double blocks_per_day) {
  if (!(network_hashrate > 0.0)) throw ValidationError("network hash rate must be positive");
  if (fleet_hashrate < 0.0) throw ValidationError("fleet hash rate must be non-negative");
  return reward * (fleet_hashrate / network_hashrate) * blocks_per_day;
}

double daily_revenue(double price_usd, double btc) { return price_usd * btc; }

Cents depreciation_cost(std::int64_t owned_units, Cents unit_price, std::int64_t months_operated,
                        std::int64_t lifespan_months) {
  if (lifespan_months <= 0) throw ValidationError("miner lifespan must be positive");
  if (owned_units < 0 || unit_price.value < 0 || months_operated < 0) {
    throw ValidationError("depreciation inputs must be non-negative");
  }
  const __int128 numerator = static_cast<__int128>(owned_units) * unit_price.value * months_operated;
  const __int128 rounded = (2 * numerator + lifespan_months) / (2 * static_cast<__int128>(lifespan_months));
  return {static_cast<std::int64_t>(rounded)};
}

double solo_mining_time(double miner_hashrate, double network_hashrate, double reward) {
  if (!(miner_hashrate > 0.0) || !(reward > 0.0)) {
    throw ValidationError("solo mining needs positive miner hash rate and reward");
  }
  return 1.0 / btc_per_day(miner_hashrate, network_hashrate, reward);
}

PriceSeries PriceSeries::actual(const ingest::MarketSeries& market) {
  PriceSeries out{"actual", {}};
  for (const auto& r : market.records) out.prices.emplace_hint(out.prices.end(), r.date, r.price_usd);
  return out;
}

SimulationReport run_case(const fleet::ScenarioPlan& plan, const PriceSeries& prices,
                          const ingest::MarketSeries& market, const fleet::MinerSpec& spec, SimulationRange range) {
  if (range.end < range.start) throw ValidationError("simulation range ends before it starts");
  SimulationReport report;
  report.price_source = prices.label;
  report.scenario = plan.scenario;
  report.case_label = fmt::format("{}/sim{}", prices.label, plan.scenario);
  report.owned_units = plan.owned_units;

  std::size_t fallbacks = 0;
  std::size_t capped = 0;
  for (Date d = range.start; d <= range.end; d += std::chrono::days{1}) {
    const ingest::MarketRecord* rec = market.find(d);
    if (rec == nullptr) {
      throw ValidationError(fmt::format("missing network hash rate for {}", format_date(d)));
    }
    const YearMonth month = YearMonth::of(d);
    DailyLedgerEntry e;
    e.date = d;
    e.scenario = plan.scenario;
    e.price_source = prices.label;
    e.operating_units = plan.operating_units(month);
    e.fleet_hashrate = static_cast<double>(e.operating_units) * spec.hashrate_ths;
    e.network_hashrate = rec->network_hashrate;
    e.block_reward = fleet::block_reward(d);
    double effective_fleet = e.fleet_hashrate;
    if (effective_fleet > e.network_hashrate) {
      effective_fleet = e.network_hashrate;
      e.share_capped = true;
      ++capped;
    }
    e.btc_mined = btc_per_day(effective_fleet, e.network_hashrate, e.block_reward);
    const PricedDay priced = price_for(prices, d);
    e.price_used = priced.price;
    e.price_fallback = priced.fallback;
    if (priced.fallback) ++fallbacks;
    e.revenue_usd = daily_revenue(e.price_used, e.btc_mined);

    report.btc_total += e.btc_mined;
    report.revenue_usd += e.revenue_usd;
    if (report.monthly.empty() || report.monthly.back().month != month) report.monthly.push_back({month, 0.0, 0.0});
    report.monthly.back().btc += e.btc_mined;
    report.monthly.back().revenue_usd += e.revenue_usd;
    report.ledger.push_back(std::move(e));
  }

  report.months_operated = static_cast<std::int64_t>(report.monthly.size());
  report.revenue = Cents::from_dollars(report.revenue_usd);
  report.cost = depreciation_cost(plan.owned_units, Cents::from_dollars(spec.unit_price_usd), report.months_operated,
                                  spec.lifespan_months);
  report.profit = report.revenue - report.cost;
  if (fallbacks > 0) {
    report.warnings.push_back(
        fmt::format("{}: {} day(s) without a prediction used the nearest available one", report.case_label, fallbacks));
  }
  if (capped > 0) {
    report.warnings.push_back(
        fmt::format("{}: fleet hash rate exceeded the network on {} day(s); share capped at 1", report.case_label,
                    capped));
  }
  return report;
}

void attach_deltas(std::vector<SimulationReport>& reports) {
  for (auto& r : reports) {
    if (r.price_source == "actual") continue;
    const auto base = std::find_if(reports.begin(), reports.end(), [&](const SimulationReport& a) {
      return a.price_source == "actual" && a.scenario == r.scenario;
    });
    if (base != reports.end() && base->revenue_usd != 0.0) {
      r.revenue_delta_pct = 100.0 * (r.revenue_usd - base->revenue_usd) / base->revenue_usd;
    }
  }
}

void write_ledger_rows(std::ostream& out, const SimulationReport& report) {
  for (const auto& e : report.ledger) {
    std::string flags;
    if (e.share_capped) flags += "share_capped";
    if (e.price_fallback) flags += flags.empty() ? "price_fallback" : ";price_fallback";
    out << format_date(e.date) << ',' << e.scenario << ',' << e.price_source << ',' << e.operating_units << ','
        << format_double(e.fleet_hashrate) << ',' << format_double(e.network_hashrate) << ','
        << format_double(e.block_reward) << ',' << format_double(e.btc_mined) << ',' << format_double(e.price_used)
        << ',' << format_double(e.revenue_usd) << ',' << flags << '\n';
  }
}

void write_case_row(std::ostream& out, const SimulationReport& report) {
  out << report.case_label << ',' << report.price_source << ',' << report.scenario << ',' << report.owned_units
      << ',' << report.months_operated << ',' << format_double(report.btc_total) << ','
      << report.revenue.to_string() << ',' << report.cost.to_string() << ',' << report.profit.to_string() << ','
      << (report.revenue_delta_pct ? fmt::format("{:.4f}", *report.revenue_delta_pct) : std::string()) << '\n';
}

void write_summary_table(std::ostream& out, const std::vector<SimulationReport>& reports) {
  std::vector<const SimulationReport*> ordered;
  for (const auto& r : reports) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(), [](const SimulationReport* a, const SimulationReport* b) {
    return std::pair(a->scenario, source_rank(a->price_source)) < std::pair(b->scenario, source_rank(b->price_source));
  });

  out << fmt::format("{:<14} {:>18} {:>9} {:>11} {:>18} {:>16} {:>18}\n", "Case", "Revenue (M)", "Cost (M)",
                     "Profit (M)", "Revenue (USD)", "Cost (USD)", "Profit (USD)");
  for (const SimulationReport* r : ordered) {
    std::string revenue = millions(r->revenue);
    if (r->revenue_delta_pct) revenue += fmt::format(" ({:+.1f}%)", *r->revenue_delta_pct);
    const std::string label = fmt::format("{} / Sim{}", display_source(r->price_source), r->scenario);
    out << fmt::format("{:<14} {:>18} {:>9} {:>11} {:>18} {:>16} {:>18}\n", label, revenue, millions(r->cost),
                       millions(r->profit), r->revenue.to_string(), r->cost.to_string(), r->profit.to_string());
  }
}

}  // namespace minesim::economics
