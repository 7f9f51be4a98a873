#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minesim/common.hpp"
#include "minesim/fleet.hpp"
#include "minesim/ingest.hpp"

namespace minesim::economics {

inline constexpr double kBlocksPerDay = 144.0;

/// Expected BTC per day for a hash-rate share of the network.
double btc_per_day(double fleet_hashrate, double network_hashrate, double reward,
                   double blocks_per_day = kBlocksPerDay);

double daily_revenue(double price_usd, double btc);

/// Straight-line depreciation: owned * unit_price * months / lifespan, rounded
/// half-up to the cent with integer arithmetic.
Cents depreciation_cost(std::int64_t owned_units, Cents unit_price, std::int64_t months_operated,
                        std::int64_t lifespan_months = 90);

/// Expected days for one miner to earn 1 BTC alone.
double solo_mining_time(double miner_hashrate, double network_hashrate, double reward);

/// Daily prices keyed by the date they price.
struct PriceSeries {
  std::string label;  ///< "actual", "forest", "lstm"
  std::map<Date, double> prices;

  static PriceSeries actual(const ingest::MarketSeries& market);
};

struct DailyLedgerEntry {
  Date date;
  int scenario = 1;
  std::string price_source;
  std::int64_t operating_units = 0;
  double fleet_hashrate = 0.0;
  double network_hashrate = 0.0;
  double block_reward = 0.0;
  double btc_mined = 0.0;
  double price_used = 0.0;
  double revenue_usd = 0.0;
  bool share_capped = false;    ///< fleet exceeded the network; share set to 1
  bool price_fallback = false;  ///< no price for the date; nearest one used
};

struct MonthlyTotal {
  YearMonth month;
  double btc = 0.0;
  double revenue_usd = 0.0;
};

struct SimulationReport {
  std::string case_label;  ///< e.g. "actual/sim1"
  std::string price_source;
  int scenario = 1;
  std::int64_t owned_units = 0;
  std::int64_t months_operated = 0;
  double btc_total = 0.0;
  double revenue_usd = 0.0;  ///< sequential sum of daily revenue
  Cents revenue;
  Cents cost;
  Cents profit;  ///< revenue - cost
  std::optional<double> revenue_delta_pct;  ///< against the actual-price case of the same scenario
  std::vector<MonthlyTotal> monthly;
  std::vector<DailyLedgerEntry> ledger;
  std::vector<std::string> warnings;
};

struct SimulationRange {
  Date start;
  Date end;
};

/// Simulates every day of `range` for one plan and price source.
SimulationReport run_case(const fleet::ScenarioPlan& plan, const PriceSeries& prices,
                          const ingest::MarketSeries& market, const fleet::MinerSpec& spec, SimulationRange range);

/// Fills revenue_delta_pct of each non-actual report from its scenario's actual case.
void attach_deltas(std::vector<SimulationReport>& reports);

inline constexpr const char* kLedgerHeader =
    "date,scenario,price_source,operating_units,fleet_hashrate_ths,network_hashrate_ths,block_reward,btc_mined,"
    "price_used,revenue_usd,flags";
void write_ledger_rows(std::ostream& out, const SimulationReport& report);

inline constexpr const char* kCasesHeader =
    "case,price_source,scenario,owned_units,months,btc_total,revenue_usd,cost_usd,profit_usd,revenue_delta_pct";
void write_case_row(std::ostream& out, const SimulationReport& report);

/// Summary table: revenue, cost and profit in millions plus exact dollars.
void write_summary_table(std::ostream& out, const std::vector<SimulationReport>& reports);

}  // namespace minesim::economics
