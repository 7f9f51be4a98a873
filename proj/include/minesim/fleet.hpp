#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "minesim/common.hpp"
#include "minesim/ingest.hpp"

namespace minesim::fleet {

struct MinerSpec {
  std::string name = "Antminer S21 XP Hyd";
  double hashrate_ths = 473.0;
  double power_w = 5676.0;
  double efficiency_j_per_th = 12.0;
  double unit_price_usd = 10165.0;
  std::int64_t lifespan_months = 90;

  [[nodiscard]] double power_kw() const { return power_w / 1000.0; }
  /// Positive fields and power/hashrate within 5% of the stated efficiency.
  void validate() const;
};

struct MonthlyFleet {
  YearMonth month;
  std::int64_t supported_units = 0;
  std::int64_t operating_units = 0;
  double energy_used_kwh = 0.0;
  double energy_idle_kwh = 0.0;
};

struct ScenarioPlan {
  int scenario = 1;
  std::int64_t owned_units = 0;
  std::vector<MonthlyFleet> monthly;

  /// Operating units of `month`; throws ValidationError when the plan lacks it.
  [[nodiscard]] std::int64_t operating_units(YearMonth month) const;
};

inline constexpr double kDefaultLossRate = 0.0359;

/// Energy left after transmission loss.
double usable_energy(double kwh, double loss_rate = kDefaultLossRate);

/// Whole miners that the energy can run around the clock for the month.
std::int64_t supported_units(double usable_kwh, const MinerSpec& spec, double hours_in_month);

/// Supported count of one month, as fed to build_scenarios.
struct MonthCapacity {
  YearMonth month;
  double usable_kwh = 0.0;
  std::int64_t supported_units = 0;
};

/// Converts monthly surplus totals to capacities: loss, then calendar-exact hours.
std::vector<MonthCapacity> monthly_capacity(const std::vector<ingest::MonthlySurplusTotal>& totals,
                                            const MinerSpec& spec, double loss_rate = kDefaultLossRate);

/// Scenario 1 owns the peak month's count and runs every supported unit.
/// Scenario 2 owns the rounded mean and runs min(owned, supported).
std::pair<ScenarioPlan, ScenarioPlan> build_scenarios(const std::vector<MonthCapacity>& capacity,
                                                      const MinerSpec& spec);

/// BTC per block on `date`; each boundary day already pays the new reward.
double block_reward(Date date);

inline constexpr const char* kFleetHeader = "month,scenario,supported,operating,energy_used_kwh,energy_idle_kwh";
void write_fleet_rows(std::ostream& out, const ScenarioPlan& plan);

}  // namespace minesim::fleet
