#include "minesim/fleet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace minesim::fleet {

namespace {

using std::chrono::day;
using std::chrono::month;
using std::chrono::year;

struct Halving {
  Date from;
  double reward;
};

// Reward in force from each date onward.
const std::array<Halving, 4> kRewardSchedule{{
    {year{2012} / month{11} / day{28}, 25.0},
    {year{2016} / month{7} / day{10}, 12.5},
    {year{2020} / month{5} / day{12}, 6.25},
    {year{2024} / month{4} / day{20}, 3.125},
}};

MonthlyFleet month_row(const MonthCapacity& cap, std::int64_t operating, const MinerSpec& spec) {
  const double hours = 24.0 * cap.month.days();
  MonthlyFleet row;
  row.month = cap.month;
  row.supported_units = cap.supported_units;
  row.operating_units = operating;
  row.energy_used_kwh = static_cast<double>(operating) * spec.power_kw() * hours;
  row.energy_idle_kwh = cap.usable_kwh - row.energy_used_kwh;
  return row;
}

}  // namespace

void MinerSpec::validate() const {
  if (!(hashrate_ths > 0.0) || !(power_w > 0.0) || !(efficiency_j_per_th > 0.0) || !(unit_price_usd > 0.0) ||
      lifespan_months <= 0) {
    throw ValidationError(fmt::format("miner spec '{}' has a non-positive field", name));
  }
  const double implied = power_w / hashrate_ths;
  if (std::abs(implied - efficiency_j_per_th) > 0.05 * efficiency_j_per_th) {
    throw ValidationError(fmt::format("miner spec '{}': power/hashrate = {:.3f} J/TH disagrees with efficiency {}",
                                      name, implied, efficiency_j_per_th));
  }
}

std::int64_t ScenarioPlan::operating_units(YearMonth month) const {
  for (const auto& m : monthly) {
    if (m.month == month) return m.operating_units;
  }
  throw ValidationError(fmt::format("scenario {} has no fleet plan for {}", scenario, format_year_month(month)));
}

double usable_energy(double kwh, double loss_rate) {
  if (kwh < 0.0) throw ValidationError("surplus energy must be non-negative");
  if (!(loss_rate >= 0.0 && loss_rate < 1.0)) {
    throw ValidationError(fmt::format("loss rate {} outside [0, 1)", loss_rate));
  }
  return kwh * (1.0 - loss_rate);
}

std::int64_t supported_units(double usable_kwh, const MinerSpec& spec, double hours_in_month) {
  const double per_miner = spec.power_kw() * hours_in_month;
  if (!(per_miner > 0.0)) throw ValidationError("miner-month energy must be positive");
  // The relative nudge keeps exact multiples from flooring one unit short.
  return static_cast<std::int64_t>(std::floor(usable_kwh / per_miner * (1.0 + 1e-12)));
}

std::vector<MonthCapacity> monthly_capacity(const std::vector<ingest::MonthlySurplusTotal>& totals,
                                            const MinerSpec& spec, double loss_rate) {
  std::vector<MonthCapacity> out;
  out.reserve(totals.size());
  for (const auto& t : totals) {
    const double usable = usable_energy(t.total_kwh, loss_rate);
    out.push_back({t.month, usable, supported_units(usable, spec, 24.0 * t.month.days())});
  }
  return out;
}

std::pair<ScenarioPlan, ScenarioPlan> build_scenarios(const std::vector<MonthCapacity>& capacity,
                                                      const MinerSpec& spec) {
  if (capacity.empty()) throw InsufficientDataError("no monthly surplus data to plan a fleet");
  std::int64_t peak = 0;
  std::int64_t total = 0;
  for (const auto& c : capacity) {
    peak = std::max(peak, c.supported_units);
    total += c.supported_units;
  }
  const auto months = static_cast<std::int64_t>(capacity.size());
  const std::int64_t mean_rounded = (2 * total + months) / (2 * months);  // round half up

  ScenarioPlan s1{1, peak, {}};
  ScenarioPlan s2{2, mean_rounded, {}};
  for (const auto& c : capacity) {
    s1.monthly.push_back(month_row(c, c.supported_units, spec));
    s2.monthly.push_back(month_row(c, std::min(mean_rounded, c.supported_units), spec));
  }
  return {std::move(s1), std::move(s2)};
}

double block_reward(Date date) {
  if (date < kRewardSchedule.front().from) {
    throw ValidationError(fmt::format("no block reward schedule before {} (asked for {})",
                                      format_date(kRewardSchedule.front().from), format_date(date)));
  }
  double reward = kRewardSchedule.front().reward;
  for (const auto& h : kRewardSchedule) {
    if (date >= h.from) reward = h.reward;
  }
  return reward;
}

void write_fleet_rows(std::ostream& out, const ScenarioPlan& plan) {
  for (const auto& m : plan.monthly) {
    out << format_year_month(m.month) << ',' << plan.scenario << ',' << m.supported_units << ','
        << m.operating_units << ',' << fmt::format("{:.3f}", m.energy_used_kwh) << ','
        << fmt::format("{:.3f}", m.energy_idle_kwh) << '\n';
  }
}

}  // namespace minesim::fleet
