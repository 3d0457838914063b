#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cbl/baseline.hpp"
#include "cbl/dataset.hpp"
#include "cbl/metrics.hpp"
#include "cbl/money.hpp"

namespace cbl {

/// Peak Time Rebate tariff. Defaults follow the Anaheim Public Utility
/// pilot: $0.35/kWh rebate for measured reduction, $0.097/kWh flat retail.
struct TariffSchedule {
    double incentive_rate = 0.35; // $ per kWh of measured reduction
    double retail_rate = 0.097;   // $ per kWh consumed

    void validate() const; // throws ConfigError unless both rates > 0
};

/// One subject's settlement for one event day. PTR pays only where the
/// baseline exceeds the load, so flr_energy is the positive part of b - l
/// over the settlement window. With no real DR response in the data, every
/// paid kWh is false load reduction.
///
/// Percentages are computed from the unrounded energies, so
/// rebate_pct / flr_pct == incentive_rate / retail_rate exactly.
struct SettlementRecord {
    std::optional<CustomerId> subject;
    Date event_day;
    double flr_energy_kwh = 0.0;          // sum over window of max(0, b - l)
    Money rebate;                         // incentive_rate * flr_energy
    double event_day_consumption_kwh = 0; // all slots of the day
    Money revenue;                        // retail_rate * consumption
    double flr_pct = 0.0;                 // 100 * flr / consumption
    double rebate_pct_of_revenue = 0.0;   // 100 * rebate / revenue
};

SettlementRecord ptr_settle(const BaselineCurve& baseline,
                            std::span<const double> actual_full_day,
                            SlotRange window, const TariffSchedule& tariff);

enum class SettlementMode { granular, aggregated };

struct DaySettlement {
    Date day;
    double flr_kwh = 0.0;
    double consumption_kwh = 0.0;
    Money rebate;
    Money revenue;
    double flr_pct = 0.0;
    double rebate_pct = 0.0;
};

/// Population settlement across event days: per-day totals, mean over the
/// days with 95% confidence intervals, and pooled (total-energy) figures.
struct SettlementReport {
    SettlementMode mode = SettlementMode::granular;
    std::vector<DaySettlement> per_day;
    double mean_flr_pct = 0.0;
    double mean_rebate_pct = 0.0;
    Interval flr_pct_ci, rebate_pct_ci;
    double total_flr_kwh = 0.0;
    double total_consumption_kwh = 0.0;
    Money total_rebate;
    Money total_revenue;
    double pooled_flr_pct = 0.0;
    double pooled_rebate_pct = 0.0;
};

/// Settles every (subject, event day) cell. Granular mode sums per-customer
/// records into day totals; aggregated mode expects exactly one subject.
SettlementReport settle_population(const CurveTable& baselines,
                                   const CurveTable& actuals,
                                   const EventSchedule& schedule,
                                   const TariffSchedule& tariff,
                                   SettlementMode mode,
                                   double ci_level = 0.95);

/// Convenience wrapper for the granular case: actuals come straight from
/// the dataset rows of the curves' subjects.
SettlementReport settle_population(std::span<const BaselineCurve> baselines,
                                   const LoadDataset& d,
                                   const EventSchedule& schedule,
                                   const TariffSchedule& tariff);

} // namespace cbl
