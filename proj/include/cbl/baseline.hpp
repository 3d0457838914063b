#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cbl/dataset.hpp"

namespace cbl {

/// Parameters of the HighXofY averaging baseline: average, per hour, the x
/// highest-consumption days among the y most recent eligible days before
/// the event. NYISO uses x=5, y=10; weekends count as eligible here by
/// default (residential consumption is not weekday-bound), the classic
/// weekday-only behavior is available via include_weekends=false.
struct HighXofYConfig {
    int x = 5;
    int y = 10;
    bool include_weekends = true;
    bool exclude_holidays = true;
    bool exclude_prior_event_days = true;

    void validate() const; // throws ConfigError unless 1 <= x <= y
};

/// Seeded random partition of the population into control and treatment.
/// Both sets preserve the original customer order.
struct PopulationSplit {
    std::vector<CustomerId> control;
    std::vector<CustomerId> treatment;
    double control_fraction = 0.0;
    std::uint64_t seed = 0;
};

/// Estimated consumption curve for one event day. subject is a customer id,
/// or nullopt for an aggregate curve. values spans the full day.
struct BaselineCurve {
    std::optional<CustomerId> subject;
    Date event_day;
    std::vector<double> values;
};

/// The y most recent days strictly before event_day that qualify under cfg,
/// ordered most-recent-first. history_start bounds how far back the walk
/// may go (first day of the dataset). Throws InsufficientHistoryError when
/// fewer than y days qualify.
std::vector<Date> eligible_days(Date history_start, const EventSchedule& s,
                                Date event_day, const HighXofYConfig& cfg);

/// HighXofY selection detail: the eligible window, the x chosen days
/// (highest daily mean, ties to the more recent day), and the curve.
struct HighXofYSelection {
    std::vector<Date> eligible;
    std::vector<Date> selected;
    BaselineCurve curve;
};

HighXofYSelection high_x_of_y_detail(const LoadDataset& d,
                                     const CustomerId& customer,
                                     const EventSchedule& s, Date event_day,
                                     const HighXofYConfig& cfg);
HighXofYSelection high_x_of_y_detail(const LoadSeries& series,
                                     const EventSchedule& s, Date event_day,
                                     const HighXofYConfig& cfg);

/// Per-customer HighXofY baseline; independent of any reading on or after
/// the event day.
BaselineCurve high_x_of_y(const LoadDataset& d, const CustomerId& customer,
                          const EventSchedule& s, Date event_day,
                          const HighXofYConfig& cfg);

/// HighXofY on an aggregate (or any single) series.
BaselineCurve high_x_of_y(const LoadSeries& series, const EventSchedule& s,
                          Date event_day, const HighXofYConfig& cfg);

/// Uniformly random split with |control| = round(fraction * N), at least 1
/// on each side. Deterministic in (customer order, fraction, seed).
PopulationSplit rct_split(const std::vector<CustomerId>& customers,
                          double control_fraction, std::uint64_t seed);

/// Control-group mean consumption on the event day, assigned to every
/// treatment customer as its baseline. Uses no treatment-group readings.
std::vector<BaselineCurve> rct_baseline_granular(const LoadDataset& d,
                                                 const PopulationSplit& split,
                                                 Date event_day);

/// Control-group aggregate scaled by |treatment|/|control|, so the curve is
/// commensurate with the treatment-group aggregate. Equals the sum of the
/// granular curves.
BaselineCurve rct_baseline_aggregated(const LoadDataset& d,
                                      const PopulationSplit& split,
                                      Date event_day);

} // namespace cbl
