#include "cbl/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "cbl/errors.hpp"
#include "cbl/stats.hpp"

namespace cbl {

LoadSeries::LoadSeries(Date first_day, int n_days, int slots_per_day,
                       std::vector<double> values)
    : first_day_(first_day), n_days_(n_days), slots_per_day_(slots_per_day),
      values_(std::move(values)) {
    if (n_days_ <= 0 || slots_per_day_ <= 0) {
        throw ArgumentError("series needs at least one day and one slot");
    }
    if (values_.size() != static_cast<std::size_t>(n_days_) * slots_per_day_) {
        throw ArgumentError("series value count does not match day/slot shape");
    }
}

int LoadSeries::day_index(Date d) const {
    if (!contains_day(d)) {
        throw MembershipError("date " + d.to_string() + " not covered by series");
    }
    return d - first_day_;
}

double LoadSeries::day_total(int day_index) const {
    NeumaierSum s;
    for (double v : day(day_index)) s.add(v);
    return s.value();
}

LoadDataset::LoadDataset(std::vector<CustomerId> customers, Date first_day,
                         int n_days, int slots_per_day,
                         std::vector<double> readings)
    : customers_(std::move(customers)), first_day_(first_day), n_days_(n_days),
      slots_per_day_(slots_per_day), readings_(std::move(readings)) {
    if (customers_.empty()) throw ArgumentError("dataset needs at least one customer");
    if (n_days_ <= 0 || slots_per_day_ <= 0) {
        throw ArgumentError("dataset needs at least one day and one slot");
    }
    if (readings_.size() !=
        customers_.size() * static_cast<std::size_t>(n_days_) * slots_per_day_) {
        throw ArgumentError("reading count does not match customer/day/slot shape");
    }
    index_.reserve(customers_.size());
    for (std::size_t i = 0; i < customers_.size(); ++i) {
        if (!index_.emplace(customers_[i], static_cast<int>(i)).second) {
            throw ArgumentError("duplicate customer id '" + customers_[i] + "'");
        }
    }
}

int LoadDataset::customer_index(const CustomerId& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) {
        throw MembershipError("unknown customer id '" + id + "'");
    }
    return it->second;
}

int LoadDataset::day_index(Date d) const {
    if (!contains_day(d)) {
        throw MembershipError("date " + d.to_string() + " not covered by dataset");
    }
    return d - first_day_;
}

double LoadDataset::population_day_total(int day_index) const {
    NeumaierSum s;
    for (std::size_t c = 0; c < customers_.size(); ++c) {
        for (double v : day(static_cast<int>(c), day_index)) s.add(v);
    }
    return s.value();
}

bool EventSchedule::is_event_day(Date d) const {
    return std::binary_search(event_days.begin(), event_days.end(), d);
}

bool EventSchedule::is_holiday(Date d) const {
    return std::binary_search(holidays.begin(), holidays.end(), d);
}

void EventSchedule::validate_against(const LoadDataset& d) const {
    if (event_days.empty()) throw ArgumentError("schedule has no event days");
    if (!std::is_sorted(event_days.begin(), event_days.end()) ||
        std::adjacent_find(event_days.begin(), event_days.end()) != event_days.end()) {
        throw ArgumentError("event days must be sorted and distinct");
    }
    if (!std::is_sorted(holidays.begin(), holidays.end())) {
        throw ArgumentError("holidays must be sorted");
    }
    for (Date ev : event_days) {
        if (!d.contains_day(ev)) {
            throw ArgumentError("event day " + ev.to_string() +
                                " outside dataset range");
        }
        if (is_holiday(ev)) {
            throw ArgumentError("event day " + ev.to_string() +
                                " is also a holiday");
        }
    }
    if (!(event_window.begin >= 0 && event_window.begin < event_window.end &&
          event_window.end <= d.slots_per_day())) {
        throw ArgumentError("event window outside the day's slot range");
    }
}

ValidationReport validate(const LoadDataset& d) {
    ValidationReport report;
    const int nd = d.n_days();
    const int ns = d.slots_per_day();
    std::vector<bool> day_has_reading(static_cast<std::size_t>(nd), false);

    for (std::size_t c = 0; c < d.n_customers(); ++c) {
        for (int di = 0; di < nd; ++di) {
            const auto slots = d.day(static_cast<int>(c), di);
            for (int t = 0; t < ns; ++t) {
                const double v = slots[t];
                if (std::isnan(v)) {
                    report.missing_cells.push_back(
                        {d.customers()[c], d.day_at(di), t});
                } else {
                    day_has_reading[di] = true;
                    if (v < 0.0) {
                        report.negative_cells.push_back(
                            {d.customers()[c], d.day_at(di), t});
                    }
                }
            }
        }
    }
    for (int di = 0; di < nd; ++di) {
        if (!day_has_reading[di]) report.gap_days.push_back(d.day_at(di));
    }
    return report;
}

LoadDataset resample_to_hourly(const LoadDataset& d) {
    const int ns = d.slots_per_day();
    if (ns % 24 != 0) {
        throw ShapeError("slots_per_day " + std::to_string(ns) +
                         " is not divisible by 24");
    }
    const int k = ns / 24;
    if (k == 1) return d;

    const std::size_t n_c = d.n_customers();
    const int nd = d.n_days();
    std::vector<double> hourly(n_c * static_cast<std::size_t>(nd) * 24);
    std::size_t out = 0;
    for (std::size_t c = 0; c < n_c; ++c) {
        for (int di = 0; di < nd; ++di) {
            const auto slots = d.day(static_cast<int>(c), di);
            for (int h = 0; h < 24; ++h) {
                double sum = 0.0;
                for (int j = 0; j < k; ++j) sum += slots[h * k + j];
                hourly[out++] = sum;
            }
        }
    }
    return LoadDataset(d.customers(), d.first_day(), nd, 24, std::move(hourly));
}

LoadSeries aggregate(const LoadDataset& d, std::span<const CustomerId> who) {
    if (who.empty()) throw ArgumentError("aggregate over an empty customer set");
    std::vector<int> idx;
    idx.reserve(who.size());
    for (const auto& id : who) idx.push_back(d.customer_index(id));

    const std::size_t cells =
        static_cast<std::size_t>(d.n_days()) * d.slots_per_day();
    std::vector<double> sums(cells, 0.0);
    for (int ci : idx) {
        const auto block = d.customer_block(ci);
        for (std::size_t i = 0; i < cells; ++i) sums[i] += block[i];
    }
    return LoadSeries(d.first_day(), d.n_days(), d.slots_per_day(), std::move(sums));
}

} // namespace cbl
