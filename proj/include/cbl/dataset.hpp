#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cbl/date.hpp"

namespace cbl {

using CustomerId = std::string;

/// Half-open range of intraday slots [begin, end).
struct SlotRange {
    int begin = 0;
    int end = 0;

    int size() const { return end - begin; }
    bool contains(int slot) const { return slot >= begin && slot < end; }
};

/// Consumption of a single subject (one customer or an aggregate) over a
/// contiguous day range, day-major: values[day * slots_per_day + slot].
class LoadSeries {
public:
    LoadSeries(Date first_day, int n_days, int slots_per_day,
               std::vector<double> values);

    Date first_day() const { return first_day_; }
    Date last_day() const { return first_day_ + (n_days_ - 1); }
    int n_days() const { return n_days_; }
    int slots_per_day() const { return slots_per_day_; }
    bool contains_day(Date d) const {
        return d >= first_day_ && d - first_day_ < n_days_;
    }
    int day_index(Date d) const; // throws MembershipError when out of range
    Date day_at(int day_index) const { return first_day_ + day_index; }

    double at(int day_index, int slot) const {
        return values_[static_cast<std::size_t>(day_index) * slots_per_day_ + slot];
    }
    std::span<const double> day(int day_index) const {
        return {values_.data() + static_cast<std::size_t>(day_index) * slots_per_day_,
                static_cast<std::size_t>(slots_per_day_)};
    }
    std::span<const double> values() const { return values_; }
    double day_total(int day_index) const;

private:
    Date first_day_;
    int n_days_;
    int slots_per_day_;
    std::vector<double> values_;
};

/// Per-customer interval readings over a contiguous day range. Immutable
/// after construction; NaN marks a missing reading (validate() reports them,
/// all computations require a clean dataset).
///
/// Layout is customer-major then day-major, so one customer's full history
/// is a contiguous block.
class LoadDataset {
public:
    LoadDataset(std::vector<CustomerId> customers, Date first_day, int n_days,
                int slots_per_day, std::vector<double> readings);

    const std::vector<CustomerId>& customers() const { return customers_; }
    std::size_t n_customers() const { return customers_.size(); }
    bool has_customer(const CustomerId& id) const {
        return index_.find(id) != index_.end();
    }
    int customer_index(const CustomerId& id) const; // throws MembershipError

    Date first_day() const { return first_day_; }
    Date last_day() const { return first_day_ + (n_days_ - 1); }
    int n_days() const { return n_days_; }
    int slots_per_day() const { return slots_per_day_; }
    bool contains_day(Date d) const {
        return d >= first_day_ && d - first_day_ < n_days_;
    }
    int day_index(Date d) const; // throws MembershipError
    Date day_at(int day_index) const { return first_day_ + day_index; }

    double at(int customer_index, int day_index, int slot) const {
        return readings_[cell(customer_index, day_index, slot)];
    }
    std::span<const double> day(int customer_index, int day_index) const {
        return {readings_.data() + cell(customer_index, day_index, 0),
                static_cast<std::size_t>(slots_per_day_)};
    }
    /// Contiguous day-major block of one customer's full history.
    std::span<const double> customer_block(int customer_index) const {
        return {readings_.data() + cell(customer_index, 0, 0),
                static_cast<std::size_t>(n_days_) * slots_per_day_};
    }
    std::span<const double> readings() const { return readings_; }

    /// Population total over all customers for one day, all slots.
    double population_day_total(int day_index) const;

private:
    std::size_t cell(int c, int d, int t) const {
        return (static_cast<std::size_t>(c) * n_days_ + d) * slots_per_day_ + t;
    }

    std::vector<CustomerId> customers_;
    std::unordered_map<CustomerId, int> index_;
    Date first_day_;
    int n_days_;
    int slots_per_day_;
    std::vector<double> readings_;
};

/// DR event calendar: which days are events, which intraday window settles,
/// which days are holidays.
struct EventSchedule {
    std::vector<Date> event_days;    // sorted ascending
    SlotRange event_window{15, 21};
    std::vector<Date> holidays;      // sorted ascending

    bool is_event_day(Date d) const;
    bool is_holiday(Date d) const;
    /// Checks the schedule invariants against a dataset; throws ArgumentError.
    void validate_against(const LoadDataset& d) const;
};

struct CellRef {
    CustomerId customer;
    Date day;
    int slot = 0;
};

struct ValidationReport {
    std::vector<CellRef> missing_cells;
    std::vector<CellRef> negative_cells;
    std::vector<Date> gap_days; // days with no reading for any customer

    bool clean() const {
        return missing_cells.empty() && negative_cells.empty() && gap_days.empty();
    }
};

/// Reports every missing, negative, or gap cell. Empty report <=> the
/// dataset satisfies all invariants.
ValidationReport validate(const LoadDataset& d);

/// Sums groups of slots_per_day/24 consecutive readings into hourly values.
/// Daily totals are preserved exactly. Throws ShapeError when slots_per_day
/// is not divisible by 24.
LoadDataset resample_to_hourly(const LoadDataset& d);

/// Sum of the given customers' consumption, slot by slot.
LoadSeries aggregate(const LoadDataset& d, std::span<const CustomerId> who);

} // namespace cbl
