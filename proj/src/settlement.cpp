#include "cbl/settlement.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cbl/errors.hpp"
#include "cbl/stats.hpp"

namespace cbl {

void TariffSchedule::validate() const {
    if (!(incentive_rate > 0.0) || !(retail_rate > 0.0)) {
        throw ConfigError("tariff rates must be positive");
    }
}

SettlementRecord ptr_settle(const BaselineCurve& baseline,
                            std::span<const double> actual_full_day,
                            SlotRange window, const TariffSchedule& tariff) {
    tariff.validate();
    if (baseline.values.size() != actual_full_day.size()) {
        throw ArgumentError("baseline and actual curves cover different days");
    }
    const int slots = static_cast<int>(actual_full_day.size());
    if (!(window.begin >= 0 && window.begin < window.end && window.end <= slots)) {
        throw ArgumentError("settlement window outside the day");
    }
    for (double v : actual_full_day) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw DataError("negative or non-finite reading on " +
                            baseline.event_day.to_string());
        }
    }
    for (double v : baseline.values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw DataError("negative or non-finite baseline value on " +
                            baseline.event_day.to_string());
        }
    }

    NeumaierSum flr;
    for (int t = window.begin; t < window.end; ++t) {
        flr.add(std::max(0.0, baseline.values[t] - actual_full_day[t]));
    }
    NeumaierSum consumption;
    for (double v : actual_full_day) consumption.add(v);

    SettlementRecord rec;
    rec.subject = baseline.subject;
    rec.event_day = baseline.event_day;
    rec.flr_energy_kwh = flr.value();
    rec.event_day_consumption_kwh = consumption.value();
    rec.rebate = Money::from_dollars(tariff.incentive_rate * rec.flr_energy_kwh);
    rec.revenue =
        Money::from_dollars(tariff.retail_rate * rec.event_day_consumption_kwh);
    if (rec.event_day_consumption_kwh > 0.0) {
        rec.flr_pct = 100.0 * rec.flr_energy_kwh / rec.event_day_consumption_kwh;
        rec.rebate_pct_of_revenue =
            100.0 * (tariff.incentive_rate * rec.flr_energy_kwh) /
            (tariff.retail_rate * rec.event_day_consumption_kwh);
    }
    return rec;
}

SettlementReport settle_population(const CurveTable& baselines,
                                   const CurveTable& actuals,
                                   const EventSchedule& schedule,
                                   const TariffSchedule& tariff,
                                   SettlementMode mode, double ci_level) {
    tariff.validate();
    if (baselines.size() == 0) throw CoverageError("no baselines to settle");

    // Collect subjects from the baseline table and check it is rectangular
    // over the schedule's event days.
    std::set<std::string> subjects;
    for (const auto& [key, values] : baselines) subjects.insert(key.first);
    if (mode == SettlementMode::aggregated && subjects.size() != 1) {
        throw ArgumentError("aggregated settlement expects a single subject");
    }

    SettlementReport report;
    report.mode = mode;
    NeumaierSum total_flr, total_consumption;
    std::vector<double> day_flr_pct, day_rebate_pct;

    for (Date day : schedule.event_days) {
        NeumaierSum flr, consumption;
        Money rebate, revenue;
        for (const auto& subject : subjects) {
            const auto* b = baselines.find(subject, day);
            const auto* a = actuals.find(subject, day);
            if (b == nullptr) {
                throw CoverageError("no baseline for subject '" + subject +
                                    "' on " + day.to_string());
            }
            if (a == nullptr) {
                throw CoverageError("no actual consumption for subject '" +
                                    subject + "' on " + day.to_string());
            }
            BaselineCurve curve{subject == kAggregateSubject
                                    ? std::optional<CustomerId>{}
                                    : std::optional<CustomerId>{subject},
                                day, *b};
            const auto rec =
                ptr_settle(curve, *a, schedule.event_window, tariff);
            flr.add(rec.flr_energy_kwh);
            consumption.add(rec.event_day_consumption_kwh);
            rebate += rec.rebate;
            revenue += rec.revenue;
        }
        DaySettlement ds;
        ds.day = day;
        ds.flr_kwh = flr.value();
        ds.consumption_kwh = consumption.value();
        ds.rebate = rebate;
        ds.revenue = revenue;
        if (ds.consumption_kwh > 0.0) {
            ds.flr_pct = 100.0 * ds.flr_kwh / ds.consumption_kwh;
            ds.rebate_pct = 100.0 * (tariff.incentive_rate * ds.flr_kwh) /
                            (tariff.retail_rate * ds.consumption_kwh);
        }
        day_flr_pct.push_back(ds.flr_pct);
        day_rebate_pct.push_back(ds.rebate_pct);
        total_flr.add(ds.flr_kwh);
        total_consumption.add(ds.consumption_kwh);
        report.total_rebate += ds.rebate;
        report.total_revenue += ds.revenue;
        report.per_day.push_back(std::move(ds));
    }

    report.total_flr_kwh = total_flr.value();
    report.total_consumption_kwh = total_consumption.value();
    report.mean_flr_pct = mean(day_flr_pct);
    report.mean_rebate_pct = mean(day_rebate_pct);
    if (day_flr_pct.size() >= 2) {
        report.flr_pct_ci = confidence_interval(day_flr_pct, ci_level);
        report.rebate_pct_ci = confidence_interval(day_rebate_pct, ci_level);
    } else {
        report.flr_pct_ci = {report.mean_flr_pct, report.mean_flr_pct};
        report.rebate_pct_ci = {report.mean_rebate_pct, report.mean_rebate_pct};
    }
    if (report.total_consumption_kwh > 0.0) {
        report.pooled_flr_pct =
            100.0 * report.total_flr_kwh / report.total_consumption_kwh;
        report.pooled_rebate_pct =
            100.0 * (tariff.incentive_rate * report.total_flr_kwh) /
            (tariff.retail_rate * report.total_consumption_kwh);
    }
    return report;
}

SettlementReport settle_population(std::span<const BaselineCurve> baselines,
                                   const LoadDataset& d,
                                   const EventSchedule& schedule,
                                   const TariffSchedule& tariff) {
    std::set<CustomerId> subject_set;
    for (const auto& curve : baselines) {
        if (!curve.subject) {
            throw ArgumentError(
                "granular settlement needs per-customer baselines");
        }
        subject_set.insert(*curve.subject);
    }
    const std::vector<CustomerId> subjects(subject_set.begin(), subject_set.end());
    const auto actuals =
        CurveTable::from_dataset(d, subjects, schedule.event_days);
    return settle_population(CurveTable::from_curves(baselines), actuals,
                             schedule, tariff, SettlementMode::granular);
}

} // namespace cbl
