#include "cbl/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "cbl/errors.hpp"
#include "cbl/rng.hpp"
#include "cbl/stats.hpp"

namespace cbl {

void HighXofYConfig::validate() const {
    if (x < 1 || x > y) {
        throw ConfigError("HighXofY needs 1 <= x <= y, got x=" +
                          std::to_string(x) + " y=" + std::to_string(y));
    }
}

std::vector<Date> eligible_days(Date history_start, const EventSchedule& s,
                                Date event_day, const HighXofYConfig& cfg) {
    cfg.validate();
    if (!s.is_event_day(event_day)) {
        throw ArgumentError(event_day.to_string() +
                            " is not an event day of the schedule");
    }
    std::vector<Date> days;
    days.reserve(cfg.y);
    for (Date d = event_day - 1; d >= history_start; d = d - 1) {
        if (cfg.exclude_prior_event_days && s.is_event_day(d)) continue;
        if (cfg.exclude_holidays && s.is_holiday(d)) continue;
        if (!cfg.include_weekends && d.is_weekend()) continue;
        days.push_back(d);
        if (static_cast<int>(days.size()) == cfg.y) return days;
    }
    throw InsufficientHistoryError(
        "only " + std::to_string(days.size()) + " of " + std::to_string(cfg.y) +
        " qualifying days exist before " + event_day.to_string());
}

namespace {

/// Day-major view over one subject's contiguous history block.
struct HistoryView {
    Date first_day;
    int slots;
    std::span<const double> block;

    std::span<const double> day(Date d) const {
        return block.subspan(
            static_cast<std::size_t>(d - first_day) * slots,
            static_cast<std::size_t>(slots));
    }
};

HighXofYSelection high_x_of_y_core(const HistoryView& view,
                                   std::optional<CustomerId> subject,
                                   const EventSchedule& s, Date event_day,
                                   const HighXofYConfig& cfg) {
    HighXofYSelection result;
    result.eligible = eligible_days(view.first_day, s, event_day, cfg);

    // eligible is most-recent-first; a stable sort on the daily mean keeps
    // the required tie-break (more recent day wins) for free.
    struct Candidate {
        Date date;
        double mean;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(result.eligible.size());
    for (Date d : result.eligible) {
        const auto slots = view.day(d);
        NeumaierSum sum;
        for (double v : slots) sum.add(v);
        candidates.push_back({d, sum.value() / static_cast<double>(view.slots)});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                         return a.mean > b.mean;
                     });

    std::vector<double> values(static_cast<std::size_t>(view.slots), 0.0);
    for (int i = 0; i < cfg.x; ++i) {
        result.selected.push_back(candidates[i].date);
        const auto slots = view.day(candidates[i].date);
        for (int t = 0; t < view.slots; ++t) values[t] += slots[t];
    }
    for (double& v : values) v /= static_cast<double>(cfg.x);

    result.curve = BaselineCurve{std::move(subject), event_day, std::move(values)};
    return result;
}

void require_event_day_covered(Date event_day, Date first, Date last) {
    if (event_day < first || event_day > last) {
        throw MembershipError("event day " + event_day.to_string() +
                              " not covered by the load data");
    }
}

std::vector<int> resolve_indices(const LoadDataset& d,
                                 const std::vector<CustomerId>& ids) {
    std::vector<int> idx;
    idx.reserve(ids.size());
    for (const auto& id : ids) idx.push_back(d.customer_index(id));
    return idx;
}

} // namespace

HighXofYSelection high_x_of_y_detail(const LoadDataset& d,
                                     const CustomerId& customer,
                                     const EventSchedule& s, Date event_day,
                                     const HighXofYConfig& cfg) {
    require_event_day_covered(event_day, d.first_day(), d.last_day());
    const int ci = d.customer_index(customer);
    const HistoryView view{d.first_day(), d.slots_per_day(), d.customer_block(ci)};
    return high_x_of_y_core(view, customer, s, event_day, cfg);
}

HighXofYSelection high_x_of_y_detail(const LoadSeries& series,
                                     const EventSchedule& s, Date event_day,
                                     const HighXofYConfig& cfg) {
    require_event_day_covered(event_day, series.first_day(), series.last_day());
    const HistoryView view{series.first_day(), series.slots_per_day(),
                           series.values()};
    return high_x_of_y_core(view, std::nullopt, s, event_day, cfg);
}

BaselineCurve high_x_of_y(const LoadDataset& d, const CustomerId& customer,
                          const EventSchedule& s, Date event_day,
                          const HighXofYConfig& cfg) {
    return high_x_of_y_detail(d, customer, s, event_day, cfg).curve;
}

BaselineCurve high_x_of_y(const LoadSeries& series, const EventSchedule& s,
                          Date event_day, const HighXofYConfig& cfg) {
    return high_x_of_y_detail(series, s, event_day, cfg).curve;
}

PopulationSplit rct_split(const std::vector<CustomerId>& customers,
                          double control_fraction, std::uint64_t seed) {
    const std::size_t n = customers.size();
    if (!(control_fraction > 0.0 && control_fraction < 1.0)) {
        throw ArgumentError("control_fraction must lie strictly between 0 and 1");
    }
    std::size_t n_control = static_cast<std::size_t>(
        std::llround(control_fraction * static_cast<double>(n)));
    n_control = std::max<std::size_t>(n_control, 1);
    if (n_control >= n) {
        throw ArgumentError("split leaves no treatment customers (n=" +
                            std::to_string(n) + ", fraction=" +
                            std::to_string(control_fraction) + ")");
    }

    // Partial Fisher-Yates: the first n_control slots end up a uniformly
    // random subset.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    auto eng = make_engine(seed);
    for (std::size_t i = 0; i < n_control; ++i) {
        const std::size_t j = i + bounded_uniform(eng, n - i);
        std::swap(order[i], order[j]);
    }
    std::vector<bool> in_control(n, false);
    for (std::size_t i = 0; i < n_control; ++i) in_control[order[i]] = true;

    PopulationSplit split;
    split.control_fraction = control_fraction;
    split.seed = seed;
    split.control.reserve(n_control);
    split.treatment.reserve(n - n_control);
    for (std::size_t i = 0; i < n; ++i) {
        (in_control[i] ? split.control : split.treatment).push_back(customers[i]);
    }
    return split;
}

namespace {

std::vector<double> control_mean_curve(const LoadDataset& d,
                                       const PopulationSplit& split,
                                       Date event_day) {
    if (split.control.empty()) throw ArgumentError("empty control group");
    if (split.treatment.empty()) throw ArgumentError("empty treatment group");
    if (split.control.size() + split.treatment.size() != d.n_customers()) {
        throw ArgumentError("split does not cover the dataset population");
    }
    const int di = d.day_index(event_day);
    const auto control_idx = resolve_indices(d, split.control);

    std::vector<double> mean(static_cast<std::size_t>(d.slots_per_day()), 0.0);
    for (int ci : control_idx) {
        const auto slots = d.day(ci, di);
        for (int t = 0; t < d.slots_per_day(); ++t) mean[t] += slots[t];
    }
    for (double& v : mean) v /= static_cast<double>(control_idx.size());
    return mean;
}

} // namespace

std::vector<BaselineCurve> rct_baseline_granular(const LoadDataset& d,
                                                 const PopulationSplit& split,
                                                 Date event_day) {
    const auto mean = control_mean_curve(d, split, event_day);
    std::vector<BaselineCurve> curves;
    curves.reserve(split.treatment.size());
    for (const auto& id : split.treatment) {
        d.customer_index(id); // membership check
        curves.push_back(BaselineCurve{id, event_day, mean});
    }
    return curves;
}

BaselineCurve rct_baseline_aggregated(const LoadDataset& d,
                                      const PopulationSplit& split,
                                      Date event_day) {
    auto mean = control_mean_curve(d, split, event_day);
    const double scale = static_cast<double>(split.treatment.size());
    for (double& v : mean) v *= scale;
    return BaselineCurve{std::nullopt, event_day, std::move(mean)};
}

} // namespace cbl
