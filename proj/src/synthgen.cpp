#include "cbl/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "cbl/errors.hpp"
#include "cbl/rng.hpp"
#include "cbl/stats.hpp"

namespace cbl {

void SynthConfig::validate() const {
    if (n_customers < 2) throw ConfigError("n_customers must be at least 2");
    if (year < 1900 || year > 2200) throw ConfigError("implausible year");
    if (noise_cv < 0.0) throw ConfigError("noise_cv must be >= 0");
    if (customer_scale_dispersion < 0.0) {
        throw ConfigError("customer_scale_dispersion must be >= 0");
    }
    if (!(target_per_capita > 0.0)) {
        throw ConfigError("target_per_capita must be > 0");
    }
    if (seasonal_amplitude < 0.0 || seasonal_amplitude >= 1.0) {
        throw ConfigError("seasonal_amplitude must be in [0, 1)");
    }
    double profile_sum = 0.0;
    for (double w : base_profile) {
        if (w < 0.0 || !std::isfinite(w)) {
            throw ConfigError("base_profile weights must be finite and >= 0");
        }
        profile_sum += w;
    }
    if (!(profile_sum > 0.0)) {
        throw ConfigError("base_profile weights must sum to a positive value");
    }
}

double seasonal_factor(int day_of_year, int days_in_year, double amplitude) {
    // Peaks near late January and late July; the phase keeps the monthly
    // maximum days well clear of the start of the year so baseline methods
    // always find enough history before the first event.
    constexpr double phase_days = 25.0;
    return 1.0 + amplitude *
                     std::cos(4.0 * std::numbers::pi *
                              (day_of_year - phase_days) / days_in_year);
}

LoadDataset generate(const SynthConfig& cfg) {
    cfg.validate();

    const Date first_day = Date::from_ymd(cfg.year, 1, 1);
    const Date next_year = Date::from_ymd(cfg.year + 1, 1, 1);
    const int n_days = next_year - first_day;
    const int n = cfg.n_customers;

    std::vector<CustomerId> ids;
    ids.reserve(n);
    const int width = std::max(3, static_cast<int>(std::to_string(n).size()));
    for (int i = 1; i <= n; ++i) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "c%0*d", width, i);
        ids.emplace_back(buf);
    }

    std::array<double, 24> profile = cfg.base_profile;
    double profile_mean = 0.0;
    for (double w : profile) profile_mean += w;
    profile_mean /= 24.0;
    for (double& w : profile) w /= profile_mean;

    auto eng = make_engine(cfg.seed);
    std::vector<double> scales(n);
    for (int i = 0; i < n; ++i) {
        scales[i] = unit_mean_lognormal(eng, cfg.customer_scale_dispersion);
    }

    std::vector<double> season(n_days);
    for (int d = 0; d < n_days; ++d) {
        season[d] = seasonal_factor(d, n_days, cfg.seasonal_amplitude);
    }

    std::vector<double> readings(static_cast<std::size_t>(n) * n_days * 24);
    std::size_t out = 0;
    NeumaierSum total;
    for (int i = 0; i < n; ++i) {
        for (int d = 0; d < n_days; ++d) {
            const double level = scales[i] * season[d];
            for (int t = 0; t < 24; ++t) {
                const double v =
                    level * profile[t] * unit_mean_lognormal(eng, cfg.noise_cv);
                readings[out++] = v;
                total.add(v);
            }
        }
    }

    // Renormalize so the population-mean hourly consumption hits the target.
    const double realized = total.value() / static_cast<double>(readings.size());
    const double k = cfg.target_per_capita / realized;
    for (double& v : readings) v *= k;

    return LoadDataset(std::move(ids), first_day, n_days, 24, std::move(readings));
}

EventSchedule default_event_schedule(const LoadDataset& d) {
    std::map<std::pair<int, unsigned>, std::pair<Date, double>> best; // month -> (day, total)
    for (int di = 0; di < d.n_days(); ++di) {
        const Date day = d.day_at(di);
        const double total = d.population_day_total(di);
        const auto key = std::make_pair(day.year(), day.month());
        auto it = best.find(key);
        if (it == best.end() || total > it->second.second) {
            best[key] = {day, total}; // strict > keeps the earliest day on ties
        }
    }
    if (best.size() < 12) {
        throw CoverageError("dataset spans " + std::to_string(best.size()) +
                            " months; 12 are required for a default schedule");
    }
    EventSchedule schedule;
    for (const auto& [month, pick] : best) schedule.event_days.push_back(pick.first);
    std::sort(schedule.event_days.begin(), schedule.event_days.end());
    return schedule;
}

} // namespace cbl
