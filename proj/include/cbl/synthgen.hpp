#pragma once

#include <array>
#include <cstdint>

#include "cbl/dataset.hpp"

namespace cbl {

/// Configuration of the synthetic residential load generator.
///
/// The model is multiplicative:
///   reading(i, d, t) = scale_i * seasonal(d) * profile(t) * noise(i, d, t)
/// renormalized so the population-mean hourly consumption equals
/// target_per_capita exactly. Scales and noise are lognormal with unit mean;
/// customer_scale_dispersion and noise_cv are their coefficients of
/// variation. The dispersion default is a free parameter (real population
/// heterogeneity is not publicly documented); it is chosen so that small
/// control groups carry visibly noisy sample means.
struct SynthConfig {
    int n_customers = 199;
    int year = 2012; // leap year, 366 days
    std::array<double, 24> base_profile = {
        0.55, 0.50, 0.45, 0.42, 0.42, 0.45, 0.60, 0.85, 0.95, 0.80, 0.70, 0.68,
        0.66, 0.64, 0.65, 0.72, 0.90, 1.30, 1.55, 1.60, 1.45, 1.15, 0.85, 0.65};
    double seasonal_amplitude = 0.25;       // two-hump annual sinusoid
    double customer_scale_dispersion = 0.6; // cv of per-customer scales
    double noise_cv = 0.35;                 // cv of hourly multiplicative noise
    double target_per_capita = 1.9;         // kWh per customer per hour
    std::uint64_t seed = 1;

    void validate() const; // throws ConfigError
};

/// Seasonal multiplier for a 0-based day of year: unit-mean sinusoid with
/// two peaks (southern-hemisphere summer in January, winter in July).
double seasonal_factor(int day_of_year, int days_in_year, double amplitude);

/// Deterministic synthetic dataset; same config => bit-identical readings.
LoadDataset generate(const SynthConfig& cfg);

/// One event day per calendar month: the day with the highest population
/// total, ties broken toward the earlier date. Window defaults to [15, 21).
/// Throws CoverageError when the dataset spans fewer than 12 months.
EventSchedule default_event_schedule(const LoadDataset& d);

} // namespace cbl
