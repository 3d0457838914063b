#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "cbl/baseline.hpp"
#include "cbl/dataset.hpp"

namespace cbl {

/// Subject label used for aggregate curves in tables and CSV output.
inline const std::string kAggregateSubject = "aggregate";

/// Full-day curves keyed by (subject, day). Both baselines and actuals are
/// expressed this way so error metrics see them symmetrically.
class CurveTable {
public:
    void insert(std::string subject, Date day, std::vector<double> values);
    const std::vector<double>* find(const std::string& subject, Date day) const;
    std::size_t size() const { return cells_.size(); }

    static CurveTable from_curves(std::span<const BaselineCurve> curves);
    /// Actual consumption of the given customers on the given days.
    static CurveTable from_dataset(const LoadDataset& d,
                                   std::span<const CustomerId> subjects,
                                   std::span<const Date> days);
    /// Actual consumption of an aggregate series on the given days.
    static CurveTable from_series(const LoadSeries& s,
                                  std::span<const Date> days,
                                  const std::string& subject = kAggregateSubject);

    auto begin() const { return cells_.begin(); }
    auto end() const { return cells_.end(); }

private:
    std::map<std::pair<std::string, Date>, std::vector<double>> cells_;
};

/// The (subjects x days x slots) region a metric is evaluated over.
struct EvalWindow {
    std::vector<std::string> subjects;
    std::vector<Date> days;
    SlotRange slots;

    void validate() const; // throws ArgumentError
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Mean absolute error between baselines and actuals over the window.
double mae(const CurveTable& baselines, const CurveTable& actuals,
           const EvalWindow& w);

/// Mean signed error; positive means the baseline overestimates consumption.
double bias(const CurveTable& baselines, const CurveTable& actuals,
            const EvalWindow& w);

/// Overall performance index: lambda*|alpha| + (1-lambda)*|beta|.
double opi(double alpha, double beta, double lambda = 0.5);

/// Student-t confidence interval around the sample mean.
Interval confidence_interval(std::span<const double> samples, double level);

/// Aggregate-level metric scaled to a per-customer figure.
double per_capita(double metric, std::size_t treatment_count);

struct DayMetrics {
    Date day;
    double alpha = 0.0;
    double beta = 0.0;
};

/// Error metrics over a window plus per-day breakdown and 95% confidence
/// intervals across the window's days.
struct MetricsReport {
    double alpha = 0.0;
    double beta = 0.0;
    double opi = 0.0;
    double lambda = 0.5;
    std::vector<DayMetrics> per_day;
    Interval alpha_ci, beta_ci, opi_ci;

    /// Divides every figure by the population size (aggregated-mode
    /// reporting); OPI and intervals scale linearly.
    MetricsReport scaled(double divisor) const;
};

MetricsReport evaluate_metrics(const CurveTable& baselines,
                               const CurveTable& actuals, const EvalWindow& w,
                               double lambda = 0.5, double ci_level = 0.95);

} // namespace cbl
