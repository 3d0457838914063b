#include "cbl/metrics.hpp"

#include <cmath>
#include <set>

#include "cbl/errors.hpp"
#include "cbl/stats.hpp"

namespace cbl {

void CurveTable::insert(std::string subject, Date day,
                        std::vector<double> values) {
    cells_[{std::move(subject), day}] = std::move(values);
}

const std::vector<double>* CurveTable::find(const std::string& subject,
                                            Date day) const {
    const auto it = cells_.find({subject, day});
    return it == cells_.end() ? nullptr : &it->second;
}

CurveTable CurveTable::from_curves(std::span<const BaselineCurve> curves) {
    CurveTable table;
    for (const auto& curve : curves) {
        table.insert(curve.subject.value_or(kAggregateSubject), curve.event_day,
                     curve.values);
    }
    return table;
}

CurveTable CurveTable::from_dataset(const LoadDataset& d,
                                    std::span<const CustomerId> subjects,
                                    std::span<const Date> days) {
    CurveTable table;
    for (const auto& id : subjects) {
        const int ci = d.customer_index(id);
        for (Date day : days) {
            const auto slots = d.day(ci, d.day_index(day));
            table.insert(id, day, {slots.begin(), slots.end()});
        }
    }
    return table;
}

CurveTable CurveTable::from_series(const LoadSeries& s,
                                   std::span<const Date> days,
                                   const std::string& subject) {
    CurveTable table;
    for (Date day : days) {
        const auto slots = s.day(s.day_index(day));
        table.insert(subject, day, {slots.begin(), slots.end()});
    }
    return table;
}

void EvalWindow::validate() const {
    if (subjects.empty()) throw ArgumentError("evaluation window has no subjects");
    if (days.empty()) throw ArgumentError("evaluation window has no days");
    if (!(slots.begin >= 0 && slots.begin < slots.end)) {
        throw ArgumentError("evaluation window has an empty slot range");
    }
    if (std::set<std::string>(subjects.begin(), subjects.end()).size() !=
        subjects.size()) {
        throw ArgumentError("evaluation window repeats a subject");
    }
    if (std::set<Date>(days.begin(), days.end()).size() != days.size()) {
        throw ArgumentError("evaluation window repeats a day");
    }
}

namespace {

/// Walks every (subject, day) cell of the window, handing the baseline and
/// actual slot spans to fn. Throws CoverageError on any missing cell.
template <typename Fn>
void for_each_cell(const CurveTable& baselines, const CurveTable& actuals,
                   const EvalWindow& w, Fn&& fn) {
    w.validate();
    for (const auto& subject : w.subjects) {
        for (Date day : w.days) {
            const auto* b = baselines.find(subject, day);
            const auto* a = actuals.find(subject, day);
            if (b == nullptr || a == nullptr) {
                throw CoverageError("no " +
                                    std::string(b == nullptr ? "baseline" : "actual") +
                                    " for subject '" + subject + "' on " +
                                    day.to_string());
            }
            if (static_cast<int>(b->size()) < w.slots.end ||
                static_cast<int>(a->size()) < w.slots.end) {
                throw CoverageError("curve for subject '" + subject + "' on " +
                                    day.to_string() +
                                    " does not span the slot window");
            }
            fn(day, *b, *a);
        }
    }
}

} // namespace

double mae(const CurveTable& baselines, const CurveTable& actuals,
           const EvalWindow& w) {
    NeumaierSum sum;
    std::size_t cells = 0;
    for_each_cell(baselines, actuals, w,
                  [&](Date, const std::vector<double>& b,
                      const std::vector<double>& a) {
                      for (int t = w.slots.begin; t < w.slots.end; ++t) {
                          sum.add(std::abs(b[t] - a[t]));
                          ++cells;
                      }
                  });
    return sum.value() / static_cast<double>(cells);
}

double bias(const CurveTable& baselines, const CurveTable& actuals,
            const EvalWindow& w) {
    NeumaierSum sum;
    std::size_t cells = 0;
    for_each_cell(baselines, actuals, w,
                  [&](Date, const std::vector<double>& b,
                      const std::vector<double>& a) {
                      for (int t = w.slots.begin; t < w.slots.end; ++t) {
                          sum.add(b[t] - a[t]);
                          ++cells;
                      }
                  });
    return sum.value() / static_cast<double>(cells);
}

double opi(double alpha, double beta, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw ArgumentError("OPI weight must lie in [0, 1]");
    }
    return lambda * std::abs(alpha) + (1.0 - lambda) * std::abs(beta);
}

Interval confidence_interval(std::span<const double> samples, double level) {
    if (samples.size() < 2) {
        throw ArgumentError("confidence interval needs at least 2 samples");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw ArgumentError("confidence level must lie strictly between 0 and 1");
    }
    const double m = mean(samples);
    const double sd = sample_sd(samples);
    const double n = static_cast<double>(samples.size());
    const double t = student_t_quantile(0.5 * (1.0 + level), n - 1.0);
    const double half = t * sd / std::sqrt(n);
    return {m - half, m + half};
}

double per_capita(double metric, std::size_t treatment_count) {
    if (treatment_count < 1) {
        throw ArgumentError("per-capita normalization needs a positive count");
    }
    return metric / static_cast<double>(treatment_count);
}

MetricsReport MetricsReport::scaled(double divisor) const {
    MetricsReport out = *this;
    const auto scale = [divisor](double v) { return v / divisor; };
    out.alpha = scale(alpha);
    out.beta = scale(beta);
    out.opi = scale(opi);
    for (auto& day : out.per_day) {
        day.alpha = scale(day.alpha);
        day.beta = scale(day.beta);
    }
    out.alpha_ci = {scale(alpha_ci.lo), scale(alpha_ci.hi)};
    out.beta_ci = {scale(beta_ci.lo), scale(beta_ci.hi)};
    out.opi_ci = {scale(opi_ci.lo), scale(opi_ci.hi)};
    return out;
}

MetricsReport evaluate_metrics(const CurveTable& baselines,
                               const CurveTable& actuals, const EvalWindow& w,
                               double lambda, double ci_level) {
    MetricsReport report;
    report.lambda = lambda;

    std::map<Date, std::pair<NeumaierSum, NeumaierSum>> day_sums; // |b-a|, b-a
    std::map<Date, std::size_t> day_cells;
    for_each_cell(baselines, actuals, w,
                  [&](Date day, const std::vector<double>& b,
                      const std::vector<double>& a) {
                      auto& [abs_sum, signed_sum] = day_sums[day];
                      for (int t = w.slots.begin; t < w.slots.end; ++t) {
                          const double diff = b[t] - a[t];
                          abs_sum.add(std::abs(diff));
                          signed_sum.add(diff);
                      }
                      day_cells[day] += static_cast<std::size_t>(w.slots.size());
                  });

    NeumaierSum abs_total, signed_total;
    std::size_t cells = 0;
    std::vector<double> day_alpha, day_beta, day_opi;
    for (Date day : w.days) {
        const auto& [abs_sum, signed_sum] = day_sums.at(day);
        const double n = static_cast<double>(day_cells.at(day));
        const double a = abs_sum.value() / n;
        const double b = signed_sum.value() / n;
        report.per_day.push_back({day, a, b});
        day_alpha.push_back(a);
        day_beta.push_back(b);
        day_opi.push_back(opi(a, b, lambda));
        abs_total.add(abs_sum.value());
        signed_total.add(signed_sum.value());
        cells += day_cells.at(day);
    }

    report.alpha = abs_total.value() / static_cast<double>(cells);
    report.beta = signed_total.value() / static_cast<double>(cells);
    report.opi = opi(report.alpha, report.beta, lambda);
    if (w.days.size() >= 2) {
        report.alpha_ci = confidence_interval(day_alpha, ci_level);
        report.beta_ci = confidence_interval(day_beta, ci_level);
        report.opi_ci = confidence_interval(day_opi, ci_level);
    } else {
        report.alpha_ci = {report.alpha, report.alpha};
        report.beta_ci = {report.beta, report.beta};
        report.opi_ci = {report.opi, report.opi};
    }
    return report;
}

} // namespace cbl
