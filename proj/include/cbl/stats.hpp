#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace cbl {

/// Neumaier-compensated accumulator; keeps long sums exact to a few ulps
/// regardless of term count or ordering.
class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double mean(std::span<const double> xs);

/// Sample standard deviation (n-1 denominator); 0 for fewer than 2 samples.
double sample_sd(std::span<const double> xs);

/// Quantile of Student's t distribution with `dof` degrees of freedom.
double student_t_quantile(double p, double dof);

/// Quantile of the chi-squared distribution with `dof` degrees of freedom.
double chi_squared_quantile(double p, double dof);

/// CDF of Student's t distribution.
double student_t_cdf(double t, double dof);

} // namespace cbl
