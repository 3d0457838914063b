#include "cbl/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "cbl/errors.hpp"

namespace cbl {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw ArgumentError("mean of empty sample");
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value() / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    NeumaierSum s;
    for (double x : xs) s.add((x - m) * (x - m));
    return std::sqrt(s.value() / static_cast<double>(xs.size() - 1));
}

double student_t_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw ArgumentError("t quantile needs p in (0,1)");
    if (!(dof > 0.0)) throw ArgumentError("t quantile needs dof > 0");
    return boost::math::quantile(boost::math::students_t(dof), p);
}

double chi_squared_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw ArgumentError("chi2 quantile needs p in (0,1)");
    return boost::math::quantile(boost::math::chi_squared(dof), p);
}

double student_t_cdf(double t, double dof) {
    return boost::math::cdf(boost::math::students_t(dof), t);
}

} // namespace cbl
