#pragma once

// Thin wrappers over Boost.Math adaptive quadrature so the rest of the
// library does not depend on Boost headers directly.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vg::detail {

/// Adaptive Gauss-Kronrod (7/15) on a finite interval. The tolerance is
/// relative to max(|integral|, mean |f|), so a short interval is not refined
/// below the rounding floor of the integrand.
template <class F>
double integrate_gk(F&& f, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 12) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    if (a == b) return 0.0;
    double error = 0.0;
    double l1 = 0.0;
    const double single = GK::integrate(f, a, b, 0, rel_tol, &error, &l1);
    const double scale = std::max(std::abs(single), l1 / std::abs(b - a));
    if (error <= rel_tol * scale) {
        return single;
    }
    return GK::integrate(f, a, b, max_depth, rel_tol, &error);
}

/// Double-exponential quadrature; tolerates integrable endpoint singularities.
template <class F>
double integrate_tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-12) {
    if (a == b) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
    return integrator.integrate(f, a, b, rel_tol);
}

/// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace vg::detail
