#pragma once

// Fixed-step second-order solvers for
//   x(t) = xi + int_0^t M(t-s) f(x(s)) ds + H(t)
// and for the comparison ODE y' = M(t) f(y).

#include <cstddef>
#include <string_view>
#include <vector>

#include "vg/forcing.hpp"
#include "vg/measure.hpp"
#include "vg/regvar.hpp"

namespace vg {

/// Upper bound on grid points per solve (the convolution sum is O(N^2)).
inline constexpr std::size_t kMaxSteps = 200000;

struct SolverConfig {
    double step = 0.05;
    double t_max = 400.0;
    double implicit_tol = 1e-12;
    int implicit_max_iter = 50;
    std::vector<double> checkpoints;
    double overflow_cap = 1e300;

    [[nodiscard]] std::size_t steps() const;
    /// Throws DomainError on an invalid configuration, including a comb lag
    /// that is not an integer multiple of the step.
    void validate(const KernelMeasure& km) const;
};

enum class TrajectoryStatus { Completed, TruncatedOverflow };

std::string_view to_string(TrajectoryStatus status);

struct Trajectory {
    std::vector<double> times;
    std::vector<double> values;
    TrajectoryStatus status = TrajectoryStatus::Completed;
    SolverConfig config;
    double xi = 1.0;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double last_time() const { return times.back(); }
    /// Grid index of the point nearest to `t`, or npos when t lies past the
    /// last stored value.
    [[nodiscard]] std::size_t index_of(double t) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Product-trapezoidal discretisation of the integral form. Measures with a
/// comb are integrated in delay-differential form with a Heun step on lagged
/// grid values. Throws NumericError if an implicit step fails to converge.
Trajectory solve_volterra(const Nonlinearity& nl, const KernelMeasure& km, const Forcing& fc,
                          double xi, const SolverConfig& cfg);

/// Heun's method for y' = M(t) f(y) on the same grid.
Trajectory solve_comparison_ode(const Nonlinearity& nl, const KernelMeasure& km, double xi,
                                const SolverConfig& cfg);

}  // namespace vg
