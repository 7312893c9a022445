#include <doctest.h>

#include <cmath>

#include "vg/errors.hpp"
#include "vg/solver.hpp"

using namespace vg;

namespace {

SolverConfig config(double step, double t_max) {
    SolverConfig cfg;
    cfg.step = step;
    cfg.t_max = t_max;
    cfg.checkpoints = {t_max};
    return cfg;
}

KernelMeasure linear_m(double horizon = 400.0, double step = 0.05) {
    return KernelMeasure::direct([](double t) { return t; }, 1.0, {horizon, step},
                                 [](double t) { return 0.5 * t * t; });
}

const Nonlinearity kSqrt = Nonlinearity::pure_power(1.0, 0.5);

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("zero measure keeps xi") {
    const auto zero = KernelMeasure::direct([](double) { return 0.0; }, 0.0, {10.0, 0.1});
    const auto traj = solve_volterra(kSqrt, zero, Forcing::none(), 2.5, config(0.1, 10.0));
    for (double x : traj.values) CHECK(x == 2.5);
    const auto ode = solve_comparison_ode(kSqrt, zero, 2.5, config(0.1, 10.0));
    for (double y : ode.values) CHECK(y == 2.5);
}

TEST_CASE("Dirac at zero gives x' = sqrt(x)") {
    const auto dirac = KernelMeasure::direct([](double) { return 1.0; }, 0.0, {2.0, 0.01});
    const auto traj = solve_volterra(kSqrt, dirac, Forcing::none(), 1.0, config(0.01, 2.0));
    CHECK(traj.values.back() == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(traj.index_of(2.0) == 200);
}

TEST_CASE("Richardson order of the product trapezoid") {
    double x[3];
    const double steps[3] = {0.05, 0.025, 0.0125};
    for (int k = 0; k < 3; ++k) {
        x[k] = solve_volterra(kSqrt, linear_m(10.0, steps[k]), Forcing::none(), 1.0, config(steps[k], 10.0))
                   .values.back();
    }
    const double ratio = std::abs(x[0] - x[1]) / std::abs(x[1] - x[2]);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("comparison ODE closed form and identity") {
    const auto ode = solve_comparison_ode(kSqrt, linear_m(2.0, 0.01), 1.0, config(0.01, 2.0));
    CHECK(ode.values.back() == doctest::Approx(4.0).epsilon(1e-4));
    double worst[2] = {0.0, 0.0};
    const double steps[2] = {0.05, 0.025};
    for (int k = 0; k < 2; ++k) {
        const auto km = linear_m(100.0, steps[k]);
        const auto y = solve_comparison_ode(kSqrt, km, 1.0, config(steps[k], 100.0));
        for (std::size_t n = 0; n < y.size(); ++n) {
            worst[k] = std::max(worst[k], std::abs(big_F(kSqrt, y.values[n]) - km.m_bar(y.times[n])));
        }
    }
    CHECK(worst[0] <= 1e-2);
    CHECK(worst[0] / worst[1] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("positivity, monotonicity and domination by the ODE") {
    const auto km = linear_m(50.0, 0.05);
    const auto x = solve_volterra(kSqrt, km, Forcing::none(), 1.0, config(0.05, 50.0));
    const auto y = solve_comparison_ode(kSqrt, km, 1.0, config(0.05, 50.0));
    for (std::size_t n = 1; n < x.size(); ++n) {
        CHECK(x.values[n] >= x.values[n - 1]);
        CHECK(x.values[n] <= y.values[n] * (1.0 + 1e-6));
    }
}

TEST_CASE("forced solution exceeds H") {
    const auto km = linear_m(20.0, 0.01);
    const auto fc = Forcing::osc_power(3.0);
    const auto x = solve_volterra(kSqrt, km, fc, 1.0, config(0.01, 20.0));
    for (std::size_t n = 1; n < x.size(); ++n) CHECK(x.values[n] > fc.big_h(x.times[n]));
}

TEST_CASE("Richardson order with smooth forcing") {
    double x[3];
    const double steps[3] = {0.05, 0.025, 0.0125};
    for (int k = 0; k < 3; ++k) {
        x[k] = solve_volterra(kSqrt, linear_m(10.0, steps[k]), Forcing::power_exp(1.0, 0.2), 1.0,
                              config(steps[k], 10.0))
                   .values.back();
    }
    const double ratio = std::abs(x[0] - x[1]) / std::abs(x[1] - x[2]);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("comb kernel in delay form") {
    // unit atoms at 0,1,2,...: x' = sum_j f(x(t - j))
    const MeasureGrid grid{20.0, 0.05};
    const auto comb = KernelMeasure::discrete(1.0, [](double) { return 1.0; }, 1.0, grid);
    const auto traj = solve_volterra(kSqrt, comb, Forcing::none(), 1.0, config(0.05, 20.0));
    // on [0,1] only the atom at zero acts, so x = (1 + t/2)^2
    CHECK(traj.values[traj.index_of(1.0)] == doctest::Approx(2.25).epsilon(1e-4));
    for (std::size_t n = 1; n < traj.size(); ++n) CHECK(traj.values[n] > traj.values[n - 1]);
    // finer step converges at second order
    double x[3];
    const double steps[3] = {0.05, 0.025, 0.0125};
    for (int k = 0; k < 3; ++k) {
        const auto km = KernelMeasure::discrete(1.0, [](double) { return 1.0; }, 1.0, {5.0, steps[k]});
        x[k] = solve_volterra(kSqrt, km, Forcing::none(), 1.0, config(steps[k], 5.0)).values.back();
    }
    const double ratio = std::abs(x[0] - x[1]) / std::abs(x[1] - x[2]);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("configuration errors") {
    const auto comb = KernelMeasure::discrete(0.33, [](double) { return 1.0; }, 1.0, {10.0, 0.05});
    CHECK_THROWS_AS(solve_volterra(kSqrt, comb, Forcing::none(), 1.0, config(0.05, 10.0)), DomainError);
    CHECK_THROWS_AS(solve_volterra(kSqrt, linear_m(), Forcing::none(), 1.0, config(0.05, 10.01)), DomainError);
    CHECK_THROWS_AS(solve_volterra(kSqrt, linear_m(), Forcing::none(), 0.0, config(0.05, 10.0)), DomainError);
    SolverConfig bad = config(0.05, 10.0);
    bad.checkpoints = {11.0};
    CHECK_THROWS_AS(solve_volterra(kSqrt, linear_m(), Forcing::none(), 1.0, bad), DomainError);
}

TEST_CASE("overflow truncates") {
    SolverConfig cfg = config(0.1, 800.0);
    const auto km = linear_m(800.0, 0.1);
    const auto traj = solve_volterra(kSqrt, km, Forcing::power_exp(0.0, 1.0), 1.0, cfg);
    CHECK(traj.status == TrajectoryStatus::TruncatedOverflow);
    CHECK(traj.last_time() < 700.0);
    CHECK(traj.index_of(800.0) == Trajectory::npos);
}

TEST_CASE("determinism") {
    const auto a = solve_volterra(kSqrt, linear_m(50.0), Forcing::osc_power(2.0), 1.0, config(0.05, 50.0));
    const auto b = solve_volterra(kSqrt, linear_m(50.0), Forcing::osc_power(2.0), 1.0, config(0.05, 50.0));
    CHECK(a.values == b.values);
}

}
