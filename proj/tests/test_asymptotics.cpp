#include <doctest.h>

#include <cmath>
#include <limits>

#include "vg/asymptotics.hpp"
#include "vg/errors.hpp"
#include "vg/specfun.hpp"

using namespace vg;

namespace {

const Nonlinearity kSqrt = Nonlinearity::pure_power(1.0, 0.5);

KernelMeasure linear_m(double horizon = 400.0, double step = 0.05) {
    return KernelMeasure::direct([](double t) { return t; }, 1.0, {horizon, step},
                                 [](double t) { return 0.5 * t * t; });
}

double zeta_closed_form(double lambda) {
    const double r = (1.0 / 6.0 + std::sqrt(1.0 / 36.0 + 4.0 * lambda)) / 2.0;
    return r * r;
}

}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("predict examples") {
    const auto p = predict(0.5, 1.0);
    CHECK(p.lower == doctest::Approx(1.0 / 36.0).epsilon(1e-14));
    CHECK(p.classification == Classification::Unperturbed);
    CHECK_FALSE(p.zeta.has_value());

    for (double theta : {0.0, 0.5, 3.0}) {
        const auto q = predict(0.0, theta, 0.0);
        CHECK(q.lower == doctest::Approx(1.0 / (1.0 + theta)).epsilon(1e-14));
        CHECK(*q.zeta == doctest::Approx(q.lower).epsilon(1e-14));
    }
    for (double beta : {0.0, 0.3, 0.9}) {
        const auto q = predict(beta, 0.0, 0.0);
        CHECK(q.lower == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(*q.zeta == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto inf = predict(0.5, 1.0, std::numeric_limits<double>::infinity());
    CHECK(inf.classification == Classification::ForcingDominates);
    CHECK_THROWS_AS(predict(0.5, 1.0, -1.0), DomainError);
    CHECK_THROWS_AS(predict(1.0, 1.0), DomainError);
}

TEST_CASE("characteristic equation") {
    CHECK(solve_characteristic(0.5, 1.0, 1.0).zeta == doctest::Approx(zeta_closed_form(1.0)).epsilon(1e-13));
    CHECK(solve_characteristic(0.5, 1.0, 1.0).zeta == doctest::Approx(1.181133).epsilon(1e-6));
    const double big = solve_characteristic(0.5, 1.0, 1e6).zeta / 1e6;
    CHECK(big > 1.0);
    CHECK(big < 1.001);
    CHECK(big == doctest::Approx(1.0001666805561343).epsilon(1e-12));

    for (double beta : {0.0, 0.25, 0.5, 0.9}) {
        for (double theta : {0.0, 1.0, 4.0}) {
            const auto p0 = predict(beta, theta, 0.0);
            CHECK(*p0.zeta == doctest::Approx(p0.lower).epsilon(1e-12));
            double prev = -1.0;
            for (double lambda : {0.0, 0.1, 1.0, 10.0, 100.0}) {
                const auto p = predict(beta, theta, lambda);
                const double z = *p.zeta;
                CHECK(z > prev);
                prev = z;
                CHECK(z >= p.lower * (1.0 - 1e-12));
                CHECK(z <= *p.c_star * (1.0 + 1e-12));
                const double c2 = p.growth_constant;
                CHECK(std::abs(z - c2 * std::pow(z, beta) - lambda) <= 1e-12 * (1.0 + z));
                // U overflows double for strong forcing with beta near 1
                if (std::isfinite(*p.upper)) CHECK(*p.upper == doctest::Approx(std::pow(lambda / std::pow(p.lower, beta) + 1.0 / (1.0 - beta),
                                                           1.0 / (1.0 - beta))));
            }
        }
    }
}

TEST_CASE("characteristic iteration count") {
    for (double beta : {0.01, 0.1, 0.5, 0.9, 0.99}) {
        const int bound = static_cast<int>(std::ceil(std::log(1e-16) / std::log(beta))) + 5;
        for (double lambda : {0.0, 0.5, 1e3}) {
            const auto sol = solve_characteristic(beta, 2.0, lambda);
            CHECK(sol.iterations <= bound);
        }
    }
    CHECK(solve_characteristic(0.0, 1.0, 2.0).zeta == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("comparison ODE prediction") {
    const auto p = predict_comparison_ode(0.5, 1.0);
    CHECK(p.lambda_limit == 1.0);
    CHECK(p.growth_constant == 0.5);
    CHECK(p.lower == doctest::Approx(0.25));
}

TEST_CASE("convolution ratio for power pairs") {
    struct Pair {
        double rho, sigma, exact;
    };
    for (const auto& pr : {Pair{1.0, 1.0, 1.0 / 6.0}, Pair{2.0, 1.0, 1.0 / 12.0}, Pair{0.5, 1.5, M_PI / 16.0}}) {
        CHECK(convolution_limit(pr.rho, pr.sigma) == doctest::Approx(pr.exact).epsilon(1e-14));
        const auto a = [&](double s) { return std::pow(s, pr.rho); };
        const auto b = [&](double s) { return std::pow(s, pr.sigma); };
        for (double t : {1.0, 10.0, 100.0}) {
            CHECK(std::abs(convolution_ratio(pr.rho, pr.sigma, a, b, t) - pr.exact) <= 1e-7 * pr.exact);
        }
    }
}

TEST_CASE("convolution ratio with a slowly varying factor") {
    // a(t) = t log(1+t): the ratio tends to 1/6 only at the rate 1/log t.
    // mpmath oracle for the relative gap at t = 1e4.
    const auto a = [](double s) { return s * std::log1p(s); };
    const auto b = [](double s) { return s; };
    const double gap = convolution_ratio(1.0, 1.0, a, b, 1e4) * 6.0 - 1.0;
    CHECK(gap == doctest::Approx(-0.0904553481125743).epsilon(1e-8));
    double prev = 1.0;
    for (double t : {1e2, 1e3, 1e4, 1e6, 1e8}) {
        const double g = std::abs(convolution_ratio(1.0, 1.0, a, b, t) * 6.0 - 1.0);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("classify_forcing") {
    const auto km = linear_m();
    SUBCASE("scaled inverse is lambda-finite") {
        const auto fc = Forcing::scaled_finv(2.0, kSqrt, km);
        const auto c = classify_forcing(kSqrt, km, fc, ProbeGrid{400.0});
        CHECK(c.classification == Classification::LambdaFinite);
        CHECK(*c.lambda_estimate == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(c.r1_stable);
    }
    SUBCASE("exponential dominates") {
        const auto c = classify_forcing(kSqrt, linear_m(30.0, 0.005), Forcing::power_exp(0.0, 1.0), ProbeGrid{30.0});
        CHECK(c.classification == Classification::ForcingDominates);
        CHECK(std::isinf(*c.lambda_estimate));
        // R2(t) ~ 2 t e^{-t/2}
        CHECK(c.r2.back() == doctest::Approx(2.0 * 30.0 * std::exp(-15.0)).epsilon(0.01));
    }
    SUBCASE("slow forcing gives lambda zero") {
        const auto c = classify_forcing(kSqrt, km, Forcing::power_exp(1.0, 0.0), ProbeGrid{400.0});
        CHECK(c.classification == Classification::LambdaFinite);
        CHECK(*c.lambda_estimate == 0.0);
    }
    SUBCASE("oscillating exponential is ill-behaved") {
        const auto fc = Forcing::osc_exp(0.9);
        const auto c = classify_forcing(kSqrt, linear_m(40.0, 0.01), fc, ProbeGrid{40.0});
        CHECK(c.classification == Classification::IllBehaved);
        CHECK(forcing_oscillation_ratio(kSqrt, fc, 20.0, 40.0, 0.01) > 10.0);
    }
    CHECK_THROWS_AS(classify_forcing(kSqrt, km, Forcing::none(), ProbeGrid{}), DomainError);
}

TEST_CASE("diagnostics on the comparison ODE") {
    const auto km = linear_m(400.0, 0.05);
    SolverConfig cfg;
    cfg.checkpoints = {50.0, 100.0, 200.0, 400.0};
    const auto y = solve_comparison_ode(kSqrt, km, 1.0, cfg);
    const auto series = diagnostics(y, kSqrt, km, Forcing::none(), predict_comparison_ode(0.5, 1.0));
    REQUIRE(series.rows.size() == 4);
    CHECK_FALSE(series.degraded);
    for (const auto& r : series.rows) {
        // exact identity up to the O(h^2) Heun error
        CHECK(r.d1 == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(r.d2 == doctest::Approx(0.5).epsilon(1e-5));
        const double exact = std::pow((1.0 + r.t * r.t / 4.0) / (1.0 + r.t * r.t / 2.0), 2.0);
        CHECK(r.d3 == doctest::Approx(exact).epsilon(1e-5));
        CHECK(std::isnan(r.d4));
        CHECK(r.d1 / r.d2 == doctest::Approx(r.t * r.m / r.m_bar).epsilon(1e-14));
    }
    CHECK(series.trend_d3);
    CHECK(*series.targets.d3 == doctest::Approx(0.25));
}

TEST_CASE("diagnostic targets") {
    const auto t0 = diagnostic_targets(predict(0.5, 1.0));
    CHECK(*t0.d1 == doctest::Approx(1.0 / 3.0));
    CHECK(*t0.d2 == doctest::Approx(1.0 / 6.0));
    CHECK(*t0.d3 == doctest::Approx(1.0 / 36.0));
    CHECK_FALSE(t0.d4.has_value());
    const auto t1 = diagnostic_targets(predict(0.5, 1.0, 1.0));
    CHECK(*t1.d3 == doctest::Approx(zeta_closed_form(1.0)));
    const auto t2 = diagnostic_targets(predict(0.5, 1.0, std::numeric_limits<double>::infinity()));
    CHECK(*t2.d4 == 1.0);
}

TEST_CASE("shrinking_relative_gap") {
    CHECK(shrinking_relative_gap({1.5, 1.2, 1.05}, 1.0));
    CHECK_FALSE(shrinking_relative_gap({1.5, 1.6, 1.05}, 1.0));
    CHECK_FALSE(shrinking_relative_gap({1.5, std::nan(""), 1.05}, 1.0));
}

}
