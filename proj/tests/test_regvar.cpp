#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vg/errors.hpp"
#include "vg/regvar.hpp"

using namespace vg;

TEST_SUITE("regvar") {

TEST_CASE("f_eval examples") {
    CHECK(f_eval(Nonlinearity::pure_power(1.0, 0.5), 4.0) == doctest::Approx(2.0));
    const double x = std::exp(std::exp(std::numbers::pi / 2.0));
    CHECK(f_eval(Nonlinearity::power_sin_loglog(0.5, 0.0), x) == doctest::Approx(3.0 * std::sqrt(x)).epsilon(1e-13));
    const double e_e = std::exp(std::numbers::e);
    CHECK(f_eval(Nonlinearity::power_loglog(1.0, 0.5, 1.0, 0.0), e_e) == doctest::Approx(std::sqrt(e_e)).epsilon(1e-14));
    CHECK_THROWS_AS((void)f_eval(Nonlinearity::pure_power(1.0, 0.5), 0.0), DomainError);
    CHECK_THROWS_AS((void)f_eval(Nonlinearity::power_loglog(1.0, 0.5, 1.0, 0.0), 2.0), DomainError);
}

TEST_CASE("shifted families are positive near zero") {
    const auto ll = Nonlinearity::power_loglog(1.0, 0.5, 1.0);
    const auto sl = Nonlinearity::power_sin_loglog(0.5);
    for (double x = 1e-6; x < 1e6; x *= 3.0) {
        CHECK(ll(x) > 0.0);
        CHECK(sl(x) > 0.0);
    }
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(Nonlinearity::pure_power(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(Nonlinearity::pure_power(0.0, 0.5), DomainError);
    CHECK_THROWS_AS(Nonlinearity::user_table({1.0, 1.0}, {1.0, 2.0}, 0.5), DomainError);
    CHECK_THROWS_AS(Nonlinearity::user_table({1.0, 2.0}, {2.0, 1.0}, 0.5), DomainError);
}

TEST_CASE("big_F examples") {
    const auto p = Nonlinearity::pure_power(1.0, 0.5);
    CHECK(big_F(p, 1.0) == 0.0);
    CHECK(big_F(p, 4.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(big_F(p, 0.25) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(big_F(Nonlinearity::power_loglog(1.0, 0.5, 1.0), 1.0) == 0.0);
}

TEST_CASE("big_F matches the closed form through quadrature") {
    // a table sampled from sqrt(x) reproduces the power law exactly
    std::vector<double> xs, fs;
    for (double x = 0.5; x <= 1e4; x *= 2.0) {
        xs.push_back(x);
        fs.push_back(std::sqrt(x));
    }
    const auto table = Nonlinearity::user_table(xs, fs, 0.5);
    for (double x : {0.3, 2.0, 50.0, 1e6, 1e12}) {
        CHECK(big_F(table, x) == doctest::Approx(2.0 * (std::sqrt(x) - 1.0)).epsilon(1e-10));
    }
}

TEST_CASE("big_F increasing") {
    for (const auto& nl : {Nonlinearity::pure_power(2.0, 0.3), Nonlinearity::power_loglog(1.0, 0.5, 2.0),
                           Nonlinearity::power_sin_loglog(0.5)}) {
        double prev = big_F(nl, 1e-3);
        for (double x = 2e-3; x < 1e20; x *= 4.0) {
            const double v = big_F(nl, x);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("big_F_inverse") {
    const auto p = Nonlinearity::pure_power(1.0, 0.5);
    CHECK(big_F_inverse(p, 0.0) == 1.0);
    CHECK(big_F_inverse(p, 2.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK_THROWS_AS((void)big_F_inverse(p, -1.0), DomainError);
    for (const auto& nl : {p, Nonlinearity::power_loglog(1.0, 0.5, 1.0), Nonlinearity::power_sin_loglog(0.5),
                           Nonlinearity::power_loglog(3.0, 0.2, 2.0)}) {
        for (double y : {0.1, 1.0, 10.0, 1e4, 1e6}) {
            CHECK(std::abs(big_F(nl, big_F_inverse(nl, y)) - y) <= 1e-8 * std::max(1.0, y));
        }
    }
}

TEST_CASE("ell_eval") {
    for (double x : {0.5, 3.0, 1e5}) {
        CHECK(ell_eval(Nonlinearity::pure_power(1.0, 0.3), x) == doctest::Approx(1.0));
        CHECK(ell_eval(Nonlinearity::pure_power(4.0, 0.5), x) == doctest::Approx(16.0));
    }
    const double e_e = std::exp(std::numbers::e);
    CHECK(ell_eval(Nonlinearity::power_loglog(1.0, 0.5, 1.0, 0.0), e_e) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("asymptotic_F_inverse") {
    const auto p = Nonlinearity::pure_power(1.0, 0.5);
    CHECK(asymptotic_F_inverse(p, 100.0) == doctest::Approx(2500.0).epsilon(1e-13));
    const double r100 = asymptotic_F_inverse(p, 100.0) / big_F_inverse(p, 100.0);
    CHECK(r100 == doctest::Approx(2500.0 / 2601.0).epsilon(1e-13));
    const double r1e6 = asymptotic_F_inverse(p, 1e6) / big_F_inverse(p, 1e6);
    CHECK(std::abs(r1e6 - 1.0) < std::abs(r100 - 1.0));

    // loglog: quadrature oracle (mpmath, 30 digits)
    const auto ll = Nonlinearity::power_loglog(1.0, 0.5, 1.0);
    const double r4 = asymptotic_F_inverse(ll, 1e4) / big_F_inverse(ll, 1e4);
    const double r10 = asymptotic_F_inverse(ll, 1e10) / big_F_inverse(ll, 1e10);
    CHECK(r4 == doctest::Approx(1.0651766).epsilon(1e-6));
    CHECK(r10 == doctest::Approx(1.0090183).epsilon(1e-6));

    for (const auto& nl : {p, ll}) {
        double prev = 1e300;
        for (double y = 1e2; y <= 1e10; y *= 100.0) {
            const double gap = std::abs(asymptotic_F_inverse(nl, y) / big_F_inverse(nl, y) - 1.0);
            CHECK(gap < prev);
            prev = gap;
        }
    }
}

TEST_CASE("debruijn_ratio") {
    for (double x : {2.0, 1e3, 1e12}) {
        CHECK(debruijn_ratio(Nonlinearity::pure_power(1.0, 0.5), x) == 1.0);
        CHECK(debruijn_ratio(Nonlinearity::pure_power(4.0, 0.5), x) == doctest::Approx(1.0).epsilon(1e-14));
    }
    // mpmath oracles; the approach to 1 is logarithmically slow
    const auto ll = Nonlinearity::power_loglog(1.0, 0.5, 1.0);
    CHECK(debruijn_ratio(ll, 1e4) == doctest::Approx(1.148937).epsilon(1e-6));
    CHECK(debruijn_ratio(ll, 1e8) == doctest::Approx(1.076825).epsilon(1e-6));
    CHECK(debruijn_ratio(ll, 1e12) == doctest::Approx(1.0508070232019353).epsilon(1e-12));
    CHECK(debruijn_ratio(ll, 1e12) < debruijn_ratio(ll, 1e8));
    CHECK(debruijn_ratio(ll, 1e8) < debruijn_ratio(ll, 1e4));
}

TEST_CASE("index self-check") {
    for (const auto& nl : {Nonlinearity::pure_power(1.0, 0.5), Nonlinearity::pure_power(1.0, 0.0),
                           Nonlinearity::power_loglog(1.0, 0.5, 1.0), Nonlinearity::power_sin_loglog(0.7)}) {
        const auto chk = index_self_check(nl);
        CHECK(chk.pass);
        CHECK(chk.ratios.size() == 11);
    }
    const auto decreasing = Nonlinearity::user_table({1.0, 1e3, 1e6, 1e12}, {1.0, 2.0, 3.0, 3.0}, 0.0);
    CHECK(index_self_check(decreasing).monotone);
}

}
