#include "vg/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "vg/errors.hpp"

namespace vg {
namespace {

// Below this the argument is shifted upward with the recurrence before the
// asymptotic series is applied.
constexpr double kAsymptoticStart = 12.0;

// B_{2k} / (2k (2k-1)), k = 1..9, for the Stirling series of ln Gamma.
constexpr std::array<double, 9> kStirling = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
};

// B_{2k} / (2k), k = 1..9, for the asymptotic series of psi.
constexpr std::array<double, 9> kDigammaSeries = {
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
    43867.0 / 14364.0,
};

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(what) + ": argument must be positive and finite, got " +
                          std::to_string(x));
    }
}

double stirling_ln_gamma(double x) {
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = 0.0;
    double power = inv;
    for (double c : kStirling) {
        series += c * power;
        power *= inv2;
    }
    constexpr double half_ln_two_pi = 0.91893853320467274178032973640562;
    return (x - 0.5) * std::log(x) - x + half_ln_two_pi + series;
}

double asymptotic_digamma(double x) {
    const double inv2 = 1.0 / (x * x);
    double series = 0.0;
    double power = inv2;
    for (double c : kDigammaSeries) {
        series += c * power;
        power *= inv2;
    }
    return std::log(x) - 0.5 / x - series;
}

}  // namespace

double ln_gamma(double x) {
    require_positive(x, "ln_gamma");
    if (x == 1.0 || x == 2.0) return 0.0;
    if (x >= kAsymptoticStart) return stirling_ln_gamma(x);
    // Gamma(x) = Gamma(x + n) / (x (x+1) ... (x+n-1))
    double product = 1.0;
    double shifted = x;
    while (shifted < kAsymptoticStart) {
        product *= shifted;
        shifted += 1.0;
    }
    return stirling_ln_gamma(shifted) - std::log(product);
}

double beta_fn(double x, double y) {
    require_positive(x, "beta_fn");
    require_positive(y, "beta_fn");
    // Ordering the arguments makes the result symmetric bit for bit.
    const double lo = std::min(x, y);
    const double hi = std::max(x, y);
    return std::exp(ln_gamma(lo) + ln_gamma(hi) - ln_gamma(lo + hi));
}

double digamma(double x) {
    require_positive(x, "digamma");
    double shift = 0.0;
    while (x < kAsymptoticStart) {
        shift += 1.0 / x;
        x += 1.0;
    }
    return asymptotic_digamma(x) - shift;
}

void check_indices(double beta, double theta) {
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw DomainError("beta must lie in [0,1), got " + std::to_string(beta));
    }
    if (!(theta >= 0.0) || !std::isfinite(theta)) {
        throw DomainError("theta must be finite and >= 0, got " + std::to_string(theta));
    }
}

double lambda_limit(double beta, double theta) {
    check_indices(beta, theta);
    if (beta == 0.0 || theta == 0.0) return 1.0;
    const double one_minus = 1.0 - beta;
    return std::exp(ln_gamma(theta + 1.0) + ln_gamma((1.0 + beta * theta) / one_minus) -
                    ln_gamma((1.0 + theta) / one_minus));
}

double growth_constant(double beta, double theta) {
    check_indices(beta, theta);
    const double one_minus = 1.0 - beta;
    return beta_fn(1.0 + theta, (1.0 + theta * beta) / one_minus) / one_minus;
}

RateConstants rate_constants(double beta, double theta) {
    return {beta, theta, lambda_limit(beta, theta), growth_constant(beta, theta)};
}

}  // namespace vg
