#include "vg/regvar.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quadrature.hpp"
#include "vg/errors.hpp"

namespace vg {
namespace {

constexpr double kLogSubstitutionStart = 10.0;
constexpr double kQuadratureTol = 1e-12;
constexpr double kInverseTol = 1e-11;
constexpr double kBracketLimit = 1e300;

void check_beta(double beta) {
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw DomainError("nonlinearity index beta must lie in [0,1), got " + std::to_string(beta));
    }
}

void require_positive_arg(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(what) + ": argument must be positive and finite, got " +
                          std::to_string(x));
    }
}

// log(c + exp(log_arg)) without overflowing exp for large arguments.
double log_shifted(double shift, double log_arg) {
    if (log_arg > 40.0) return log_arg + std::log1p(shift * std::exp(-log_arg));
    return std::log(shift + std::exp(log_arg));
}

double iterated_log(double shift, double log_arg) {
    const double inner = log_shifted(shift, log_arg);
    if (!(inner > 0.0)) {
        throw DomainError("log log undefined: shifted argument does not exceed 1");
    }
    return std::log(inner);
}

// int_a^b du / f(u) for 0 < a <= b.
double reciprocal_integral(const Nonlinearity& nl, double a, double b) {
    if (a == b) return 0.0;
    if (b <= kLogSubstitutionStart) {
        return detail::integrate_gk([&](double u) { return 1.0 / nl(u); }, a, b, kQuadratureTol);
    }
    if (a < kLogSubstitutionStart) {
        return reciprocal_integral(nl, a, kLogSubstitutionStart) +
               reciprocal_integral(nl, kLogSubstitutionStart, b);
    }
    // u = e^v
    auto integrand = [&](double v) {
        const double u = std::exp(v);
        return u / nl(u);
    };
    return detail::integrate_gk(integrand, std::log(a), std::log(b), kQuadratureTol);
}

}  // namespace

std::string_view to_string(NonlinearityKind kind) {
    switch (kind) {
        case NonlinearityKind::PurePower: return "power";
        case NonlinearityKind::PowerLogLog: return "loglog";
        case NonlinearityKind::PowerSinLogLog: return "sinloglog";
        case NonlinearityKind::UserTable: return "table";
    }
    return "unknown";
}

Nonlinearity Nonlinearity::pure_power(double scale, double beta) {
    check_beta(beta);
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("power scale a must be > 0");
    Nonlinearity nl;
    nl.kind_ = NonlinearityKind::PurePower;
    nl.scale_ = scale;
    nl.beta_ = beta;
    return nl;
}

Nonlinearity Nonlinearity::power_loglog(double scale, double beta, double alpha, double shift) {
    check_beta(beta);
    if (!(scale > 0.0)) throw DomainError("loglog scale a must be > 0");
    if (!(alpha > 0.0)) throw DomainError("loglog exponent alpha must be > 0");
    if (!(shift >= 0.0)) throw DomainError("loglog shift must be >= 0");
    Nonlinearity nl;
    nl.kind_ = NonlinearityKind::PowerLogLog;
    nl.scale_ = scale;
    nl.beta_ = beta;
    nl.alpha_ = alpha;
    nl.shift_ = shift;
    return nl;
}

Nonlinearity Nonlinearity::power_sin_loglog(double beta, double shift) {
    check_beta(beta);
    if (!(shift >= 0.0)) throw DomainError("sinloglog shift must be >= 0");
    Nonlinearity nl;
    nl.kind_ = NonlinearityKind::PowerSinLogLog;
    nl.beta_ = beta;
    nl.shift_ = shift;
    return nl;
}

Nonlinearity Nonlinearity::user_table(std::vector<double> x, std::vector<double> f, double beta) {
    check_beta(beta);
    if (x.size() != f.size() || x.size() < 2) {
        throw DomainError("user table needs at least two (x, f) pairs of equal length");
    }
    auto table = std::make_shared<Table>();
    table->log_x.reserve(x.size());
    table->log_f.reserve(f.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(f[i] > 0.0)) throw DomainError("user table entries must be positive");
        if (i > 0 && !(x[i] > x[i - 1])) throw DomainError("user table x must be strictly increasing");
        if (i > 0 && f[i] < f[i - 1]) throw DomainError("user table f must be nondecreasing");
        table->log_x.push_back(std::log(x[i]));
        table->log_f.push_back(std::log(f[i]));
    }
    Nonlinearity nl;
    nl.kind_ = NonlinearityKind::UserTable;
    nl.beta_ = beta;
    nl.table_ = std::move(table);
    return nl;
}

NonlinearityKind Nonlinearity::kind() const noexcept { return kind_; }

double Nonlinearity::slowly_varying_part(double x) const {
    require_positive_arg(x, "nonlinearity");
    switch (kind_) {
        case NonlinearityKind::PurePower:
            return scale_;
        case NonlinearityKind::PowerLogLog: {
            const double value = scale_ * iterated_log(shift_, alpha_ * std::log(x));
            if (!(value > 0.0)) throw DomainError("loglog nonlinearity is not positive at this x");
            return value;
        }
        case NonlinearityKind::PowerSinLogLog:
            return 2.0 + std::sin(iterated_log(shift_, std::log(x)));
        case NonlinearityKind::UserTable: {
            const auto& lx = table_->log_x;
            const auto& lf = table_->log_f;
            const double l = std::log(x);
            double log_f = 0.0;
            if (l <= lx.front()) {
                log_f = lf.front() + beta_ * (l - lx.front());
            } else if (l >= lx.back()) {
                log_f = lf.back() + beta_ * (l - lx.back());
            } else {
                const auto it = std::upper_bound(lx.begin(), lx.end(), l);
                const auto i = static_cast<std::size_t>(it - lx.begin());
                const double w = (l - lx[i - 1]) / (lx[i] - lx[i - 1]);
                log_f = lf[i - 1] + w * (lf[i] - lf[i - 1]);
            }
            return std::exp(log_f - beta_ * l);
        }
    }
    return scale_;
}

double Nonlinearity::operator()(double x) const {
    require_positive_arg(x, "f_eval");
    if (kind_ == NonlinearityKind::PurePower) return scale_ * std::pow(x, beta_);
    return std::pow(x, beta_) * slowly_varying_part(x);
}

double f_eval(const Nonlinearity& nl, double x) { return nl(x); }

double big_F(const Nonlinearity& nl, double x) {
    require_positive_arg(x, "big_F");
    if (x == 1.0) return 0.0;
    if (nl.kind() == NonlinearityKind::PurePower) {
        const double one_minus = 1.0 - nl.index();
        return std::expm1(one_minus * std::log(x)) / (one_minus * nl.scale());
    }
    if (x > 1.0) return reciprocal_integral(nl, 1.0, x);
    return -reciprocal_integral(nl, x, 1.0);
}

double big_F_inverse(const Nonlinearity& nl, double y) {
    if (!(y >= 0.0) || !std::isfinite(y)) {
        throw DomainError("big_F_inverse: y must be finite and >= 0, got " + std::to_string(y));
    }
    if (y == 0.0) return 1.0;
    if (nl.kind() == NonlinearityKind::PurePower) {
        const double one_minus = 1.0 - nl.index();
        return std::exp(std::log1p(one_minus * nl.scale() * y) / one_minus);
    }

    // Bracket by doubling; F values are accumulated segment by segment.
    double lo = 1.0;
    double f_lo = 0.0;
    double hi = 2.0;
    double f_hi = reciprocal_integral(nl, lo, hi);
    while (f_hi < y) {
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        if (hi > kBracketLimit) {
            throw NumericError("big_F_inverse: no bracket below 1e300 for y = " + std::to_string(y));
        }
        f_hi = f_lo + reciprocal_integral(nl, lo, hi);
    }

    while (hi - lo > 1e-3 * lo) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f_lo + reciprocal_integral(nl, lo, mid);
        if (f_mid < y) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }

    // Newton on F(x) - y with F' = 1/f, kept inside the bracket.
    double x = lo + (y - f_lo) * nl(lo);
    x = std::clamp(x, lo, hi);
    for (int iter = 0; iter < 50; ++iter) {
        const double fx = f_lo + reciprocal_integral(nl, lo, x);
        const double residual = fx - y;
        if (std::abs(residual) <= kInverseTol * (1.0 + std::abs(y))) return x;
        const double next = std::clamp(x - residual * nl(x), lo, hi);
        if (next == x) return x;
        x = next;
    }
    throw NumericError("big_F_inverse: Newton iteration did not converge for y = " +
                       std::to_string(y));
}

double ell_eval(const Nonlinearity& nl, double x) {
    const double one_minus = 1.0 - nl.index();
    return std::pow(nl.slowly_varying_part(x), 1.0 / one_minus);
}

double asymptotic_F_inverse(const Nonlinearity& nl, double y) {
    require_positive_arg(y, "asymptotic_F_inverse");
    const double p = 1.0 / (1.0 - nl.index());
    const double z = std::pow(y, p);
    return std::pow(1.0 - nl.index(), p) * ell_eval(nl, z) * z;
}

double debruijn_ratio(const Nonlinearity& nl, double x) {
    const double l = ell_eval(nl, x);
    return ell_eval(nl, x * l) / l;
}

IndexCheck index_self_check(const Nonlinearity& nl) {
    IndexCheck check;
    check.expected_ratio = std::pow(2.0, nl.index());
    for (double x = 1e2; x <= 1.0001e12; x *= 10.0) {
        check.sample_x.push_back(x);
        check.ratios.push_back(nl(2.0 * x) / nl(x));
    }
    if (nl.index() == 0.0) {
        double prev = nl(1e2);
        for (int k = 1; k <= 100; ++k) {
            const double value = nl(1e2 * std::pow(1e10, k / 100.0));
            if (value < prev) check.monotone = false;
            prev = value;
        }
    }
    const double last = check.ratios.back();
    check.pass = std::isfinite(last) && check.monotone &&
                 std::abs(last / check.expected_ratio - 1.0) <= 0.1;
    return check;
}

}  // namespace vg
