#pragma once

// Sublinear nonlinearities f in RV(beta), beta in [0,1), and the growth
// clock F(x) = int_1^x du / f(u) with its inverse.

#include <memory>
#include <numbers>
#include <string_view>
#include <variant>
#include <vector>

namespace vg {

enum class NonlinearityKind { PurePower, PowerLogLog, PowerSinLogLog, UserTable };

std::string_view to_string(NonlinearityKind kind);

/// Default inner shift e^e: log log(e^e + x) >= 1 on (0, inf).
inline constexpr double kDefaultLogLogShift = 15.154262241479259;  // exp(e)

/// Immutable value type; copies share the underlying sample table.
///
///   PurePower       f(x) = a x^beta
///   PowerLogLog     f(x) = a x^beta log log(c + x^alpha)
///   PowerSinLogLog  f(x) = x^beta (2 + sin(log log(c + x)))
///   UserTable       log-log interpolation of samples, power-law tails of index beta
///
/// The shift c keeps the iterated logarithm defined near zero; c = 0 reproduces
/// the unshifted family and makes small arguments a domain error.
class Nonlinearity {
public:
    static Nonlinearity pure_power(double scale, double beta);
    static Nonlinearity power_loglog(double scale, double beta, double alpha,
                                     double shift = kDefaultLogLogShift);
    static Nonlinearity power_sin_loglog(double beta, double shift = kDefaultLogLogShift);
    /// `x` strictly increasing and positive, `f` positive and nondecreasing.
    static Nonlinearity user_table(std::vector<double> x, std::vector<double> f, double beta);

    [[nodiscard]] NonlinearityKind kind() const noexcept;
    [[nodiscard]] double index() const noexcept { return beta_; }
    [[nodiscard]] double shift() const noexcept { return shift_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }

    /// f(x); throws DomainError for x <= 0 or where the family is undefined.
    [[nodiscard]] double operator()(double x) const;

    /// f(x) / x^beta, evaluated without forming x^beta where possible.
    [[nodiscard]] double slowly_varying_part(double x) const;

private:
    struct Table {
        std::vector<double> log_x;
        std::vector<double> log_f;
    };

    Nonlinearity() = default;

    NonlinearityKind kind_ = NonlinearityKind::PurePower;
    double scale_ = 1.0;
    double beta_ = 0.0;
    double alpha_ = 1.0;
    double shift_ = 0.0;
    std::shared_ptr<const Table> table_;
};

double f_eval(const Nonlinearity& nl, double x);

/// F(x) = int_1^x du / f(u). Closed form for PurePower, adaptive quadrature
/// otherwise (log-substituted above x = 10).
double big_F(const Nonlinearity& nl, double x);

/// x with F(x) = y, for y >= 0. Throws NumericError if no bracket is found.
double big_F_inverse(const Nonlinearity& nl, double y);

/// l(x) = (f(x) / x^beta)^(1/(1-beta)).
double ell_eval(const Nonlinearity& nl, double x);

/// (1-beta)^(1/(1-beta)) l(y^(1/(1-beta))) y^(1/(1-beta)), the large-y form of F^-1.
double asymptotic_F_inverse(const Nonlinearity& nl, double y);

/// l(x l(x)) / l(x); tends to 1 when asymptotic_F_inverse applies.
double debruijn_ratio(const Nonlinearity& nl, double x);

struct IndexCheck {
    std::vector<double> sample_x;
    std::vector<double> ratios;  // f(2x)/f(x)
    double expected_ratio = 1.0;  // 2^beta
    bool monotone = true;         // sampled nondecreasing (checked for beta == 0)
    bool pass = false;
};

/// Samples f(2x)/f(x) at x = 1e2, 1e3, ..., 1e12 and compares the last value
/// with 2^beta at 10% tolerance.
IndexCheck index_self_check(const Nonlinearity& nl);

}  // namespace vg
