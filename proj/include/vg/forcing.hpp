#pragma once

// Additive perturbations H(t) = int_0^t h(s) ds of the Volterra equation.

#include <functional>
#include <optional>
#include <string_view>

#include "vg/measure.hpp"
#include "vg/regvar.hpp"

namespace vg {

enum class ForcingKind { None, PowerExp, ScaledFinv, OscPower, OscExp };

std::string_view to_string(ForcingKind kind);

/// 1-periodic profile p with max 1 and min -1, and its derivative.
struct PeriodicProfile {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

/// p(t) = 2 sin^2(pi t) - 1.
PeriodicProfile sin_squared_profile();

/// Families (H(0) = 0, H > 0 on (0, inf)):
///
///   PowerExp    H(t) = (1+t)^alpha e^(gamma t) - 1        gamma >= 0, alpha + gamma > 0
///   ScaledFinv  H(t) = lambda0 (F^-1(t M(t)) - 1)          lambda0 > 0
///   OscPower    H(t) = (1+t)^alpha (2 + sin t) - 2         alpha > 0
///   OscExp      H(t) = e^(t (1 + alpha p(t))) - 1          alpha in (0,1)
class Forcing {
public:
    Forcing() = default;

    static Forcing none();
    static Forcing power_exp(double alpha, double gamma);
    static Forcing scaled_finv(double lambda0, Nonlinearity nl, KernelMeasure km);
    static Forcing osc_power(double alpha);
    static Forcing osc_exp(double alpha, PeriodicProfile profile = sin_squared_profile());

    [[nodiscard]] ForcingKind kind() const noexcept { return kind_; }
    [[nodiscard]] bool active() const noexcept { return kind_ != ForcingKind::None; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double lambda0() const noexcept { return lambda0_; }

    /// H(t), t >= 0.
    [[nodiscard]] double big_h(double t) const;
    /// h(t) = H'(t); analytic except for ScaledFinv (central differences).
    [[nodiscard]] double small_h(double t) const;

private:
    ForcingKind kind_ = ForcingKind::None;
    double alpha_ = 0.0;
    double gamma_ = 0.0;
    double lambda0_ = 0.0;
    std::optional<Nonlinearity> nl_;
    std::optional<KernelMeasure> km_;
    PeriodicProfile profile_;
};

}  // namespace vg
