#include "vg/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vg/errors.hpp"

namespace vg {

std::string_view to_string(ForcingKind kind) {
    switch (kind) {
        case ForcingKind::None: return "none";
        case ForcingKind::PowerExp: return "power-exp";
        case ForcingKind::ScaledFinv: return "scaled-finv";
        case ForcingKind::OscPower: return "osc-power";
        case ForcingKind::OscExp: return "osc-exp";
    }
    return "unknown";
}

PeriodicProfile sin_squared_profile() {
    using std::numbers::pi;
    return {
        [](double t) { return -std::cos(2.0 * pi * t); },
        [](double t) { return 2.0 * pi * std::sin(2.0 * pi * t); },
    };
}

Forcing Forcing::none() { return {}; }

Forcing Forcing::power_exp(double alpha, double gamma) {
    if (!(gamma >= 0.0) || !(alpha + gamma > 0.0) || !std::isfinite(alpha)) {
        throw DomainError("power-exp forcing needs gamma >= 0 and alpha + gamma > 0");
    }
    Forcing fc;
    fc.kind_ = ForcingKind::PowerExp;
    fc.alpha_ = alpha;
    fc.gamma_ = gamma;
    return fc;
}

Forcing Forcing::scaled_finv(double lambda0, Nonlinearity nl, KernelMeasure km) {
    if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
        throw DomainError("scaled-finv forcing needs lambda0 > 0");
    }
    Forcing fc;
    fc.kind_ = ForcingKind::ScaledFinv;
    fc.lambda0_ = lambda0;
    fc.nl_ = std::move(nl);
    fc.km_ = std::move(km);
    return fc;
}

Forcing Forcing::osc_power(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("osc-power forcing needs alpha > 0");
    Forcing fc;
    fc.kind_ = ForcingKind::OscPower;
    fc.alpha_ = alpha;
    return fc;
}

Forcing Forcing::osc_exp(double alpha, PeriodicProfile profile) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("osc-exp forcing needs alpha in (0,1)");
    if (!profile.value || !profile.derivative) throw DomainError("osc-exp profile must be callable");
    Forcing fc;
    fc.kind_ = ForcingKind::OscExp;
    fc.alpha_ = alpha;
    fc.profile_ = std::move(profile);
    return fc;
}

double Forcing::big_h(double t) const {
    if (!(t >= 0.0)) throw DomainError("forcing: t must be >= 0, got " + std::to_string(t));
    switch (kind_) {
        case ForcingKind::None: return 0.0;
        case ForcingKind::PowerExp: return std::expm1(alpha_ * std::log1p(t) + gamma_ * t);
        case ForcingKind::ScaledFinv:
            return lambda0_ * (big_F_inverse(*nl_, t * km_->capital_m(t)) - 1.0);
        case ForcingKind::OscPower:
            return std::exp(alpha_ * std::log1p(t)) * (2.0 + std::sin(t)) - 2.0;
        case ForcingKind::OscExp: return std::expm1(t * (1.0 + alpha_ * profile_.value(t)));
    }
    return 0.0;
}

double Forcing::small_h(double t) const {
    if (!(t >= 0.0)) throw DomainError("forcing: t must be >= 0, got " + std::to_string(t));
    switch (kind_) {
        case ForcingKind::None: return 0.0;
        case ForcingKind::PowerExp: {
            const double growth = std::exp(alpha_ * std::log1p(t) + gamma_ * t);
            return growth * (alpha_ / (1.0 + t) + gamma_);
        }
        case ForcingKind::ScaledFinv: {
            const double delta = 1e-5 * std::max(1.0, t);
            if (t < delta) return (big_h(t + delta) - big_h(t)) / delta;
            return (big_h(t + delta) - big_h(t - delta)) / (2.0 * delta);
        }
        case ForcingKind::OscPower: {
            const double power = std::exp(alpha_ * std::log1p(t));
            return power * (alpha_ / (1.0 + t) * (2.0 + std::sin(t)) + std::cos(t));
        }
        case ForcingKind::OscExp: {
            const double exponent = t * (1.0 + alpha_ * profile_.value(t));
            const double rate = 1.0 + alpha_ * profile_.value(t) + t * alpha_ * profile_.derivative(t);
            return std::exp(exponent) * rate;
        }
    }
    return 0.0;
}

}  // namespace vg
