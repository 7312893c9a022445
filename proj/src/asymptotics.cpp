#include "vg/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quadrature.hpp"
#include "vg/errors.hpp"
#include "vg/specfun.hpp"

namespace vg {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCharacteristicTol = 1e-14;

double safe_ratio(double num, double den) {
    if (!std::isfinite(num) || !std::isfinite(den) || den == 0.0) return kNaN;
    return num / den;
}

bool strictly_decreasing(const std::vector<double>& v) {
    if (v.size() < 2) return false;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) return false;
    }
    return true;
}

}  // namespace

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::Unperturbed: return "unperturbed";
        case Classification::LambdaFinite: return "lambda-finite";
        case Classification::ForcingDominates: return "forcing-dominates";
        case Classification::IllBehaved: return "ill-behaved/unclassified";
    }
    return "unknown";
}

CharacteristicSolution solve_characteristic(double beta, double theta, double lambda) {
    check_indices(beta, theta);
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("characteristic equation needs a finite lambda >= 0");
    }
    const double c2 = growth_constant(beta, theta);
    if (beta == 0.0) return {c2 + lambda, 0};

    const double lower = std::pow(c2, 1.0 / (1.0 - beta));
    double x = std::max(lower, lambda);
    // |g'| <= beta on [L, inf), so the bound below is generous.
    const int max_iter =
        static_cast<int>(std::ceil(std::log(1e-16) / std::log(std::max(beta, 0.01)))) + 50;
    for (int iter = 1; iter <= max_iter; ++iter) {
        const double next = c2 * std::pow(x, beta) + lambda;
        const double delta = std::abs(next - x);
        x = next;
        if (delta <= kCharacteristicTol * (1.0 + x)) return {x, iter};
    }
    throw NumericError("characteristic iteration did not converge");
}

AsymptoticPrediction predict(double beta, double theta, std::optional<double> forcing_lambda) {
    AsymptoticPrediction pred;
    pred.beta = beta;
    pred.theta = theta;
    pred.lambda_limit = lambda_limit(beta, theta);
    pred.growth_constant = growth_constant(beta, theta);
    const double expo = 1.0 / (1.0 - beta);
    pred.lower = std::pow(pred.growth_constant, expo);
    pred.forcing_lambda = forcing_lambda;
    if (!forcing_lambda) {
        pred.classification = Classification::Unperturbed;
        return pred;
    }
    const double lambda = *forcing_lambda;
    if (!(lambda >= 0.0)) throw DomainError("forcing lambda must be >= 0");
    if (std::isinf(lambda)) {
        pred.classification = Classification::ForcingDominates;
        return pred;
    }
    pred.classification = Classification::LambdaFinite;
    pred.upper = std::pow(lambda / std::pow(pred.lower, beta) + expo, expo);
    pred.c_star = std::max(*pred.upper, pred.lower + lambda * expo);
    pred.zeta = solve_characteristic(beta, theta, lambda).zeta;
    return pred;
}

AsymptoticPrediction predict_comparison_ode(double beta, double theta) {
    check_indices(beta, theta);
    AsymptoticPrediction pred;
    pred.beta = beta;
    pred.theta = theta;
    pred.lambda_limit = 1.0;
    pred.growth_constant = 1.0 / (1.0 + theta);
    pred.lower = std::pow(pred.growth_constant, 1.0 / (1.0 - beta));
    pred.classification = Classification::Unperturbed;
    return pred;
}

ForcingClassification classify_forcing(const Nonlinearity& nl, const KernelMeasure& km,
                                       const Forcing& fc, const ProbeGrid& grid) {
    if (!fc.active()) throw DomainError("classify_forcing needs an active forcing");
    if (!(grid.t_max > 0.0) || grid.probes < 2 || grid.fine_intervals < 16) {
        throw DomainError("probe grid needs t_max > 0, >= 2 probes and >= 16 fine intervals");
    }
    ForcingClassification out;
    const std::size_t n = grid.fine_intervals;
    const double dt = grid.t_max / static_cast<double>(n);

    // Cumulative trapezoid of f(H) on the fine grid, stopping where H leaves range.
    std::vector<double> big_h(n + 1, 0.0);
    std::vector<double> integral(n + 1, 0.0);
    std::size_t usable = n;
    double prev_fh = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double h_val = fc.big_h(t);
        if (!std::isfinite(h_val) || h_val > 1e300) {
            out.truncated = true;
            usable = i - 1;
            break;
        }
        const double fh = h_val > 0.0 ? nl(h_val) : 0.0;
        big_h[i] = h_val;
        integral[i] = integral[i - 1] + 0.5 * dt * (prev_fh + fh);
        prev_fh = fh;
    }
    out.usable_t_max = static_cast<double>(usable) * dt;

    auto r2_at = [&](std::size_t i) {
        const double t = static_cast<double>(i) * dt;
        return safe_ratio(km.capital_m(t) * integral[i], big_h[i]);
    };

    for (std::size_t k = grid.probes; k-- > 0;) {
        const std::size_t i = n >> k;
        if (i == 0 || i > usable) continue;
        const double t = static_cast<double>(i) * dt;
        out.probe_times.push_back(t);
        out.r1.push_back(safe_ratio(big_h[i], big_F_inverse(nl, t * km.capital_m(t))));
        out.r2.push_back(r2_at(i));
    }

    // Smallest of the largest rise and the largest fall of R2 over the last
    // decade: 1 for a monotone series, large only when R2 swings both ways.
    double run_min = kInf;
    double run_max = 0.0;
    double rise = 1.0;
    double fall = 1.0;
    for (std::size_t i = std::max<std::size_t>(1, n / 10); i <= usable; ++i) {
        const double r = r2_at(i);
        if (!std::isfinite(r) || !(r > 0.0)) continue;
        if (run_max > 0.0) {
            rise = std::max(rise, r / run_min);
            fall = std::max(fall, run_max / r);
        }
        run_min = std::min(run_min, r);
        run_max = std::max(run_max, r);
    }
    out.oscillation_ratio = std::min(rise, fall);
    out.oscillating = out.oscillation_ratio > kOscillationThreshold;

    const std::size_t probes = out.probe_times.size();
    const std::size_t tail = std::min<std::size_t>(probes, kTrendProbes);
    out.r2_decreasing = strictly_decreasing(std::vector<double>(out.r2.end() - static_cast<std::ptrdiff_t>(tail), out.r2.end()));
    if (probes >= 2) {
        const double last = out.r1[probes - 1];
        const double prev = out.r1[probes - 2];
        out.r1_stable = std::isfinite(last) && last > 0.0 && std::abs(last / prev - 1.0) < kStabilityTolerance;
    }

    if (probes >= 2 && out.r2_decreasing && out.r2.back() < kSmallnessThreshold) {
        out.classification = Classification::ForcingDominates;
        out.lambda_estimate = kInf;
    } else if (out.r1_stable) {
        out.classification = Classification::LambdaFinite;
        out.lambda_estimate = out.r1.back();
    } else if (probes >= 2 && strictly_decreasing(out.r1) && out.r1.back() < kSmallnessThreshold &&
               !out.oscillating) {
        out.classification = Classification::LambdaFinite;
        out.lambda_estimate = 0.0;
    } else {
        out.classification = Classification::IllBehaved;
    }
    return out;
}

double forcing_oscillation_ratio(const Nonlinearity& nl, const Forcing& fc, double t_lo,
                                 double t_hi, double step) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo) || !(step > 0.0)) {
        throw DomainError("oscillation window needs 0 < t_lo < t_hi and step > 0");
    }
    const auto n = static_cast<std::size_t>(std::ceil(t_hi / step));
    const double dt = t_hi / static_cast<double>(n);
    double integral = 0.0;
    double prev_fh = 0.0;
    double lo = kInf;
    double hi = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double h_val = fc.big_h(t);
        const double fh = h_val > 0.0 ? nl(h_val) : 0.0;
        integral += 0.5 * dt * (prev_fh + fh);
        prev_fh = fh;
        if (t < t_lo) continue;
        const double r = h_val / integral;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return hi / lo;
}

double convolution_limit(double rho, double sigma) { return beta_fn(rho + 1.0, sigma + 1.0); }

double convolution_ratio(double rho, double sigma, const std::function<double(double)>& a,
                         const std::function<double(double)>& b, double t) {
    if (!(rho >= 0.0) || !(sigma >= 0.0) || !std::isfinite(rho) || !std::isfinite(sigma)) {
        throw DomainError("convolution_ratio needs rho, sigma >= 0");
    }
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("convolution_ratio needs t > 0, got " + std::to_string(t));
    }
    // Split at t/2 and reflect the upper half so that both factors are only
    // ever evaluated at accurately represented small arguments.
    const double half = 0.5 * t;
    const double lower = detail::integrate_tanh_sinh([&](double s) { return a(s) * b(t - s); },
                                                     0.0, half, 1e-13);
    const double upper = detail::integrate_tanh_sinh([&](double u) { return a(t - u) * b(u); },
                                                     0.0, half, 1e-13);
    return (lower + upper) / (t * a(t) * b(t));
}

DiagnosticRow diagnostic_row(const Trajectory& traj, std::size_t n, const Nonlinearity& nl,
                             const KernelMeasure& km, const Forcing& fc) {
    DiagnosticRow row;
    row.t = traj.times.at(n);
    row.x = traj.values.at(n);
    row.big_f = big_F(nl, row.x);
    row.m = km.capital_m(row.t);
    row.m_bar = km.m_bar(row.t);
    const double clock = row.t * row.m;
    row.d1 = row.m_bar > 0.0 ? safe_ratio(row.big_f, row.m_bar) : kNaN;
    row.d2 = clock > 0.0 ? safe_ratio(row.big_f, clock) : kNaN;
    double inverse = kNaN;
    try {
        inverse = big_F_inverse(nl, clock);
    } catch (const NumericError&) {
    }
    row.d3 = safe_ratio(row.x, inverse);
    row.d4 = kNaN;
    if (fc.active()) {
        const double h_val = fc.big_h(row.t);
        if (h_val > 0.0) row.d4 = safe_ratio(row.x, h_val);
    }
    return row;
}

DiagnosticTargets diagnostic_targets(const AsymptoticPrediction& pred) {
    DiagnosticTargets t;
    switch (pred.classification) {
        case Classification::Unperturbed:
            t.d1 = pred.lambda_limit;
            t.d2 = pred.growth_constant;
            t.d3 = pred.lower;
            break;
        case Classification::LambdaFinite: {
            // F(x) ~ zeta^(1-beta) t M when x ~ zeta F^-1(t M).
            const double zeta = pred.zeta.value_or(pred.lower);
            const double scaled = std::pow(zeta, 1.0 - pred.beta);
            t.d1 = scaled * (1.0 + pred.theta);
            t.d2 = scaled;
            t.d3 = zeta;
            const double lambda = pred.forcing_lambda.value_or(0.0);
            if (lambda > 0.0) t.d4 = zeta / lambda;
            break;
        }
        case Classification::ForcingDominates:
            t.d4 = 1.0;
            break;
        case Classification::IllBehaved:
            break;
    }
    return t;
}

bool shrinking_relative_gap(const std::vector<double>& values, double target) {
    if (values.size() < 2 || !(target != 0.0)) return false;
    double prev = kInf;
    for (double v : values) {
        const double gap = std::abs(v / target - 1.0);
        if (!std::isfinite(gap) || !(gap < prev)) return false;
        prev = gap;
    }
    return true;
}

DiagnosticSeries diagnostics(const Trajectory& traj, const Nonlinearity& nl,
                             const KernelMeasure& km, const Forcing& fc,
                             const AsymptoticPrediction& pred) {
    DiagnosticSeries series;
    series.targets = diagnostic_targets(pred);
    for (double c : traj.config.checkpoints) {
        const std::size_t n = traj.index_of(c);
        if (n == Trajectory::npos || n == 0) continue;
        series.rows.push_back(diagnostic_row(traj, n, nl, km, fc));
    }
    series.degraded = series.rows.size() < 3;

    auto column = [&](double DiagnosticRow::*field) {
        std::vector<double> v;
        for (const auto& r : series.rows) v.push_back(r.*field);
        return v;
    };
    const auto& tg = series.targets;
    if (tg.d1) series.trend_d1 = shrinking_relative_gap(column(&DiagnosticRow::d1), *tg.d1);
    if (tg.d2) series.trend_d2 = shrinking_relative_gap(column(&DiagnosticRow::d2), *tg.d2);
    if (tg.d3) series.trend_d3 = shrinking_relative_gap(column(&DiagnosticRow::d3), *tg.d3);
    if (tg.d4) series.trend_d4 = shrinking_relative_gap(column(&DiagnosticRow::d4), *tg.d4);
    return series;
}

}  // namespace vg
