#include "vg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "vg/errors.hpp"

namespace vg {
namespace {

constexpr double kGridSnap = 1e-9;

bool overflowed(double x, double cap) { return !std::isfinite(x) || x > cap; }

// x = rhs + weight * f(x) by damped fixed-point iteration from `guess`.
double solve_implicit(const Nonlinearity& nl, double rhs, double weight, double guess, double t,
                      const SolverConfig& cfg) {
    double y = guess;
    double relax = 1.0;
    double prev_delta = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < cfg.implicit_max_iter; ++iter) {
        const double target = rhs + weight * nl(y);
        const double next = y + relax * (target - y);
        const double delta = std::abs(next - y);
        y = next;
        if (delta <= cfg.implicit_tol * (1.0 + std::abs(y))) return y;
        if (delta > prev_delta) relax *= 0.5;
        prev_delta = delta;
    }
    std::ostringstream msg;
    msg << "implicit step did not converge at t = " << t << " after " << cfg.implicit_max_iter
        << " iterations; reduce the step h (currently " << cfg.step << ")";
    throw NumericError(msg.str());
}

// sum_{j=1}^{n-1} kernel[n-j] * values[j], with four interleaved partial sums.
double convolution_tail(const std::vector<double>& kernel, const std::vector<double>& values,
                        std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t j = 1;
    for (; j + 3 < n; j += 4) {
        acc[0] += kernel[n - j] * values[j];
        acc[1] += kernel[n - j - 1] * values[j + 1];
        acc[2] += kernel[n - j - 2] * values[j + 2];
        acc[3] += kernel[n - j - 3] * values[j + 3];
    }
    for (; j < n; ++j) acc[0] += kernel[n - j] * values[j];
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

Trajectory start_trajectory(double xi, const SolverConfig& cfg) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw DomainError("initial value xi must be > 0");
    Trajectory traj;
    traj.config = cfg;
    traj.xi = xi;
    const std::size_t n = cfg.steps();
    traj.times.reserve(n + 1);
    traj.values.reserve(n + 1);
    traj.times.push_back(0.0);
    traj.values.push_back(xi);
    return traj;
}

Trajectory solve_integral_form(const Nonlinearity& nl, const KernelMeasure& km, const Forcing& fc,
                               double xi, const SolverConfig& cfg) {
    Trajectory traj = start_trajectory(xi, cfg);
    const std::size_t steps = cfg.steps();
    const double h = cfg.step;

    std::vector<double> kernel(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) kernel[k] = km.capital_m(static_cast<double>(k) * h);
    std::vector<double> fx(steps + 1, 0.0);
    fx[0] = nl(xi);

    const double implicit_weight = 0.5 * h * kernel[0];
    for (std::size_t n = 1; n <= steps; ++n) {
        const double t = static_cast<double>(n) * h;
        const double memory = 0.5 * kernel[n] * fx[0] + convolution_tail(kernel, fx, n);
        const double rhs = xi + fc.big_h(t) + h * memory;
        double x = rhs;
        if (implicit_weight > 0.0 && !overflowed(rhs, cfg.overflow_cap)) {
            x = solve_implicit(nl, rhs, implicit_weight, traj.values.back(), t, cfg);
        }
        if (overflowed(x, cfg.overflow_cap)) {
            traj.status = TrajectoryStatus::TruncatedOverflow;
            break;
        }
        traj.times.push_back(t);
        traj.values.push_back(x);
        fx[n] = nl(x);
    }
    return traj;
}

Trajectory solve_delay_form(const Nonlinearity& nl, const KernelMeasure& km, const Forcing& fc,
                            double xi, const SolverConfig& cfg) {
    Trajectory traj = start_trajectory(xi, cfg);
    const std::size_t steps = cfg.steps();
    const double h = cfg.step;
    const auto lag = static_cast<std::size_t>(std::llround(km.tau() / h));

    std::vector<double> atoms(steps / lag + 1);
    for (std::size_t j = 0; j < atoms.size(); ++j) atoms[j] = km.atom(j);
    std::vector<double> density;
    if (km.has_density()) {
        density.resize(steps + 1);
        for (std::size_t k = 0; k <= steps; ++k) density[k] = km.density(static_cast<double>(k) * h);
    }
    std::vector<double> fx(steps + 1, 0.0);
    fx[0] = nl(xi);

    // Right-hand side at grid index n with current value f(x_n) = f_now, using
    // the comb atoms j <= last_atom.
    auto rhs = [&](std::size_t n, double f_now, std::size_t last_atom) {
        double acc = atoms[0] * f_now;
        for (std::size_t j = 1; j <= last_atom; ++j) acc += atoms[j] * fx[n - j * lag];
        if (!density.empty() && n > 0) {
            const double tail = convolution_tail(density, fx, n);
            acc += h * (0.5 * density[n] * fx[0] + tail + 0.5 * density[0] * f_now);
        }
        return acc + fc.small_h(static_cast<double>(n) * h);
    };

    for (std::size_t n = 0; n < steps; ++n) {
        // Atoms switching on exactly at t_{n+1} act only after the step.
        const std::size_t last_atom = n / lag;
        const double x_now = traj.values.back();
        const double slope_now = rhs(n, fx[n], last_atom);
        const double predictor = x_now + h * slope_now;
        double x_next = predictor;
        if (!overflowed(predictor, cfg.overflow_cap) && predictor > 0.0) {
            const double slope_next = rhs(n + 1, nl(predictor), last_atom);
            x_next = x_now + 0.5 * h * (slope_now + slope_next);
        }
        if (overflowed(x_next, cfg.overflow_cap)) {
            traj.status = TrajectoryStatus::TruncatedOverflow;
            break;
        }
        if (!(x_next > 0.0)) {
            throw NumericError("delay-form step produced a non-positive value at t = " +
                               std::to_string(static_cast<double>(n + 1) * h) + "; reduce the step h");
        }
        traj.times.push_back(static_cast<double>(n + 1) * h);
        traj.values.push_back(x_next);
        fx[n + 1] = nl(x_next);
    }
    return traj;
}

}  // namespace

std::size_t SolverConfig::steps() const {
    return static_cast<std::size_t>(std::llround(t_max / step));
}

void SolverConfig::validate(const KernelMeasure& km) const {
    std::ostringstream problems;
    if (!(step > 0.0) || !std::isfinite(step)) problems << "step h must be > 0; ";
    if (!(t_max > 0.0) || !std::isfinite(t_max)) problems << "t_max must be > 0; ";
    if (step > 0.0 && t_max > 0.0) {
        const double ratio = t_max / step;
        if (std::abs(ratio - std::round(ratio)) > kGridSnap * std::max(1.0, ratio)) {
            problems << "t_max must be an integer multiple of h; ";
        }
        if (std::round(ratio) < 1.0 || std::round(ratio) > static_cast<double>(kMaxSteps)) {
            problems << "t_max/h must lie in [1, " << kMaxSteps << "]; ";
        }
    }
    if (!(implicit_tol > 0.0)) problems << "implicit_tol must be > 0; ";
    if (implicit_max_iter < 1) problems << "implicit_max_iter must be >= 1; ";
    if (!(overflow_cap > 0.0)) problems << "overflow_cap must be > 0; ";
    for (double c : checkpoints) {
        if (!(c >= 0.0) || c > t_max * (1.0 + kGridSnap)) {
            problems << "checkpoint " << c << " outside [0, t_max]; ";
        }
    }
    if (km.has_comb() && step > 0.0) {
        const double lag = km.tau() / step;
        if (std::abs(lag - std::round(lag)) > kGridSnap * std::max(1.0, lag) || std::round(lag) < 1.0) {
            problems << "comb lag tau/h = " << lag << " must be a positive integer; ";
        }
    }
    if (km.grid().horizon < t_max * (1.0 - kGridSnap)) {
        problems << "measure horizon " << km.grid().horizon << " is shorter than t_max; ";
    }
    const std::string text = problems.str();
    if (!text.empty()) throw DomainError("invalid solver configuration: " + text.substr(0, text.size() - 2));
}

std::string_view to_string(TrajectoryStatus status) {
    switch (status) {
        case TrajectoryStatus::Completed: return "completed";
        case TrajectoryStatus::TruncatedOverflow: return "truncated-overflow";
    }
    return "unknown";
}

std::size_t Trajectory::index_of(double t) const {
    const auto n = static_cast<std::size_t>(std::llround(t / config.step));
    return n < values.size() ? n : npos;
}

Trajectory solve_volterra(const Nonlinearity& nl, const KernelMeasure& km, const Forcing& fc,
                          double xi, const SolverConfig& cfg) {
    cfg.validate(km);
    if (km.has_comb()) return solve_delay_form(nl, km, fc, xi, cfg);
    return solve_integral_form(nl, km, fc, xi, cfg);
}

Trajectory solve_comparison_ode(const Nonlinearity& nl, const KernelMeasure& km, double xi,
                                const SolverConfig& cfg) {
    cfg.validate(km);
    Trajectory traj = start_trajectory(xi, cfg);
    const std::size_t steps = cfg.steps();
    const double h = cfg.step;
    for (std::size_t n = 0; n < steps; ++n) {
        const double t0 = static_cast<double>(n) * h;
        const double t1 = static_cast<double>(n + 1) * h;
        const double y = traj.values.back();
        const double k1 = km.capital_m(t0) * nl(y);
        const double predictor = y + h * k1;
        double y_next = predictor;
        if (!overflowed(predictor, cfg.overflow_cap)) {
            const double k2 = km.capital_m_left(t1) * nl(predictor);
            y_next = y + 0.5 * h * (k1 + k2);
        }
        if (overflowed(y_next, cfg.overflow_cap)) {
            traj.status = TrajectoryStatus::TruncatedOverflow;
            break;
        }
        traj.times.push_back(t1);
        traj.values.push_back(y_next);
    }
    return traj;
}

}  // namespace vg
