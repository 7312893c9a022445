#pragma once

// Theory-side predictions for the growth of Volterra solutions and the
// diagnostics that compare them with computed trajectories.

#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "vg/forcing.hpp"
#include "vg/measure.hpp"
#include "vg/regvar.hpp"
#include "vg/solver.hpp"

namespace vg {

enum class Classification { Unperturbed, LambdaFinite, ForcingDominates, IllBehaved };

std::string_view to_string(Classification c);

struct AsymptoticPrediction {
    double beta = 0.0;
    double theta = 0.0;
    double lambda_limit = 1.0;     // lim F(x)/Mbar
    double growth_constant = 1.0;  // lim F(x)/(t M)
    double lower = 1.0;            // L = C2^(1/(1-beta))
    std::optional<double> upper;   // U
    std::optional<double> c_star;  // max(U, L + lambda/(1-beta))
    /// lim H / F^-1(t M): absent when unforced, +inf when the forcing dominates.
    std::optional<double> forcing_lambda;
    std::optional<double> zeta;  // root of the characteristic equation
    Classification classification = Classification::Unperturbed;
};

/// Fills Lambda, C2 and L; with a finite lambda also U, C* and zeta.
AsymptoticPrediction predict(double beta, double theta,
                             std::optional<double> forcing_lambda = std::nullopt);

/// Same fields for the comparison ODE y' = M(t) f(y), where F(y) = F(xi) + Mbar
/// exactly: Lambda = 1, C2 = 1/(1+theta).
AsymptoticPrediction predict_comparison_ode(double beta, double theta);

struct CharacteristicSolution {
    double zeta = 0.0;
    int iterations = 0;
};

/// Fixed point of zeta = C2 zeta^beta + lambda, iterated from max(L, lambda).
CharacteristicSolution solve_characteristic(double beta, double theta, double lambda);

// Classification thresholds.
inline constexpr double kStabilityTolerance = 0.02;   // R1 change over the last dyadic step
inline constexpr double kSmallnessThreshold = 0.05;   // final R2 (or R1) below this is "small"
inline constexpr double kOscillationThreshold = 10.0; // R2 swing over the last decade
inline constexpr std::size_t kTrendProbes = 3;        // R2 must fall over this many final probes

struct ProbeGrid {
    double t_max = 400.0;
    /// Dyadic probe times t_max / 2^k, k = 0..probes-1.
    std::size_t probes = 5;
    /// Intervals of the uniform grid used for int_0^t f(H(s)) ds.
    std::size_t fine_intervals = std::size_t{1} << 17;
};

struct ForcingClassification {
    Classification classification = Classification::IllBehaved;
    std::optional<double> lambda_estimate;
    std::vector<double> probe_times;
    std::vector<double> r1;  // H / F^-1(t M)
    std::vector<double> r2;  // M int_0^t f(H) / H
    /// min(largest rise, largest fall) of R2 over [t_max/10, t_max]; 1 when monotone.
    double oscillation_ratio = 1.0;
    bool r1_stable = false;
    bool r2_decreasing = false;  // over the last kTrendProbes probes
    bool oscillating = false;
    bool truncated = false;      // H left double range; only the prefix was used
    double usable_t_max = 0.0;
};

/// Requires an active forcing.
ForcingClassification classify_forcing(const Nonlinearity& nl, const KernelMeasure& km,
                                       const Forcing& fc, const ProbeGrid& grid);

/// max/min over [t_lo, t_hi] of H(t) / int_0^t f(H(s)) ds, on a uniform grid of `step`.
double forcing_oscillation_ratio(const Nonlinearity& nl, const Forcing& fc, double t_lo,
                                 double t_hi, double step);

/// int_0^t a(s) b(t-s) ds / (t a(t) b(t)). For a in RV(rho), b in RV(sigma)
/// this tends to B(rho+1, sigma+1).
double convolution_ratio(double rho, double sigma, const std::function<double(double)>& a,
                         const std::function<double(double)>& b, double t);

/// B(rho+1, sigma+1).
double convolution_limit(double rho, double sigma);

/// One row of the diagnostic table; NaN marks an undefined entry.
struct DiagnosticRow {
    double t = 0.0;
    double x = 0.0;
    double big_f = 0.0;
    double m = 0.0;
    double m_bar = 0.0;
    double d1 = 0.0;  // F(x)/Mbar
    double d2 = 0.0;  // F(x)/(t M)
    double d3 = 0.0;  // x / F^-1(t M)
    double d4 = 0.0;  // x / H
};

DiagnosticRow diagnostic_row(const Trajectory& traj, std::size_t n, const Nonlinearity& nl,
                             const KernelMeasure& km, const Forcing& fc);

struct DiagnosticTargets {
    std::optional<double> d1, d2, d3, d4;
};

/// Limits the prediction implies for D1..D4.
DiagnosticTargets diagnostic_targets(const AsymptoticPrediction& pred);

struct DiagnosticSeries {
    std::vector<DiagnosticRow> rows;  // one per usable checkpoint
    DiagnosticTargets targets;
    /// |D_i/target - 1| strictly decreasing across checkpoints.
    bool trend_d1 = false, trend_d2 = false, trend_d3 = false, trend_d4 = false;
    /// Fewer than three usable checkpoints.
    bool degraded = false;
};

DiagnosticSeries diagnostics(const Trajectory& traj, const Nonlinearity& nl,
                             const KernelMeasure& km, const Forcing& fc,
                             const AsymptoticPrediction& pred);

/// True when |values[i]/target - 1| strictly decreases along the sequence.
bool shrinking_relative_gap(const std::vector<double>& values, double target);

}  // namespace vg
