#pragma once

// Memory measures mu on [0, inf) through their running mass
// M(t) = mu([0, t]) and its integral Mbar(t) = int_0^t M(s) ds.

#include <functional>
#include <memory>
#include <string_view>
#include <vector>

namespace vg {

enum class MeasureKind { AbsContinuous, Discrete, Mixed, DirectM };

std::string_view to_string(MeasureKind kind);

using RealFunction = std::function<double(double)>;

/// Cumulative caches are built eagerly for [0, horizon] on a uniform grid of
/// step `grid_step`, which should be the solver step so that Mbar shares the
/// solver's discretisation. Evaluation beyond the horizon is allowed but uncached.
struct MeasureGrid {
    double horizon = 400.0;
    double grid_step = 0.05;
};

/// Immutable after construction; copies share caches.
class KernelMeasure {
public:
    /// mu(ds) = m(s) ds.
    static KernelMeasure abs_continuous(RealFunction density, double theta, MeasureGrid grid);
    /// mu = sum_j w(j tau) delta_{j tau}; `weight` is evaluated at s = j tau.
    static KernelMeasure discrete(double tau, RealFunction weight, double theta, MeasureGrid grid);
    /// Density plus a Dirac comb.
    static KernelMeasure mixed(RealFunction density, double tau, RealFunction weight, double theta,
                               MeasureGrid grid);
    /// M given in closed form; M(0) is the atom at zero. `m_bar` may be empty,
    /// in which case Mbar is the trapezoidal integral on the grid.
    static KernelMeasure direct(RealFunction m, double theta, MeasureGrid grid,
                                RealFunction m_bar = {});

    [[nodiscard]] MeasureKind kind() const noexcept;
    [[nodiscard]] double index() const noexcept;
    [[nodiscard]] const MeasureGrid& grid() const noexcept;

    /// Lag of the comb; 0 when the measure has no comb.
    [[nodiscard]] double tau() const noexcept;
    /// True for Discrete and Mixed.
    [[nodiscard]] bool has_comb() const noexcept;
    /// Comb weight mu_0(j tau), 0 without a comb.
    [[nodiscard]] double atom(std::size_t j) const;
    /// Density m(s), 0 where the measure has no absolutely continuous part.
    [[nodiscard]] double density(double s) const;
    [[nodiscard]] bool has_density() const noexcept;

    [[nodiscard]] double atom_at_zero() const;

    /// M(t) = mu([0, t]).
    [[nodiscard]] double capital_m(double t) const;
    /// mu([0, t)), the left limit of M.
    [[nodiscard]] double capital_m_left(double t) const;
    [[nodiscard]] double m_bar(double t) const;

    /// Continuous and comb contributions to M(t); their sum is capital_m(t).
    [[nodiscard]] double continuous_part(double t) const;
    [[nodiscard]] double comb_part(double t) const;

private:
    struct State;
    explicit KernelMeasure(std::shared_ptr<const State> state);
    std::shared_ptr<const State> state_;
};

double capital_m(const KernelMeasure& km, double t);
double m_bar(const KernelMeasure& km, double t);

/// M(t) / m_tilde(t) along an increasing grid. Requires a Discrete measure.
std::vector<double> discrete_ratio(const KernelMeasure& km, const RealFunction& m_tilde,
                                   const std::vector<double>& t_grid);

struct MeasureIndexCheck {
    std::vector<double> sample_t;
    std::vector<double> ratios;  // M(2t)/M(t)
    double expected_ratio = 1.0;
    bool nondecreasing = true;
    bool unbounded = true;
    bool pass = false;
    /// log2 of the last ratio.
    [[nodiscard]] double measured_index() const;
};

/// Samples M(2t)/M(t) at t = 1e2, ..., `t_last` (decades) and compares the
/// last value with 2^theta at 10% tolerance.
MeasureIndexCheck index_self_check(const KernelMeasure& km, double t_last = 1e6);

}  // namespace vg
