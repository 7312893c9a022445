#include "vg/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quadrature.hpp"
#include "vg/errors.hpp"

namespace vg {
namespace {

constexpr std::size_t kCombBlock = 1024;
// Snapping tolerance for t / tau when locating comb atoms on the grid.
constexpr double kLagSnap = 1e-9;

void check_time(double t, const char* what) {
    if (!(t >= 0.0) || std::isnan(t)) {
        throw DomainError(std::string(what) + ": t must be >= 0, got " + std::to_string(t));
    }
}

}  // namespace

struct KernelMeasure::State {
    MeasureKind kind = MeasureKind::DirectM;
    double theta = 0.0;
    MeasureGrid grid;

    RealFunction density;
    double tau = 0.0;
    RealFunction weight;
    RealFunction direct_m;
    RealFunction direct_m_bar;

    // int_0^{k h} m(s) ds at grid nodes.
    std::vector<double> density_cumulative;
    // Prefix sums over comb blocks: sum_{j < b B} w_j and sum_{j < b B} j w_j.
    std::vector<double> comb_sum0;
    std::vector<double> comb_sum1;
    // Trapezoidal Mbar of the continuous part at grid nodes, plus node values.
    std::vector<double> trap_nodes;
    std::vector<double> trap_cumulative;

    [[nodiscard]] std::size_t node_count() const {
        return static_cast<std::size_t>(std::ceil(grid.horizon / grid.grid_step - kLagSnap));
    }

    double weight_at(std::size_t j) const { return weight(static_cast<double>(j) * tau); }

    // (sum_{j<=last} w_j, sum_{j<=last} j w_j)
    std::pair<double, double> comb_sums(std::size_t last) const {
        const std::size_t count = last + 1;
        std::size_t block = std::min(count / kCombBlock, comb_sum0.size() - 1);
        detail::CompensatedSum s0;
        detail::CompensatedSum s1;
        s0.add(comb_sum0[block]);
        s1.add(comb_sum1[block]);
        for (std::size_t j = block * kCombBlock; j < count; ++j) {
            const double w = weight_at(j);
            s0.add(w);
            s1.add(static_cast<double>(j) * w);
        }
        return {s0.value(), s1.value()};
    }

    double comb_mass(double t) const {
        const double jt = std::floor(t / tau + kLagSnap);
        return comb_sums(static_cast<std::size_t>(jt)).first;
    }

    double comb_mass_left(double t) const {
        const double jt = std::ceil(t / tau - kLagSnap) - 1.0;
        if (jt < 0.0) return 0.0;
        return comb_sums(static_cast<std::size_t>(jt)).first;
    }

    // Exact int_0^t of the comb's running mass: sum_j w_j (t - j tau).
    double comb_m_bar(double t) const {
        const double jt = std::floor(t / tau + kLagSnap);
        const auto [s0, s1] = comb_sums(static_cast<std::size_t>(jt));
        return t * s0 - tau * s1;
    }

    double density_mass(double t) const {
        const double h = grid.grid_step;
        const std::size_t last = density_cumulative.size() - 1;
        const auto k = std::min(static_cast<std::size_t>(std::floor(t / h)), last);
        const double node = static_cast<double>(k) * h;
        return density_cumulative[k] + detail::integrate_gk(density, node, t, 1e-13);
    }

    double continuous_mass(double t) const {
        switch (kind) {
            case MeasureKind::AbsContinuous:
            case MeasureKind::Mixed: return density_mass(t);
            case MeasureKind::DirectM: return direct_m(t);
            case MeasureKind::Discrete: return 0.0;
        }
        return 0.0;
    }

    double trapezoid_m_bar(double t) const {
        const double h = grid.grid_step;
        const std::size_t last = trap_nodes.size() - 1;
        auto k = static_cast<std::size_t>(std::floor(t / h + kLagSnap));
        if (k <= last) {
            const double node = static_cast<double>(k) * h;
            if (t - node <= kLagSnap * h) return trap_cumulative[k];
            return trap_cumulative[k] + 0.5 * (t - node) * (trap_nodes[k] + continuous_mass(t));
        }
        // Past the cached horizon: continue the same trapezoid rule.
        double acc = trap_cumulative[last];
        double prev = trap_nodes[last];
        for (std::size_t i = last + 1; i <= k; ++i) {
            const double value = continuous_mass(static_cast<double>(i) * h);
            acc += 0.5 * h * (prev + value);
            prev = value;
        }
        const double node = static_cast<double>(k) * h;
        if (t - node > kLagSnap * h) acc += 0.5 * (t - node) * (prev + continuous_mass(t));
        return acc;
    }

    void build_caches() {
        const double h = grid.grid_step;
        const std::size_t n = node_count();
        if (density) {
            density_cumulative.assign(n + 1, 0.0);
            detail::CompensatedSum acc;
            for (std::size_t k = 1; k <= n; ++k) {
                acc.add(detail::integrate_gk(density, static_cast<double>(k - 1) * h,
                                             static_cast<double>(k) * h, 1e-13));
                density_cumulative[k] = acc.value();
            }
        }
        if (weight) {
            const auto atoms = static_cast<std::size_t>(std::floor(grid.horizon / tau + kLagSnap)) + 1;
            const std::size_t blocks = atoms / kCombBlock + 1;
            comb_sum0.assign(blocks + 1, 0.0);
            comb_sum1.assign(blocks + 1, 0.0);
            detail::CompensatedSum s0;
            detail::CompensatedSum s1;
            for (std::size_t j = 0; j < blocks * kCombBlock; ++j) {
                const double w = weight_at(j);
                s0.add(w);
                s1.add(static_cast<double>(j) * w);
                if ((j + 1) % kCombBlock == 0) {
                    comb_sum0[(j + 1) / kCombBlock] = s0.value();
                    comb_sum1[(j + 1) / kCombBlock] = s1.value();
                }
            }
        }
        const bool needs_trapezoid = kind != MeasureKind::Discrete && !direct_m_bar;
        if (needs_trapezoid) {
            trap_nodes.assign(n + 1, 0.0);
            trap_cumulative.assign(n + 1, 0.0);
            for (std::size_t k = 0; k <= n; ++k) {
                trap_nodes[k] = kind == MeasureKind::DirectM ? direct_m(static_cast<double>(k) * h)
                                                             : density_cumulative[k];
                if (k > 0) {
                    trap_cumulative[k] =
                        trap_cumulative[k - 1] + 0.5 * h * (trap_nodes[k - 1] + trap_nodes[k]);
                }
            }
        }
    }
};

namespace {

void check_common(double theta, const MeasureGrid& grid) {
    if (!(theta >= 0.0) || !std::isfinite(theta)) throw DomainError("measure index theta must be >= 0");
    if (!(grid.horizon > 0.0) || !(grid.grid_step > 0.0)) {
        throw DomainError("measure horizon and grid step must be positive");
    }
}

void check_tau(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("comb lag tau must be > 0");
}

}  // namespace

std::string_view to_string(MeasureKind kind) {
    switch (kind) {
        case MeasureKind::AbsContinuous: return "density";
        case MeasureKind::Discrete: return "discrete";
        case MeasureKind::Mixed: return "mixed";
        case MeasureKind::DirectM: return "direct";
    }
    return "unknown";
}

KernelMeasure::KernelMeasure(std::shared_ptr<const State> state) : state_(std::move(state)) {}

KernelMeasure KernelMeasure::abs_continuous(RealFunction density, double theta, MeasureGrid grid) {
    check_common(theta, grid);
    if (!density) throw DomainError("density must be callable");
    auto s = std::make_shared<State>();
    s->kind = MeasureKind::AbsContinuous;
    s->theta = theta;
    s->grid = grid;
    s->density = std::move(density);
    s->build_caches();
    return KernelMeasure(std::move(s));
}

KernelMeasure KernelMeasure::discrete(double tau, RealFunction weight, double theta,
                                      MeasureGrid grid) {
    check_common(theta, grid);
    check_tau(tau);
    if (!weight) throw DomainError("comb weight rule must be callable");
    auto s = std::make_shared<State>();
    s->kind = MeasureKind::Discrete;
    s->theta = theta;
    s->grid = grid;
    s->tau = tau;
    s->weight = std::move(weight);
    s->build_caches();
    return KernelMeasure(std::move(s));
}

KernelMeasure KernelMeasure::mixed(RealFunction density, double tau, RealFunction weight,
                                   double theta, MeasureGrid grid) {
    check_common(theta, grid);
    check_tau(tau);
    if (!density || !weight) throw DomainError("mixed measure needs a density and a weight rule");
    auto s = std::make_shared<State>();
    s->kind = MeasureKind::Mixed;
    s->theta = theta;
    s->grid = grid;
    s->density = std::move(density);
    s->tau = tau;
    s->weight = std::move(weight);
    s->build_caches();
    return KernelMeasure(std::move(s));
}

KernelMeasure KernelMeasure::direct(RealFunction m, double theta, MeasureGrid grid,
                                    RealFunction m_bar) {
    check_common(theta, grid);
    if (!m) throw DomainError("M must be callable");
    if (!(m(0.0) >= 0.0)) throw DomainError("M(0) must be >= 0");
    auto s = std::make_shared<State>();
    s->kind = MeasureKind::DirectM;
    s->theta = theta;
    s->grid = grid;
    s->direct_m = std::move(m);
    s->direct_m_bar = std::move(m_bar);
    s->build_caches();
    return KernelMeasure(std::move(s));
}

MeasureKind KernelMeasure::kind() const noexcept { return state_->kind; }
double KernelMeasure::index() const noexcept { return state_->theta; }
const MeasureGrid& KernelMeasure::grid() const noexcept { return state_->grid; }
double KernelMeasure::tau() const noexcept { return state_->tau; }
bool KernelMeasure::has_comb() const noexcept { return static_cast<bool>(state_->weight); }
bool KernelMeasure::has_density() const noexcept { return static_cast<bool>(state_->density); }

double KernelMeasure::atom(std::size_t j) const {
    return has_comb() ? state_->weight_at(j) : 0.0;
}

double KernelMeasure::density(double s) const {
    return has_density() ? state_->density(s) : 0.0;
}

double KernelMeasure::atom_at_zero() const { return capital_m(0.0); }

double KernelMeasure::continuous_part(double t) const {
    check_time(t, "continuous_part");
    return state_->continuous_mass(t);
}

double KernelMeasure::comb_part(double t) const {
    check_time(t, "comb_part");
    return has_comb() ? state_->comb_mass(t) : 0.0;
}

double KernelMeasure::capital_m(double t) const {
    check_time(t, "capital_m");
    switch (state_->kind) {
        case MeasureKind::DirectM: return state_->direct_m(t);
        case MeasureKind::AbsContinuous: return state_->density_mass(t);
        case MeasureKind::Discrete: return state_->comb_mass(t);
        case MeasureKind::Mixed: return state_->density_mass(t) + state_->comb_mass(t);
    }
    return 0.0;
}

double KernelMeasure::capital_m_left(double t) const {
    check_time(t, "capital_m_left");
    if (t == 0.0) return 0.0;
    switch (state_->kind) {
        case MeasureKind::DirectM: return state_->direct_m(t);
        case MeasureKind::AbsContinuous: return state_->density_mass(t);
        case MeasureKind::Discrete: return state_->comb_mass_left(t);
        case MeasureKind::Mixed: return state_->density_mass(t) + state_->comb_mass_left(t);
    }
    return 0.0;
}

double KernelMeasure::m_bar(double t) const {
    check_time(t, "m_bar");
    const State& s = *state_;
    switch (s.kind) {
        case MeasureKind::DirectM:
            return s.direct_m_bar ? s.direct_m_bar(t) : s.trapezoid_m_bar(t);
        case MeasureKind::AbsContinuous: return s.trapezoid_m_bar(t);
        case MeasureKind::Discrete: return s.comb_m_bar(t);
        case MeasureKind::Mixed: return s.trapezoid_m_bar(t) + s.comb_m_bar(t);
    }
    return 0.0;
}

double capital_m(const KernelMeasure& km, double t) { return km.capital_m(t); }
double m_bar(const KernelMeasure& km, double t) { return km.m_bar(t); }

std::vector<double> discrete_ratio(const KernelMeasure& km, const RealFunction& m_tilde,
                                   const std::vector<double>& t_grid) {
    if (km.kind() != MeasureKind::Discrete) throw DomainError("discrete_ratio needs a Discrete measure");
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw DomainError("t_grid must be increasing");
        const double comparison = m_tilde(t_grid[i]);
        if (!(comparison > 0.0)) {
            throw DomainError("comparison mass must be positive at t = " + std::to_string(t_grid[i]));
        }
        out.push_back(km.capital_m(t_grid[i]) / comparison);
    }
    return out;
}

double MeasureIndexCheck::measured_index() const {
    return ratios.empty() ? 0.0 : std::log2(ratios.back());
}

MeasureIndexCheck index_self_check(const KernelMeasure& km, double t_last) {
    MeasureIndexCheck check;
    check.expected_ratio = std::pow(2.0, km.index());
    double prev_mass = km.capital_m(0.0);
    for (double t = 1e2; t <= t_last * 1.0001; t *= 10.0) {
        const double mass = km.capital_m(t);
        if (mass < prev_mass) check.nondecreasing = false;
        if (!(mass > prev_mass)) check.unbounded = false;
        prev_mass = mass;
        check.sample_t.push_back(t);
        check.ratios.push_back(km.capital_m(2.0 * t) / mass);
    }
    const double last = check.ratios.empty() ? 0.0 : check.ratios.back();
    check.pass = check.nondecreasing && check.unbounded && std::isfinite(last) &&
                 std::abs(last / check.expected_ratio - 1.0) <= 0.1;
    return check;
}

}  // namespace vg
