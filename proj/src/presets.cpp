#include <functional>

#include "vg/scenario.hpp"

namespace vg::runner {
namespace {

CheckSpec keyed(std::string name, std::string kind, std::string column, std::string key,
                double tolerance = 0.0) {
    CheckSpec c;
    c.name = std::move(name);
    c.kind = std::move(kind);
    c.column = std::move(column);
    c.target_key = std::move(key);
    c.tolerance = tolerance;
    return c;
}

CheckSpec literal(std::string name, std::string kind, std::string column, double target,
                  double tolerance) {
    CheckSpec c;
    c.name = std::move(name);
    c.kind = std::move(kind);
    c.column = std::move(column);
    c.target_value = target;
    c.tolerance = tolerance;
    return c;
}

CheckSpec extra(std::string name, std::string kind, std::string key, double tolerance) {
    CheckSpec c;
    c.name = std::move(name);
    c.kind = std::move(kind);
    c.column = std::move(key);
    c.tolerance = tolerance;
    return c;
}

CheckSpec expect_class(std::string expected) {
    CheckSpec c;
    c.name = "classification";
    c.kind = "classification";
    c.expected = std::move(expected);
    return c;
}

Scenario base(std::string name, std::string description) {
    Scenario s;
    s.name = name;
    s.preset = std::move(name);
    s.description = std::move(description);
    s.solver.step = kDefaultStep;
    s.solver.t_max = kDefaultTMax;
    s.solver.checkpoints = {50.0, 100.0, 200.0, 400.0};
    return s;
}

Scenario unperturbed_power() {
    Scenario s = base("unperturbed-power", "f = sqrt(x), M(t) = t: D2 -> 1/6 and D3 -> 1/36");
    s.checks = {keyed("D2-final", "final_rel", "D2", "C2", 0.15),
                keyed("D2-trend", "trend", "D2", "C2"),
                keyed("D3-final", "final_rel", "D3", "L", 0.15),
                keyed("D3-trend", "trend", "D3", "L")};
    return s;
}

Scenario unperturbed_loglog() {
    Scenario s = base("unperturbed-loglog", "f = sqrt(x) log log x, M(t) = t: slowly varying correction");
    s.nonlinearity.kind = "loglog";
    s.checks = {keyed("D2-final", "final_rel", "D2", "C2", 0.15),
                keyed("D3-trend", "trend", "D3", "L")};
    return s;
}

Scenario unperturbed_sinloglog() {
    Scenario s = base("unperturbed-sinloglog", "f = sqrt(x) (2 + sin log log x), M(t) = t");
    s.nonlinearity.kind = "sinloglog";
    s.checks = {keyed("D2-final", "final_rel", "D2", "C2", 0.15),
                keyed("D2-trend", "trend", "D2", "C2"),
                keyed("D3-trend", "trend", "D3", "L")};
    return s;
}

Scenario discrete_paper_weights() {
    Scenario s = base("discrete-paper-weights",
                      "f = sqrt(x), unit-lag comb with weights log(j+1)/sqrt(1+j)");
    s.kernel.kind = "discrete";
    s.kernel.theta = 0.5;
    s.kernel.comb.tau = 1.0;
    s.kernel.comb.weights = "log";
    s.kernel.comb.theta = 0.5;
    s.checks = {keyed("D1-final", "final_rel", "D1", "Lambda", 0.4),
                keyed("D1-trend", "trend", "D1", "Lambda"),
                keyed("D2-trend", "trend", "D2", "C2"),
                keyed("D3-trend", "trend", "D3", "L")};
    return s;
}

Scenario perturbed_lambda1() {
    Scenario s = base("perturbed-lambda1", "f = sqrt(x), M(t) = t, H = F^-1(t M(t)) - 1: x / F^-1(tM) -> zeta");
    s.forcing.kind = "scaled-finv";
    s.forcing.lambda0 = 1.0;
    s.checks = {keyed("D3-final", "final_rel", "D3", "zeta", 0.15),
                keyed("D3-trend", "trend", "D3", "zeta"),
                expect_class("lambda-finite")};
    return s;
}

Scenario bigpert_exp() {
    Scenario s = base("bigpert-exp", "f = sqrt(x), M(t) = t, H = e^t - 1: x / H -> 1");
    s.forcing.kind = "power-exp";
    s.forcing.alpha = 0.0;
    s.forcing.gamma = 1.0;
    s.solver.step = 0.005;
    s.solver.t_max = 30.0;
    s.solver.checkpoints = {3.75, 7.5, 15.0, 30.0};
    s.checks = {literal("D4-final", "final_abs", "D4", 1.0, 0.02), expect_class("forcing-dominates"),
                extra("R2-final", "extra_max", "R2_final", 1e-3)};
    return s;
}

Scenario bigpert_oscpower() {
    Scenario s = base("bigpert-oscpower", "f = sqrt(x), M(t) = t, H = (1+t)^8 (2 + sin t) - 2");
    s.forcing.kind = "osc-power";
    s.forcing.alpha = 8.0;
    s.solver.t_max = 200.0;
    s.solver.checkpoints = {25.0, 50.0, 100.0, 200.0};
    s.checks = {literal("D4-final", "final_abs", "D4", 1.0, 0.05)};
    return s;
}

Scenario illbehaved_oscexp() {
    Scenario s = base("illbehaved-oscexp", "f = sqrt(x), M(t) = t, H = exp(t (1 + 0.9 p(t))) - 1");
    s.forcing.kind = "osc-exp";
    s.forcing.alpha = 0.9;
    s.solver.step = 0.01;
    s.solver.t_max = 40.0;
    s.solver.checkpoints = {5.0, 10.0, 20.0, 40.0};
    s.oscillation_window = std::make_pair(20.0, 40.0);
    s.checks = {expect_class("ill-behaved/unclassified"),
                extra("oscillation", "extra_min", "forcing_oscillation_ratio", 10.0)};
    return s;
}

Scenario ode_identity() {
    Scenario s = base("ode-identity", "y' = t sqrt(y): F(y) - F(xi) = Mbar(t) along the Heun solution");
    s.equation = "ode";
    s.richardson = true;
    s.solver.t_max = 100.0;
    s.solver.checkpoints = {12.5, 25.0, 50.0, 100.0};
    CheckSpec range = extra("richardson", "extra_range", "richardson_ratio", 0.0);
    range.lo = 3.5;
    range.hi = 4.5;
    s.checks = {extra("identity", "extra_max", "identity_residual", 1e-2), range};
    return s;
}

Scenario dirac_at_zero() {
    Scenario s = base("dirac-at-zero", "Dirac mass at zero, f = sqrt(x): x = (1 + t/2)^2 exactly");
    s.kernel.form = "constant";
    s.kernel.theta = 0.0;
    s.checks = {extra("exact", "dirac_exact", "x", 1e-10)};
    return s;
}

Scenario zero_measure_forced() {
    Scenario s = base("zero-measure-forced", "zero kernel with forcing (1+t)^2 (2 + sin t) - 2: x = xi + H");
    s.kernel.form = "zero";
    s.kernel.theta = 0.0;
    s.forcing.kind = "osc-power";
    s.forcing.alpha = 2.0;
    s.predict = false;
    s.checks = {extra("identity", "forced_identity", "D4", 1e-12)};
    return s;
}

struct Entry {
    const char* name;
    std::function<Scenario()> make;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = {
        {"unperturbed-power", unperturbed_power},
        {"unperturbed-loglog", unperturbed_loglog},
        {"unperturbed-sinloglog", unperturbed_sinloglog},
        {"discrete-paper-weights", discrete_paper_weights},
        {"perturbed-lambda1", perturbed_lambda1},
        {"bigpert-exp", bigpert_exp},
        {"bigpert-oscpower", bigpert_oscpower},
        {"illbehaved-oscexp", illbehaved_oscexp},
        {"ode-identity", ode_identity},
        {"dirac-at-zero", dirac_at_zero},
        {"zero-measure-forced", zero_measure_forced},
    };
    return entries;
}

}  // namespace

std::vector<PresetInfo> list_presets() {
    std::vector<PresetInfo> out;
    for (const auto& e : registry()) out.push_back({e.name, e.make().description});
    return out;
}

Scenario preset_scenario(std::string_view name) {
    for (const auto& e : registry()) {
        if (name == e.name) return e.make();
    }
    throw ValidationError({"unknown preset '" + std::string(name) + "'"});
}

}  // namespace vg::runner
