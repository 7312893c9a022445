#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "vg/errors.hpp"
#include "vg/scenario.hpp"

namespace vg::runner {
namespace {

using nlohmann::json;

const std::vector<double> kDefaultCheckpoints = {50.0, 100.0, 200.0, 400.0};

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += "; ";
        out += p;
    }
    return out;
}

// Typed access to one JSON object; every problem is appended to `errors`.
class Fields {
public:
    Fields(const json& obj, std::string path, std::vector<std::string>& errors,
           std::initializer_list<std::string_view> allowed)
        : obj_(obj), path_(std::move(path)), errors_(errors) {
        if (!obj_.is_object()) {
            errors_.push_back(path_ + " must be an object");
            valid_ = false;
            return;
        }
        const std::set<std::string_view> keys(allowed);
        for (const auto& item : obj_.items()) {
            if (!keys.contains(item.key())) errors_.push_back("unknown key '" + qualified(item.key()) + "'");
        }
    }

    [[nodiscard]] bool has(const char* key) const { return valid_ && obj_.contains(key); }

    void number(const char* key, double& out) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (v.is_number()) {
            out = v.get<double>();
        } else {
            errors_.push_back(qualified(key) + " must be a number");
        }
    }

    void integer(const char* key, int& out) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (v.is_number_integer()) {
            out = v.get<int>();
        } else {
            errors_.push_back(qualified(key) + " must be an integer");
        }
    }

    void count(const char* key, std::size_t& out) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
            out = v.get<std::size_t>();
        } else {
            errors_.push_back(qualified(key) + " must be a non-negative integer");
        }
    }

    void text(const char* key, std::string& out) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (v.is_string()) {
            out = v.get<std::string>();
        } else {
            errors_.push_back(qualified(key) + " must be a string");
        }
    }

    void flag(const char* key, bool& out) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (v.is_boolean()) {
            out = v.get<bool>();
        } else {
            errors_.push_back(qualified(key) + " must be a boolean");
        }
    }

    bool numbers(const char* key, std::vector<double>& out) {
        if (!has(key)) return false;
        const json& v = obj_.at(key);
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
            errors_.push_back(qualified(key) + " must be an array of numbers");
            return false;
        }
        out = v.get<std::vector<double>>();
        return true;
    }

    [[nodiscard]] const json* child(const char* key) const { return has(key) ? &obj_.at(key) : nullptr; }
    [[nodiscard]] std::string qualified(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

private:
    const json& obj_;
    std::string path_;
    std::vector<std::string>& errors_;
    bool valid_ = true;
};

void read_nonlinearity(const json& j, NonlinearitySpec& spec, std::vector<std::string>& errors) {
    Fields f(j, "nonlinearity", errors, {"kind", "scale", "beta", "alpha", "shift", "x", "f"});
    f.text("kind", spec.kind);
    f.number("scale", spec.scale);
    f.number("beta", spec.beta);
    f.number("alpha", spec.alpha);
    f.number("shift", spec.shift);
    f.numbers("x", spec.table_x);
    f.numbers("f", spec.table_f);
}

void read_density(const json& j, const std::string& path, DensitySpec& spec,
                  std::vector<std::string>& errors, bool allow_kind) {
    Fields f(j, path, errors,
             allow_kind ? std::initializer_list<std::string_view>{"kind", "form", "theta", "mass"}
                        : std::initializer_list<std::string_view>{"form", "theta", "mass"});
    f.text("form", spec.form);
    f.number("theta", spec.theta);
    f.number("mass", spec.mass);
}

void read_comb(const json& j, const std::string& path, CombSpec& spec, std::vector<std::string>& errors,
               bool allow_kind) {
    Fields f(j, path, errors,
             allow_kind ? std::initializer_list<std::string_view>{"kind", "tau", "weights", "theta", "mass"}
                        : std::initializer_list<std::string_view>{"tau", "weights", "theta", "mass"});
    f.number("tau", spec.tau);
    f.text("weights", spec.weights);
    f.number("theta", spec.theta);
    f.number("mass", spec.mass);
}

void read_kernel(const json& j, KernelSpec& spec, std::vector<std::string>& errors) {
    if (!j.is_object()) {
        errors.push_back("kernel must be an object");
        return;
    }
    if (j.contains("kind") && j.at("kind").is_string()) spec.kind = j.at("kind").get<std::string>();
    if (spec.kind == "density") {
        read_density(j, "kernel", spec.density, errors, true);
        spec.theta = spec.density.form == "constant" ? 1.0 : spec.density.theta;
    } else if (spec.kind == "discrete") {
        read_comb(j, "kernel", spec.comb, errors, true);
        spec.theta = spec.comb.weights == "constant" ? 1.0 : spec.comb.theta;
    } else if (spec.kind == "mixed") {
        Fields f(j, "kernel", errors, {"kind", "theta", "density", "comb"});
        f.number("theta", spec.theta);
        if (const json* d = f.child("density")) read_density(*d, "kernel.density", spec.density, errors, false);
        if (const json* c = f.child("comb")) read_comb(*c, "kernel.comb", spec.comb, errors, false);
    } else {
        Fields f(j, "kernel", errors, {"kind", "form", "theta", "mass"});
        f.text("kind", spec.kind);
        f.text("form", spec.form);
        f.number("theta", spec.theta);
        f.number("mass", spec.mass);
    }
}

void read_forcing(const json& j, ForcingSpec& spec, std::vector<std::string>& errors) {
    Fields f(j, "forcing", errors, {"kind", "alpha", "gamma", "lambda0"});
    f.text("kind", spec.kind);
    f.number("alpha", spec.alpha);
    f.number("gamma", spec.gamma);
    f.number("lambda0", spec.lambda0);
}

// Returns true when checkpoints were given explicitly.
bool read_solver(const json& j, SolverConfig& cfg, std::vector<std::string>& errors) {
    Fields f(j, "solver", errors,
             {"step", "t_max", "implicit_tol", "implicit_max_iter", "checkpoints", "overflow_cap"});
    f.number("step", cfg.step);
    f.number("t_max", cfg.t_max);
    f.number("implicit_tol", cfg.implicit_tol);
    f.integer("implicit_max_iter", cfg.implicit_max_iter);
    f.number("overflow_cap", cfg.overflow_cap);
    return f.numbers("checkpoints", cfg.checkpoints);
}

void read_checks(const json& j, std::vector<CheckSpec>& checks, std::vector<std::string>& errors) {
    if (!j.is_array()) {
        errors.push_back("checks must be an array");
        return;
    }
    checks.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string path = "checks[" + std::to_string(i) + "]";
        CheckSpec c;
        Fields f(j[i], path, errors,
                 {"name", "kind", "column", "target", "tolerance", "lo", "hi", "expected"});
        f.text("name", c.name);
        f.text("kind", c.kind);
        f.text("column", c.column);
        f.number("tolerance", c.tolerance);
        f.number("lo", c.lo);
        f.number("hi", c.hi);
        f.text("expected", c.expected);
        if (const json* t = f.child("target")) {
            if (t->is_number()) {
                c.target_value = t->get<double>();
            } else if (t->is_string()) {
                c.target_key = t->get<std::string>();
            } else {
                errors.push_back(path + ".target must be a number or a summary key");
            }
        }
        if (c.name.empty()) c.name = c.kind + (c.column.empty() ? "" : ":" + c.column);
        checks.push_back(std::move(c));
    }
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

bool near_integer(double v) { return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::abs(v)); }

const std::set<std::string> kCheckKinds = {"final_rel",   "final_abs", "trend",     "forced_identity",
                                           "dirac_exact", "extra_max", "extra_min", "extra_range",
                                           "classification"};

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::invalid_argument("invalid scenario: " + join(problems)), problems_(std::move(problems)) {}

void apply_t_max(Scenario& s, double t_max) {
    s.solver.t_max = t_max;
    std::vector<double> kept;
    for (double c : s.solver.checkpoints) {
        if (c > 0.0 && c <= t_max * (1.0 + 1e-12)) kept.push_back(c);
    }
    if (kept.empty()) kept = {t_max / 8.0, t_max / 4.0, t_max / 2.0, t_max};
    s.solver.checkpoints = kept;
}

Scenario parse_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError({std::string("malformed JSON: ") + e.what()});
    }
    std::vector<std::string> errors;
    Fields top(doc, "", errors,
               {"name", "preset", "description", "nonlinearity", "kernel", "forcing", "xi", "solver",
                "equation", "predict", "richardson", "oscillation_window", "csv_rows", "output",
                "checks"});
    if (!doc.is_object()) throw ValidationError(errors);

    Scenario s;
    s.solver.checkpoints = kDefaultCheckpoints;
    std::string preset;
    top.text("preset", preset);
    if (!preset.empty()) {
        try {
            s = preset_scenario(preset);
        } catch (const ValidationError& e) {
            errors.insert(errors.end(), e.problems().begin(), e.problems().end());
        }
    }
    top.text("name", s.name);
    top.text("description", s.description);
    if (const json* j = top.child("nonlinearity")) read_nonlinearity(*j, s.nonlinearity, errors);
    if (const json* j = top.child("kernel")) read_kernel(*j, s.kernel, errors);
    if (const json* j = top.child("forcing")) read_forcing(*j, s.forcing, errors);
    top.number("xi", s.xi);
    bool explicit_checkpoints = false;
    if (const json* j = top.child("solver")) explicit_checkpoints = read_solver(*j, s.solver, errors);
    if (!explicit_checkpoints) apply_t_max(s, s.solver.t_max);
    top.text("equation", s.equation);
    top.flag("predict", s.predict);
    top.flag("richardson", s.richardson);
    top.count("csv_rows", s.csv_rows);
    top.text("output", s.output_dir);
    std::vector<double> window;
    if (top.numbers("oscillation_window", window)) {
        if (window.size() == 2) {
            s.oscillation_window = std::make_pair(window[0], window[1]);
        } else {
            errors.push_back("oscillation_window must hold exactly two numbers");
        }
    }
    if (const json* j = top.child("checks")) read_checks(*j, s.checks, errors);

    auto more = validate(s);
    errors.insert(errors.end(), more.begin(), more.end());
    if (!errors.empty()) throw ValidationError(errors);
    return s;
}

std::vector<std::string> validate(const Scenario& s) {
    std::vector<std::string> e;
    if (s.name.empty() || !std::all_of(s.name.begin(), s.name.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        })) {
        e.push_back("name must be non-empty and use only [A-Za-z0-9._-]");
    }

    const auto& nl = s.nonlinearity;
    static const std::set<std::string> nl_kinds = {"power", "loglog", "sinloglog", "table"};
    if (!nl_kinds.contains(nl.kind)) e.push_back("nonlinearity.kind '" + nl.kind + "' is not one of power|loglog|sinloglog|table");
    if (!(nl.beta >= 0.0 && nl.beta < 1.0)) e.push_back("nonlinearity.beta must lie in [0,1), got " + num(nl.beta));
    if (!(nl.scale > 0.0)) e.push_back("nonlinearity.scale must be > 0");
    if (nl.kind == "loglog" && !(nl.alpha > 0.0)) e.push_back("nonlinearity.alpha must be > 0");
    if (!(nl.shift >= 0.0)) e.push_back("nonlinearity.shift must be >= 0");
    if (nl.kind == "table" && (nl.table_x.size() < 2 || nl.table_x.size() != nl.table_f.size())) {
        e.push_back("nonlinearity.x and nonlinearity.f must be equal-length arrays of at least two samples");
    }

    const auto& k = s.kernel;
    static const std::set<std::string> kernel_kinds = {"direct", "density", "discrete", "mixed"};
    if (!kernel_kinds.contains(k.kind)) e.push_back("kernel.kind '" + k.kind + "' is not one of direct|density|discrete|mixed");
    if (!(k.theta >= 0.0)) e.push_back("kernel.theta must be >= 0, got " + num(k.theta));
    if (k.kind == "direct") {
        static const std::set<std::string> forms = {"power", "shifted-power", "constant", "zero"};
        if (!forms.contains(k.form)) e.push_back("kernel.form '" + k.form + "' is not one of power|shifted-power|constant|zero");
        if (!(k.mass >= 0.0)) e.push_back("kernel.mass must be >= 0");
    }
    if (k.kind == "density" || k.kind == "mixed") {
        if (k.density.form != "shifted-power" && k.density.form != "constant") {
            e.push_back("kernel density form '" + k.density.form + "' is not one of shifted-power|constant");
        }
        if (!(k.density.theta >= 0.0)) e.push_back("kernel density theta must be >= 0");
        if (!(k.density.mass >= 0.0)) e.push_back("kernel density mass must be >= 0");
    }
    if (k.kind == "discrete" || k.kind == "mixed") {
        static const std::set<std::string> weights = {"constant", "log", "power"};
        if (!weights.contains(k.comb.weights)) e.push_back("kernel weights '" + k.comb.weights + "' is not one of constant|log|power");
        if (!(k.comb.theta >= 0.0)) e.push_back("kernel comb theta must be >= 0");
        if (!(k.comb.mass >= 0.0)) e.push_back("kernel comb mass must be >= 0");
        if (!(k.comb.tau > 0.0)) {
            e.push_back("kernel.tau must be > 0");
        } else if (s.solver.step > 0.0) {
            const double lag = k.comb.tau / s.solver.step;
            if (!near_integer(lag) || std::round(lag) < 1.0) {
                e.push_back("kernel.tau / solver.step = " + num(lag) + " must be a positive integer");
            }
        }
    }

    const auto& fc = s.forcing;
    static const std::set<std::string> forcing_kinds = {"none", "power-exp", "scaled-finv", "osc-power", "osc-exp"};
    if (!forcing_kinds.contains(fc.kind)) e.push_back("forcing.kind '" + fc.kind + "' is not recognised");
    if (fc.kind == "power-exp" && !(fc.gamma >= 0.0 && fc.alpha + fc.gamma > 0.0)) {
        e.push_back("forcing power-exp needs gamma >= 0 and alpha + gamma > 0");
    }
    if (fc.kind == "scaled-finv" && !(fc.lambda0 > 0.0)) e.push_back("forcing.lambda0 must be > 0");
    if (fc.kind == "osc-power" && !(fc.alpha > 0.0)) e.push_back("forcing.alpha must be > 0 for osc-power");
    if (fc.kind == "osc-exp" && !(fc.alpha > 0.0 && fc.alpha < 1.0)) e.push_back("forcing.alpha must lie in (0,1) for osc-exp");

    if (!(s.xi > 0.0)) e.push_back("xi must be > 0");
    const auto& cfg = s.solver;
    if (!(cfg.step > 0.0)) e.push_back("solver.step must be > 0");
    if (!(cfg.t_max > 0.0)) e.push_back("solver.t_max must be > 0");
    if (cfg.step > 0.0 && cfg.t_max > 0.0) {
        const double n = cfg.t_max / cfg.step;
        if (!near_integer(n)) e.push_back("solver.t_max must be an integer multiple of solver.step");
        if (std::round(n) > static_cast<double>(kMaxSteps)) {
            e.push_back("solver.t_max / solver.step exceeds " + std::to_string(kMaxSteps) + " steps");
        }
    }
    if (!(cfg.implicit_tol > 0.0)) e.push_back("solver.implicit_tol must be > 0");
    if (cfg.implicit_max_iter < 1) e.push_back("solver.implicit_max_iter must be >= 1");
    if (!(cfg.overflow_cap > 0.0)) e.push_back("solver.overflow_cap must be > 0");
    for (double c : cfg.checkpoints) {
        if (!(c > 0.0) || c > cfg.t_max * (1.0 + 1e-12)) {
            e.push_back("checkpoint " + num(c) + " lies outside (0, t_max]");
        }
    }
    if (s.equation != "volterra" && s.equation != "ode") e.push_back("equation must be volterra or ode");
    if (s.equation == "ode" && fc.kind != "none") e.push_back("equation ode takes no forcing");
    if (s.csv_rows < 2) e.push_back("csv_rows must be >= 2");
    if (s.oscillation_window) {
        const auto [lo, hi] = *s.oscillation_window;
        if (!(lo > 0.0 && hi > lo && hi <= cfg.t_max * (1.0 + 1e-12))) {
            e.push_back("oscillation_window must satisfy 0 < lo < hi <= t_max");
        }
    }
    for (const auto& c : s.checks) {
        if (!kCheckKinds.contains(c.kind)) e.push_back("check '" + c.name + "' has unknown kind '" + c.kind + "'");
    }
    return e;
}

std::string to_json(const Scenario& s) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    if (!s.description.empty()) j["description"] = s.description;
    const auto& nl = s.nonlinearity;
    j["nonlinearity"] = {{"kind", nl.kind}, {"scale", nl.scale}, {"beta", nl.beta}, {"alpha", nl.alpha}, {"shift", nl.shift}};
    if (nl.kind == "table") {
        j["nonlinearity"]["x"] = nl.table_x;
        j["nonlinearity"]["f"] = nl.table_f;
    }
    const auto& k = s.kernel;
    const auto density = [](const DensitySpec& d) {
        return nlohmann::ordered_json{{"form", d.form}, {"theta", d.theta}, {"mass", d.mass}};
    };
    const auto comb = [](const CombSpec& c) {
        return nlohmann::ordered_json{{"tau", c.tau}, {"weights", c.weights}, {"theta", c.theta}, {"mass", c.mass}};
    };
    nlohmann::ordered_json kernel = {{"kind", k.kind}};
    if (k.kind == "density") {
        kernel.update(density(k.density));
    } else if (k.kind == "discrete") {
        kernel.update(comb(k.comb));
    } else if (k.kind == "mixed") {
        kernel["theta"] = k.theta;
        kernel["density"] = density(k.density);
        kernel["comb"] = comb(k.comb);
    } else {
        kernel["form"] = k.form;
        kernel["theta"] = k.theta;
        kernel["mass"] = k.mass;
    }
    j["kernel"] = kernel;
    j["forcing"] = {{"kind", s.forcing.kind}, {"alpha", s.forcing.alpha}, {"gamma", s.forcing.gamma},
                    {"lambda0", s.forcing.lambda0}};
    j["xi"] = s.xi;
    j["solver"] = {{"step", s.solver.step},
                   {"t_max", s.solver.t_max},
                   {"implicit_tol", s.solver.implicit_tol},
                   {"implicit_max_iter", s.solver.implicit_max_iter},
                   {"checkpoints", s.solver.checkpoints},
                   {"overflow_cap", s.solver.overflow_cap}};
    j["equation"] = s.equation;
    j["predict"] = s.predict;
    j["richardson"] = s.richardson;
    if (s.oscillation_window) {
        j["oscillation_window"] = {s.oscillation_window->first, s.oscillation_window->second};
    }
    j["csv_rows"] = s.csv_rows;
    j["output"] = s.output_dir;
    auto checks = nlohmann::ordered_json::array();
    for (const auto& c : s.checks) {
        nlohmann::ordered_json cj = {{"name", c.name}, {"kind", c.kind}};
        if (!c.column.empty()) cj["column"] = c.column;
        if (c.target_value) {
            cj["target"] = *c.target_value;
        } else if (!c.target_key.empty()) {
            cj["target"] = c.target_key;
        }
        cj["tolerance"] = c.tolerance;
        if (c.kind == "extra_range") {
            cj["lo"] = c.lo;
            cj["hi"] = c.hi;
        }
        if (!c.expected.empty()) cj["expected"] = c.expected;
        checks.push_back(cj);
    }
    j["checks"] = checks;
    return j.dump(2);
}

Nonlinearity build_nonlinearity(const NonlinearitySpec& spec) {
    if (spec.kind == "power") return Nonlinearity::pure_power(spec.scale, spec.beta);
    if (spec.kind == "loglog") return Nonlinearity::power_loglog(spec.scale, spec.beta, spec.alpha, spec.shift);
    if (spec.kind == "sinloglog") return Nonlinearity::power_sin_loglog(spec.beta, spec.shift);
    if (spec.kind == "table") return Nonlinearity::user_table(spec.table_x, spec.table_f, spec.beta);
    throw DomainError("unknown nonlinearity kind " + spec.kind);
}

namespace {

RealFunction density_function(const DensitySpec& d) {
    const double mass = d.mass;
    const double theta = d.theta;
    if (d.form == "constant") return [mass](double) { return mass; };
    return [mass, theta](double s) { return mass * theta * std::exp((theta - 1.0) * std::log1p(s)); };
}

RealFunction weight_function(const CombSpec& c) {
    const double mass = c.mass;
    const double theta = c.theta;
    if (c.weights == "log") {
        return [mass, theta](double x) { return mass * std::log1p(x) / std::pow(1.0 + x, 1.0 - theta); };
    }
    if (c.weights == "power") return [mass, theta](double x) { return mass * std::pow(1.0 + x, theta - 1.0); };
    return [mass](double) { return mass; };
}

}  // namespace

KernelMeasure build_kernel(const KernelSpec& spec, MeasureGrid grid) {
    if (spec.kind == "density") {
        const double theta = spec.density.form == "constant" ? 1.0 : spec.density.theta;
        return KernelMeasure::abs_continuous(density_function(spec.density), theta, grid);
    }
    if (spec.kind == "discrete") {
        const double theta = spec.comb.weights == "constant" ? 1.0 : spec.comb.theta;
        return KernelMeasure::discrete(spec.comb.tau, weight_function(spec.comb), theta, grid);
    }
    if (spec.kind == "mixed") {
        return KernelMeasure::mixed(density_function(spec.density), spec.comb.tau,
                                    weight_function(spec.comb), spec.theta, grid);
    }
    const double mass = spec.mass;
    const double theta = spec.theta;
    if (spec.form == "zero") {
        return KernelMeasure::direct([](double) { return 0.0; }, 0.0, grid, [](double) { return 0.0; });
    }
    if (spec.form == "constant") {
        return KernelMeasure::direct([mass](double) { return mass; }, 0.0, grid,
                                     [mass](double t) { return mass * t; });
    }
    if (spec.form == "shifted-power") {
        return KernelMeasure::direct(
            [mass, theta](double t) { return mass * std::expm1(theta * std::log1p(t)); }, theta, grid,
            [mass, theta](double t) {
                return mass * (std::expm1((theta + 1.0) * std::log1p(t)) / (theta + 1.0) - t);
            });
    }
    return KernelMeasure::direct([mass, theta](double t) { return mass * std::pow(t, theta); }, theta,
                                 grid,
                                 [mass, theta](double t) { return mass * std::pow(t, theta + 1.0) / (theta + 1.0); });
}

Forcing build_forcing(const ForcingSpec& spec, const Nonlinearity& nl, const KernelMeasure& km) {
    if (spec.kind == "power-exp") return Forcing::power_exp(spec.alpha, spec.gamma);
    if (spec.kind == "scaled-finv") return Forcing::scaled_finv(spec.lambda0, nl, km);
    if (spec.kind == "osc-power") return Forcing::osc_power(spec.alpha);
    if (spec.kind == "osc-exp") return Forcing::osc_exp(spec.alpha);
    return Forcing::none();
}

}  // namespace vg::runner
