#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

#include "vg/errors.hpp"
#include "vg/scenario.hpp"

namespace vg::runner {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ordered_json number_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

ordered_json optional_number(const std::optional<double>& v) {
    return v ? number_or_null(*v) : ordered_json(nullptr);
}

double column_value(const DiagnosticRow& row, std::string_view column) {
    if (column == "t") return row.t;
    if (column == "x") return row.x;
    if (column == "F_x") return row.big_f;
    if (column == "M_t") return row.m;
    if (column == "Mbar_t") return row.m_bar;
    if (column == "D1") return row.d1;
    if (column == "D2") return row.d2;
    if (column == "D3") return row.d3;
    if (column == "D4") return row.d4;
    throw DomainError("unknown column " + std::string(column));
}

std::optional<double> column_target(const DiagnosticTargets& tg, std::string_view column) {
    if (column == "D1") return tg.d1;
    if (column == "D2") return tg.d2;
    if (column == "D3") return tg.d3;
    if (column == "D4") return tg.d4;
    return std::nullopt;
}

std::optional<double> resolve_target(const Report& r, const CheckSpec& c) {
    if (c.target_value) return c.target_value;
    if (c.target_key == "target") return column_target(r.diagnostics.targets, c.column);
    if (!r.prediction) return std::nullopt;
    const auto& p = *r.prediction;
    if (c.target_key == "Lambda") return p.lambda_limit;
    if (c.target_key == "C2") return p.growth_constant;
    if (c.target_key == "L") return p.lower;
    if (c.target_key == "U") return p.upper;
    if (c.target_key == "zeta") return p.zeta;
    return std::nullopt;
}

std::string classification_name(const Report& r) {
    if (r.classification) return std::string(to_string(r.classification->classification));
    if (r.prediction) return std::string(to_string(r.prediction->classification));
    return "none";
}

// Grid indices written to the CSV: an even thinning plus every checkpoint and
// the last point.
std::vector<std::size_t> table_indices(const Trajectory& traj, std::size_t rows) {
    const std::size_t n = traj.size();
    std::set<std::size_t> idx;
    const std::size_t stride = std::max<std::size_t>(1, (n - 1 + rows - 2) / std::max<std::size_t>(1, rows - 1));
    for (std::size_t i = 0; i < n; i += stride) idx.insert(i);
    for (double c : traj.config.checkpoints) {
        const std::size_t k = traj.index_of(c);
        if (k != Trajectory::npos) idx.insert(k);
    }
    idx.insert(n - 1);
    return {idx.begin(), idx.end()};
}

Trajectory solve(const Scenario& s, const Nonlinearity& nl, const KernelMeasure& km, const Forcing& fc,
                 const SolverConfig& cfg) {
    if (s.equation == "ode") return solve_comparison_ode(nl, km, s.xi, cfg);
    return solve_volterra(nl, km, fc, s.xi, cfg);
}

double richardson_ratio(const Scenario& s, const Nonlinearity& nl, const KernelMeasure& km,
                        const Forcing& fc, double x_h) {
    SolverConfig cfg = s.solver;
    cfg.checkpoints.clear();
    cfg.step = s.solver.step / 2.0;
    const Trajectory half = solve(s, nl, km, fc, cfg);
    cfg.step = s.solver.step / 4.0;
    const Trajectory quarter = solve(s, nl, km, fc, cfg);
    if (half.status != TrajectoryStatus::Completed || quarter.status != TrajectoryStatus::Completed) return kNaN;
    const double x2 = half.values.back();
    const double x4 = quarter.values.back();
    return std::abs(x_h - x2) / std::abs(x2 - x4);
}

void fill(Report& r) {
    const Scenario& s = r.scenario;
    const Nonlinearity nl = build_nonlinearity(s.nonlinearity);
    const KernelMeasure km = build_kernel(s.kernel, MeasureGrid{s.solver.t_max, s.solver.step});
    const Forcing fc = build_forcing(s.forcing, nl, km);
    s.solver.validate(km);

    const Trajectory traj = solve(s, nl, km, fc, s.solver);
    r.steps = traj.size() - 1;
    if (traj.status == TrajectoryStatus::TruncatedOverflow) r.status = "truncated-overflow";

    std::optional<double> lambda;
    if (fc.active()) {
        ProbeGrid probes;
        probes.t_max = traj.last_time();
        r.classification = classify_forcing(nl, km, fc, probes);
        const auto& cls = *r.classification;
        if (cls.classification == Classification::ForcingDominates) {
            lambda = std::numeric_limits<double>::infinity();
        } else if (cls.classification == Classification::LambdaFinite) {
            lambda = cls.lambda_estimate;
        }
        if (!cls.r1.empty()) r.extras["R1_final"] = cls.r1.back();
        if (!cls.r2.empty()) r.extras["R2_final"] = cls.r2.back();
        r.extras["oscillation_ratio"] = cls.oscillation_ratio;
    }
    const double beta = nl.index();
    const double theta = km.index();
    if (s.predict) {
        AsymptoticPrediction pred =
            s.equation == "ode" ? predict_comparison_ode(beta, theta) : predict(beta, theta, lambda);
        if (r.classification && r.classification->classification == Classification::IllBehaved) {
            pred.classification = Classification::IllBehaved;
        }
        r.prediction = pred;
        r.diagnostics = diagnostics(traj, nl, km, fc, pred);
    } else {
        r.diagnostics = diagnostics(traj, nl, km, fc, predict(beta, theta));
        r.diagnostics.targets = {};
        r.diagnostics.trend_d1 = r.diagnostics.trend_d2 = r.diagnostics.trend_d3 = r.diagnostics.trend_d4 = false;
    }

    for (std::size_t n : table_indices(traj, s.csv_rows)) r.table.push_back(diagnostic_row(traj, n, nl, km, fc));

    if (s.oscillation_window) {
        r.extras["forcing_oscillation_ratio"] = forcing_oscillation_ratio(
            nl, fc, s.oscillation_window->first, s.oscillation_window->second, s.solver.step);
    }
    if (s.equation == "ode") {
        const double f_xi = big_F(nl, s.xi);
        double worst = 0.0;
        for (std::size_t n = 0; n < traj.size(); ++n) {
            worst = std::max(worst, std::abs(big_F(nl, traj.values[n]) - f_xi - km.m_bar(traj.times[n])));
        }
        r.extras["identity_residual"] = worst;
    }
    if (s.richardson && traj.status == TrajectoryStatus::Completed) {
        r.extras["richardson_ratio"] = richardson_ratio(s, nl, km, fc, traj.values.back());
    }
}

CheckResult evaluate(const Report& r, const CheckSpec& c) {
    CheckResult out{c.name, kNaN, false, ""};
    char buf[160];
    if (r.status == "failed") {
        out.detail = "run failed";
        return out;
    }
    if (c.kind == "final_rel" || c.kind == "final_abs") {
        const auto target = resolve_target(r, c);
        if (!target || r.table.empty()) {
            out.detail = "no target or no rows";
            return out;
        }
        const double v = column_value(r.table.back(), c.column);
        out.value = c.kind == "final_rel" ? std::abs(v / *target - 1.0) : std::abs(v - *target);
        out.pass = out.value <= c.tolerance;
        std::snprintf(buf, sizeof buf, "%s=%.6g target=%.6g gap=%.3g tol=%.3g", c.column.c_str(), v, *target,
                      out.value, c.tolerance);
    } else if (c.kind == "trend") {
        const auto target = resolve_target(r, c);
        if (!target) {
            out.detail = "no target";
            return out;
        }
        std::vector<double> values;
        for (const auto& row : r.diagnostics.rows) values.push_back(column_value(row, c.column));
        out.pass = values.size() >= 3 && shrinking_relative_gap(values, *target);
        out.value = values.empty() ? kNaN : std::abs(values.back() / *target - 1.0);
        if (values.size() < 3) {
            std::snprintf(buf, sizeof buf, "only %zu checkpoints, a trend needs 3", values.size());
        } else {
            std::snprintf(buf, sizeof buf, "%zu checkpoints, last gap %.3g", values.size(), out.value);
        }
    } else if (c.kind == "forced_identity" || c.kind == "dirac_exact") {
        double worst = 0.0;
        std::size_t used = 0;
        for (const auto& row : r.table) {
            double gap = 0.0;
            if (c.kind == "forced_identity") {
                if (!std::isfinite(row.d4)) continue;
                gap = std::abs(row.x - r.scenario.xi - row.x / row.d4) / (1.0 + row.x);
            } else {
                const double exact = (1.0 + row.t / 2.0) * (1.0 + row.t / 2.0);
                gap = std::abs(row.x - exact) / row.x;
            }
            worst = std::max(worst, gap);
            ++used;
        }
        out.value = worst;
        out.pass = used > 0 && worst <= c.tolerance;
        std::snprintf(buf, sizeof buf, "max gap %.3g over %zu rows, tol %.3g", worst, used, c.tolerance);
    } else if (c.kind == "extra_max" || c.kind == "extra_min" || c.kind == "extra_range") {
        const auto it = r.extras.find(c.column);
        if (it == r.extras.end()) {
            out.detail = c.column + " not computed";
            return out;
        }
        out.value = it->second;
        if (c.kind == "extra_max") {
            out.pass = out.value <= c.tolerance;
            std::snprintf(buf, sizeof buf, "%s=%.6g <= %.3g", c.column.c_str(), out.value, c.tolerance);
        } else if (c.kind == "extra_min") {
            out.pass = out.value > c.tolerance;
            std::snprintf(buf, sizeof buf, "%s=%.6g > %.3g", c.column.c_str(), out.value, c.tolerance);
        } else {
            out.pass = out.value >= c.lo && out.value <= c.hi;
            std::snprintf(buf, sizeof buf, "%s=%.6g in [%.3g, %.3g]", c.column.c_str(), out.value, c.lo, c.hi);
        }
    } else if (c.kind == "classification") {
        const std::string got = classification_name(r);
        out.pass = got == c.expected;
        out.value = out.pass ? 1.0 : 0.0;
        out.detail = got + (out.pass ? " == " : " != ") + c.expected;
        return out;
    } else {
        out.detail = "unknown check kind";
        return out;
    }
    out.detail = buf;
    return out;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string Report::csv() const {
    std::string out = "t,x,F_x,M_t,Mbar_t,D1,D2,D3,D4\n";
    for (const auto& row : table) {
        const double fields[] = {row.t, row.x, row.big_f, row.m, row.m_bar, row.d1, row.d2, row.d3, row.d4};
        for (std::size_t i = 0; i < std::size(fields); ++i) {
            if (i) out += ',';
            out += format_number(fields[i]);
        }
        out += '\n';
    }
    return out;
}

std::string Report::summary_json() const {
    ordered_json j;
    j["scenario"] = scenario.name;
    const AsymptoticPrediction* p = prediction ? &*prediction : nullptr;
    j["beta"] = scenario.nonlinearity.beta;
    j["theta"] = p ? ordered_json(p->theta) : ordered_json(nullptr);
    j["lambda"] = p ? optional_number(p->forcing_lambda) : ordered_json(nullptr);
    j["Lambda"] = p ? number_or_null(p->lambda_limit) : ordered_json(nullptr);
    j["C2"] = p ? number_or_null(p->growth_constant) : ordered_json(nullptr);
    j["L"] = p ? number_or_null(p->lower) : ordered_json(nullptr);
    j["U"] = p ? optional_number(p->upper) : ordered_json(nullptr);
    j["zeta"] = p ? optional_number(p->zeta) : ordered_json(nullptr);
    j["classification"] = classification_name(*this);
    const DiagnosticRow* last = table.empty() ? nullptr : &table.back();
    j["final_D1"] = last ? number_or_null(last->d1) : ordered_json(nullptr);
    j["final_D2"] = last ? number_or_null(last->d2) : ordered_json(nullptr);
    j["final_D3"] = last ? number_or_null(last->d3) : ordered_json(nullptr);
    j["final_D4"] = last ? number_or_null(last->d4) : ordered_json(nullptr);
    const auto& tg = diagnostics.targets;
    j["trend_D1"] = tg.d1 ? ordered_json(diagnostics.trend_d1) : ordered_json(nullptr);
    j["trend_D2"] = tg.d2 ? ordered_json(diagnostics.trend_d2) : ordered_json(nullptr);
    j["trend_D3"] = tg.d3 ? ordered_json(diagnostics.trend_d3) : ordered_json(nullptr);
    j["trend_D4"] = tg.d4 ? ordered_json(diagnostics.trend_d4) : ordered_json(nullptr);
    j["status"] = status;
    if (!error.empty()) j["error"] = error;
    j["steps"] = steps;
    j["step"] = scenario.solver.step;
    j["t_max"] = scenario.solver.t_max;
    ordered_json ex = ordered_json::object();
    for (const auto& [k, v] : extras) ex[k] = number_or_null(v);
    j["extras"] = ex;
    ordered_json checks_json = ordered_json::array();
    for (const auto& c : checks) {
        checks_json.push_back({{"name", c.name}, {"pass", c.pass}, {"value", number_or_null(c.value)},
                               {"detail", c.detail}});
    }
    j["checks"] = checks_json;
    j["pass"] = pass;
    j["config"] = ordered_json::parse(to_json(scenario));
    return j.dump(2) + "\n";
}

Report run_scenario(const Scenario& s) {
    Report r;
    r.scenario = s;
    try {
        fill(r);
    } catch (const std::exception& e) {
        r.status = "failed";
        r.error = e.what();
    }
    r.checks = evaluate_checks(r);
    r.pass = r.status != "failed" &&
             std::all_of(r.checks.begin(), r.checks.end(), [](const CheckResult& c) { return c.pass; });
    return r;
}

std::vector<CheckResult> evaluate_checks(const Report& report) {
    std::vector<CheckResult> out;
    for (const auto& c : report.scenario.checks) out.push_back(evaluate(report, c));
    return out;
}

void write_report(const Report& report, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto write = [](const fs::path& path, const std::string& text) {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + path.string());
        os << text;
    };
    write(fs::path(dir) / (report.scenario.name + ".csv"), report.csv());
    write(fs::path(dir) / (report.scenario.name + ".json"), report.summary_json());
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("VG_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Report> run_batch(const std::vector<Scenario>& scenarios, unsigned threads) {
    std::vector<Report> reports(scenarios.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < scenarios.size(); i = next++) reports[i] = run_scenario(scenarios[i]);
    };
    const unsigned count = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(1, scenarios.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < count; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    std::stable_sort(reports.begin(), reports.end(),
                     [](const Report& a, const Report& b) { return a.scenario.name < b.scenario.name; });
    return reports;
}

std::string batch_index_json(const std::vector<Report>& reports) {
    ordered_json j = ordered_json::array();
    for (const auto& r : reports) {
        j.push_back({{"scenario", r.scenario.name},
                     {"status", r.status},
                     {"pass", r.pass},
                     {"csv", r.scenario.name + ".csv"},
                     {"json", r.scenario.name + ".json"}});
    }
    return j.dump(2) + "\n";
}

}  // namespace vg::runner
