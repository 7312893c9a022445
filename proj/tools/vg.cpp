// vg: command-line front end for the volgrowth library.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vg/scenario.hpp"
#include "vg/specfun.hpp"

namespace {

using nlohmann::ordered_json;
using namespace vg;
using namespace vg::runner;

ordered_json num(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

ordered_json opt(const std::optional<double>& v) { return v ? num(*v) : ordered_json(nullptr); }

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void print_checks(const Report& r) {
    for (const auto& c : r.checks) {
        std::fprintf(stderr, "  [%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    }
    if (!r.error.empty()) std::fprintf(stderr, "  error: %s\n", r.error.c_str());
}

int run_and_write(std::vector<Scenario> scenarios, const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto reports = run_batch(scenarios, default_thread_count());
    bool all = true;
    for (const auto& r : reports) {
        write_report(r, out);
        std::fprintf(stderr, "%s: %s, %s\n", r.scenario.name.c_str(), r.status.c_str(), r.pass ? "pass" : "FAIL");
        print_checks(r);
        all = all && r.pass;
    }
    if (reports.size() > 1) {
        std::ofstream(std::filesystem::path(out) / "index.json", std::ios::binary) << batch_index_json(reports);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "wall time %.2f s\n", secs);
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Growth rates of sublinear Volterra equations with unbounded memory"};
    app.require_subcommand(1);

    double beta = 0.5, theta = 1.0, lambda = 0.0;
    auto* predict_cmd = app.add_subcommand("predict", "Print the predicted asymptotic constants as JSON");
    predict_cmd->add_option("--beta", beta, "Index of f, in [0,1)")->required();
    predict_cmd->add_option("--theta", theta, "Index of M, >= 0")->required();
    auto* lambda_opt = predict_cmd->add_option("--lambda", lambda, "Forcing limit H / F^-1(tM), >= 0");

    std::vector<std::string> configs;
    std::string out = "out";
    auto* solve_cmd = app.add_subcommand("solve", "Run scenario documents and write CSV/JSON reports");
    solve_cmd->add_option("--config", configs, "Scenario JSON file (repeatable)")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--out", out, "Output directory");

    std::string preset;
    double t_max = 0.0, step = 0.0;
    auto* verify_cmd = app.add_subcommand("verify", "Run a preset (or all) and exit 0 iff every check passes");
    verify_cmd->add_option("--preset", preset, "Preset name or 'all'")->required();
    verify_cmd->add_option("--tmax", t_max, "Override t_max");
    verify_cmd->add_option("--step", step, "Override the step");
    verify_cmd->add_option("--out", out, "Output directory");

    double rho = 1.0, sigma = 1.0, conv_tmax = 100.0;
    auto* conv_cmd = app.add_subcommand("convlemma", "Convolution ratio of t^rho and t^sigma against the Beta limit");
    conv_cmd->add_option("--rho", rho, "Index of a, >= 0")->required();
    conv_cmd->add_option("--sigma", sigma, "Index of b, >= 0")->required();
    conv_cmd->add_option("--tmax", conv_tmax, "Largest t (decades from 1)");

    auto* presets_cmd = app.add_subcommand("presets", "List the built-in presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (predict_cmd->parsed()) {
            std::optional<double> lam;
            if (lambda_opt->count() > 0) lam = lambda;
            const auto p = predict(beta, theta, lam);
            ordered_json j;
            j["beta"] = beta;
            j["theta"] = theta;
            j["lambda"] = opt(p.forcing_lambda);
            j["Lambda"] = num(p.lambda_limit);
            j["C2"] = num(p.growth_constant);
            j["L"] = num(p.lower);
            j["U"] = opt(p.upper);
            j["C_star"] = opt(p.c_star);
            j["zeta"] = opt(p.zeta);
            j["classification"] = std::string(to_string(p.classification));
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (solve_cmd->parsed()) {
            std::vector<Scenario> scenarios;
            for (const auto& path : configs) scenarios.push_back(parse_scenario(read_file(path)));
            return run_and_write(std::move(scenarios), out);
        }
        if (verify_cmd->parsed()) {
            std::vector<Scenario> scenarios;
            if (preset == "all") {
                for (const auto& info : list_presets()) scenarios.push_back(preset_scenario(info.name));
            } else {
                scenarios.push_back(preset_scenario(preset));
            }
            for (auto& s : scenarios) {
                if (step > 0.0) s.solver.step = step;
                if (t_max > 0.0) apply_t_max(s, t_max);
                if (auto problems = validate(s); !problems.empty()) throw ValidationError(problems);
            }
            return run_and_write(std::move(scenarios), out);
        }
        if (conv_cmd->parsed()) {
            const auto a = [rho](double t) { return std::pow(t, rho); };
            const auto b = [sigma](double t) { return std::pow(t, sigma); };
            ordered_json rows = ordered_json::array();
            for (double t = 1.0; t <= conv_tmax * (1.0 + 1e-12); t *= 10.0) {
                rows.push_back({{"t", t}, {"ratio", num(convolution_ratio(rho, sigma, a, b, t))}});
            }
            ordered_json j;
            j["rho"] = rho;
            j["sigma"] = sigma;
            j["limit"] = convolution_limit(rho, sigma);
            j["rows"] = rows;
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (presets_cmd->parsed()) {
            for (const auto& info : list_presets()) std::printf("%-24s %s\n", info.name.c_str(), info.description.c_str());
            return 0;
        }
    } catch (const ValidationError& e) {
        for (const auto& p : e.problems()) std::fprintf(stderr, "error: %s\n", p.c_str());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
