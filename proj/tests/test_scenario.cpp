#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vg/scenario.hpp"

using namespace vg::runner;

namespace {

bool mentions(const ValidationError& e, const std::string& needle) {
    return std::any_of(e.problems().begin(), e.problems().end(),
                       [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("preset document is fully populated") {
    const auto s = parse_scenario(R"({"preset": "unperturbed-power"})");
    CHECK(s.name == "unperturbed-power");
    CHECK(s.nonlinearity.kind == "power");
    CHECK(s.nonlinearity.beta == 0.5);
    CHECK(s.kernel.theta == 1.0);
    CHECK(s.xi == 1.0);
    CHECK(s.solver.step == 0.05);
    CHECK(s.solver.t_max == 400.0);
    CHECK(s.solver.checkpoints == std::vector<double>{50.0, 100.0, 200.0, 400.0});
    CHECK_FALSE(s.checks.empty());
}

TEST_CASE("defaults without a preset") {
    const auto s = parse_scenario(R"({"name": "plain", "solver": {"t_max": 120}})");
    CHECK(s.solver.step == 0.05);
    CHECK(s.solver.checkpoints == std::vector<double>{50.0, 100.0});
    const auto tiny = parse_scenario(R"({"name": "tiny", "solver": {"t_max": 20}})");
    CHECK(tiny.solver.checkpoints == std::vector<double>{2.5, 5.0, 10.0, 20.0});
}

TEST_CASE("t_max override filters checkpoints") {
    const auto s = parse_scenario(R"({"preset": "unperturbed-power", "solver": {"t_max": 100}})");
    CHECK(s.solver.checkpoints == std::vector<double>{50.0, 100.0});
}

TEST_CASE("validation aggregates every problem") {
    try {
        (void)parse_scenario(R"({"preset": "unperturbed-power", "nonlinearity": {"beta": 1.2},
                                 "kernel": {"theta": -1}, "colour": "red"})");
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.problems().size() == 3);
        CHECK(mentions(e, "nonlinearity.beta"));
        CHECK(mentions(e, "kernel.theta"));
        CHECK(mentions(e, "colour"));
    }
    try {
        (void)parse_scenario(R"({"name": "c", "kernel": {"kind": "discrete", "tau": 0.33}})");
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(mentions(e, "kernel.tau"));
    }
    CHECK_THROWS_AS(parse_scenario("{not json"), ValidationError);
    CHECK_THROWS_AS(parse_scenario(R"({"preset": "nope"})"), ValidationError);
    CHECK_THROWS_AS(parse_scenario(R"({"name": "a b"})"), ValidationError);
    CHECK_THROWS_AS(parse_scenario(R"({"name": "x", "xi": "one"})"), ValidationError);
}

TEST_CASE("round trip through to_json") {
    for (const auto& info : list_presets()) {
        const auto s = preset_scenario(info.name);
        const auto back = parse_scenario(to_json(s));
        CHECK(to_json(back) == to_json(s));
    }
}

TEST_CASE("list_presets") {
    const auto presets = list_presets();
    CHECK(presets.size() >= 10);
    for (const char* name : {"unperturbed-power", "unperturbed-loglog", "unperturbed-sinloglog",
                             "discrete-paper-weights", "perturbed-lambda1", "bigpert-exp", "bigpert-oscpower",
                             "illbehaved-oscexp", "ode-identity", "dirac-at-zero"}) {
        CHECK(std::any_of(presets.begin(), presets.end(), [&](const PresetInfo& p) { return p.name == name; }));
    }
}

TEST_CASE("run_scenario examples") {
    const auto up = run_scenario(preset_scenario("unperturbed-power"));
    CHECK(up.status == "completed");
    CHECK(up.pass);
    CHECK(std::abs(6.0 * up.table.back().d2 - 1.0) <= 0.15);

    const auto be = run_scenario(preset_scenario("bigpert-exp"));
    CHECK(be.pass);
    CHECK(std::abs(be.table.back().d4 - 1.0) <= 0.02);

    const auto zero = run_scenario(preset_scenario("zero-measure-forced"));
    CHECK(zero.pass);
}

TEST_CASE("checks are recomputable from the report") {
    auto r = run_scenario(preset_scenario("perturbed-lambda1"));
    const auto again = evaluate_checks(r);
    REQUIRE(again.size() == r.checks.size());
    for (std::size_t i = 0; i < again.size(); ++i) {
        CHECK(again[i].pass == r.checks[i].pass);
        CHECK(again[i].detail == r.checks[i].detail);
    }
    // tightening a tolerance flips the verdict without rerunning
    r.scenario.checks[0].tolerance = 1e-9;
    CHECK_FALSE(evaluate_checks(r)[0].pass);
}

TEST_CASE("numeric failure becomes a failed report") {
    auto s = preset_scenario("dirac-at-zero");
    s.solver.implicit_max_iter = 1;
    s.solver.implicit_tol = 1e-300;
    const auto r = run_scenario(s);
    CHECK(r.status == "failed");
    CHECK_FALSE(r.pass);
    CHECK_FALSE(r.error.empty());
}

TEST_CASE("CSV format") {
    const auto r = run_scenario(preset_scenario("ode-identity"));
    const std::string csv = r.csv();
    CHECK(csv.rfind("t,x,F_x,M_t,Mbar_t,D1,D2,D3,D4\n", 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);
    // no forcing: D4 is the empty last field
    const auto second = csv.substr(csv.find('\n') + 1);
    CHECK(second.substr(0, second.find('\n')).back() == ',');
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(std::nan("")) == "");
    CHECK(r.table.size() <= r.scenario.csv_rows + r.scenario.solver.checkpoints.size() + 1);
}

TEST_CASE("summary keys") {
    const auto r = run_scenario(preset_scenario("perturbed-lambda1"));
    const std::string js = r.summary_json();
    for (const char* key : {"scenario", "beta", "theta", "lambda", "Lambda", "C2", "L", "U", "zeta",
                            "classification", "final_D1", "final_D2", "final_D3", "final_D4", "trend_D1",
                            "trend_D2", "trend_D3", "trend_D4", "status"}) {
        CHECK(js.find("\"" + std::string(key) + "\":") != std::string::npos);
    }
}

TEST_CASE("determinism and batch equivalence") {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "vg_test_batch";
    fs::remove_all(root);
    std::vector<Scenario> batch;
    for (const char* name : {"ode-identity", "dirac-at-zero", "bigpert-exp"}) batch.push_back(preset_scenario(name));
    const auto reports = run_batch(batch, 3);
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].scenario.name == "bigpert-exp");
    CHECK(reports[2].scenario.name == "ode-identity");
    for (const auto& r : reports) write_report(r, (root / "batch").string());
    for (const auto& s : batch) {
        const auto alone = run_scenario(s);
        write_report(alone, (root / "alone").string());
        CHECK(slurp(root / "batch" / (s.name + ".csv")) == slurp(root / "alone" / (s.name + ".csv")));
        CHECK(slurp(root / "batch" / (s.name + ".json")) == slurp(root / "alone" / (s.name + ".json")));
    }
    CHECK(batch_index_json(reports).find("bigpert-exp") < batch_index_json(reports).find("ode-identity"));
    fs::remove_all(root);
}

}
