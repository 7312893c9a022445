#pragma once

// Scenario-driven experiment runner: JSON scenario in, CSV table plus JSON
// summary out.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vg/asymptotics.hpp"
#include "vg/forcing.hpp"
#include "vg/measure.hpp"
#include "vg/regvar.hpp"
#include "vg/solver.hpp"

namespace vg::runner {

/// Every problem found while reading a scenario, not just the first.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(std::vector<std::string> problems);
    [[nodiscard]] const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct NonlinearitySpec {
    std::string kind = "power";  // power | loglog | sinloglog | table
    double scale = 1.0;
    double beta = 0.5;
    double alpha = 1.0;
    double shift = kDefaultLogLogShift;
    std::vector<double> table_x;
    std::vector<double> table_f;
};

struct DensitySpec {
    std::string form = "shifted-power";  // shifted-power: m = mass theta (1+s)^(theta-1); constant: m = mass
    double theta = 1.0;
    double mass = 1.0;
};

struct CombSpec {
    double tau = 1.0;
    std::string weights = "constant";  // constant | log | power
    double theta = 1.0;
    double mass = 1.0;
};

struct KernelSpec {
    std::string kind = "direct";  // direct | density | discrete | mixed
    /// direct forms: power (mass t^theta), shifted-power (mass((1+t)^theta - 1)),
    /// constant (mass, Dirac at zero), zero.
    std::string form = "power";
    double theta = 1.0;
    double mass = 1.0;
    DensitySpec density;
    CombSpec comb;
};

struct ForcingSpec {
    std::string kind = "none";  // none | power-exp | scaled-finv | osc-power | osc-exp
    double alpha = 0.0;
    double gamma = 0.0;
    double lambda0 = 1.0;
};

/// A pass/fail rule evaluated on the emitted table and summary numbers.
///
///   final_rel        |col(final)/target - 1| <= tolerance
///   final_abs        |col(final) - target| <= tolerance
///   trend            |col/target - 1| strictly shrinking over checkpoint rows
///   forced_identity  max |x - xi - x/D4| / (1 + x) <= tolerance
///   dirac_exact      max |x - (1 + t/2)^2| / x <= tolerance
///   extra_max        extras[key] <= tolerance
///   extra_min        extras[key] > tolerance
///   extra_range      lo <= extras[key] <= hi
///   classification   classification == expected
struct CheckSpec {
    std::string name;
    std::string kind;
    std::string column;  // CSV column or extras key
    /// Literal target, or a summary key: Lambda, C2, L, U, zeta, target.
    std::optional<double> target_value;
    std::string target_key;
    double tolerance = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::string expected;
};

struct Scenario {
    std::string name = "scenario";
    std::string preset;
    std::string description;
    NonlinearitySpec nonlinearity;
    KernelSpec kernel;
    ForcingSpec forcing;
    double xi = 1.0;
    SolverConfig solver;
    std::string equation = "volterra";  // volterra | ode
    bool predict = true;
    bool richardson = false;
    /// Window [lo, hi] for the H / int f(H) oscillation measurement.
    std::optional<std::pair<double, double>> oscillation_window;
    std::size_t csv_rows = 1000;
    std::string output_dir = ".";
    std::vector<CheckSpec> checks;
};

inline constexpr double kDefaultStep = 0.05;
inline constexpr double kDefaultTMax = 400.0;

/// Reads a JSON scenario. A "preset" key starts from that preset and the
/// remaining keys override it. Throws ValidationError listing all problems.
Scenario parse_scenario(std::string_view text);

/// Serializes a scenario in the schema parse_scenario reads (no preset key).
std::string to_json(const Scenario& s);

/// Validation of an assembled scenario (also run by parse_scenario).
std::vector<std::string> validate(const Scenario& s);

/// Re-derives checkpoints after a t_max change: keeps those <= t_max, falls
/// back to t_max/8, /4, /2, 1 when none remain.
void apply_t_max(Scenario& s, double t_max);

struct PresetInfo {
    std::string name;
    std::string description;
};

std::vector<PresetInfo> list_presets();
/// Throws ValidationError for an unknown name.
Scenario preset_scenario(std::string_view name);

// Builders from specs. The measure grid uses the scenario step and t_max.
Nonlinearity build_nonlinearity(const NonlinearitySpec& spec);
KernelMeasure build_kernel(const KernelSpec& spec, MeasureGrid grid);
Forcing build_forcing(const ForcingSpec& spec, const Nonlinearity& nl, const KernelMeasure& km);

struct CheckResult {
    std::string name;
    double value = 0.0;
    bool pass = false;
    std::string detail;
};

struct Report {
    Scenario scenario;
    std::string status = "completed";  // completed | truncated-overflow | failed
    std::string error;
    std::optional<AsymptoticPrediction> prediction;
    std::optional<ForcingClassification> classification;
    DiagnosticSeries diagnostics;
    std::vector<DiagnosticRow> table;
    std::map<std::string, double> extras;
    std::size_t steps = 0;
    std::vector<CheckResult> checks;
    bool pass = false;

    /// Header t,x,F_x,M_t,Mbar_t,D1,D2,D3,D4; %.17g values; empty for undefined.
    [[nodiscard]] std::string csv() const;
    [[nodiscard]] std::string summary_json() const;
};

/// construct -> solve -> predict -> diagnose -> evaluate checks. Numeric
/// failures are captured as status "failed".
Report run_scenario(const Scenario& s);

/// Recomputes check results from the table and summary numbers only.
std::vector<CheckResult> evaluate_checks(const Report& report);

/// Writes <dir>/<name>.csv and <dir>/<name>.json.
void write_report(const Report& report, const std::string& dir);

/// Runs scenarios concurrently (at most `threads` at once) and returns the
/// reports ordered by scenario name.
std::vector<Report> run_batch(const std::vector<Scenario>& scenarios, unsigned threads);

/// VG_THREADS if set and positive, else hardware concurrency.
unsigned default_thread_count();

/// Index of a batch: one entry per scenario, ordered by name.
std::string batch_index_json(const std::vector<Report>& reports);

/// Formats a double the way the CSV does.
std::string format_number(double v);

}  // namespace vg::runner
