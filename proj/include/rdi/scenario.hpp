#pragma once

#include <map>
#include <optional>

#include "rdi/op_fields.hpp"
#include "rdi/trivialization.hpp"

namespace rdi {

class ScenarioNotFound : public std::runtime_error {
public:
    explicit ScenarioNotFound(const std::string& name)
        : std::runtime_error("scenario not found: " + name) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// A fully parsed verification scenario: the geometry, the fiber chart, the
// bundle data, test sections/functions, and the base-point grid.
struct Scenario {
    std::string name;
    int ambient_dim = 0;
    int base_dim = 0;
    ExprMat metric_entries;  // ambient metric
    std::vector<Expr> rho;
    FiberChart chart;
    std::optional<HermitianBundle> bundle;
    std::optional<BundleTrivialization> trivialization;
    std::vector<Section> sections;
    std::vector<Expr> test_functions;
    std::vector<std::vector<double>> lambda_grid;
    int quad_order = 16;
    std::map<std::string, double> tolerances;

    // Extra data carried by built-in scenarios only.
    std::optional<FiberChart> region_chart;  // full-dimensional chart for the
                                             // two-sided integration check
    std::vector<std::pair<double, double>> base_box;
    std::optional<Expr> region_function;
    std::optional<double> region_oracle;     // closed-form value of the check
    std::optional<Expr> fiber_bump;          // cutoff for open fiber charts
    bool closed_fiber = false;
};

struct ScenarioOptions {
    int quad_order = 0;     // 0: keep the scenario's order
    double tol = 0.0;       // > 0: override every check tolerance
    int jobs = 1;
};

struct ScenarioReport {
    std::string scenario;
    std::vector<CheckReport> checks;

    bool passed() const {
        for (const CheckReport& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(const std::string& name);  // throws ScenarioNotFound

// Parse and validate a scenario configuration document (JSON text). Throws
// ConfigError with the offending field path or expression offset.
Scenario load_scenario_text(const std::string& text);
Scenario load_scenario_file(const std::string& path);

ScenarioReport run_scenario(const Scenario& s, const ScenarioOptions& opt = {});

// Runs several scenarios, optionally in parallel; reports come back in the
// input order regardless of scheduling.
std::vector<ScenarioReport> run_scenarios(const std::vector<Scenario>& list,
                                          const ScenarioOptions& opt = {});

std::string reports_to_json(std::span<const ScenarioReport> reports);
std::string reports_to_markdown(std::span<const ScenarioReport> reports);

} // namespace rdi
