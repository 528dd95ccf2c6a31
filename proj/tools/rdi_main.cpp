#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rdi/scenario.hpp"

namespace {

int run_command(const std::string& which, const rdi::ScenarioOptions& opt,
                const std::string& report_path, const std::string& format) {
    std::vector<rdi::Scenario> scenarios;
    try {
        if (which == "all") {
            for (const std::string& name : rdi::builtin_scenario_names())
                scenarios.push_back(rdi::builtin_scenario(name));
        } else {
            scenarios.push_back(rdi::builtin_scenario(which));
        }
    } catch (const rdi::ScenarioNotFound& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    std::vector<rdi::ScenarioReport> reports = rdi::run_scenarios(scenarios, opt);

    std::string rendered = format == "md" ? rdi::reports_to_markdown(reports)
                                          : rdi::reports_to_json(reports);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) {
            std::cerr << "error: cannot write report to " << report_path << "\n";
            return 2;
        }
        out << rendered;
    } else {
        std::cout << rendered;
    }

    int failures = 0;
    for (const rdi::ScenarioReport& r : reports) {
        int bad = 0;
        for (const rdi::CheckReport& c : r.checks)
            if (!c.pass) ++bad;
        std::cerr << r.scenario << ": "
                  << (r.checks.size() - static_cast<std::size_t>(bad)) << "/"
                  << r.checks.size() << " checks passed\n";
        failures += bad;
    }
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified numerical checks for fiber-integral geometry"};
    app.require_subcommand(1);

    CLI::App* list_cmd = app.add_subcommand("list", "List built-in scenarios");

    std::string target;
    rdi::ScenarioOptions opt;
    std::string report_path;
    std::string format = "json";
    CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario (or 'all')");
    run_cmd->add_option("scenario", target, "Scenario name or 'all'")->required();
    run_cmd->add_option("--quad-order", opt.quad_order,
                        "Override the quadrature order");
    run_cmd->add_option("--tol", opt.tol, "Override every check tolerance");
    run_cmd->add_option("--jobs", opt.jobs, "Scenarios to run in parallel");
    run_cmd->add_option("--report", report_path, "Write the report to a file");
    run_cmd->add_option("--format", format, "Report format: json or md")
        ->check(CLI::IsMember({"json", "md"}));

    std::string config_path;
    CLI::App* validate_cmd =
        app.add_subcommand("validate", "Parse and validate a scenario file");
    validate_cmd->add_option("config", config_path, "Path to a JSON scenario")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list_cmd->parsed()) {
        for (const std::string& name : rdi::builtin_scenario_names())
            std::cout << name << "\n";
        return 0;
    }
    if (run_cmd->parsed()) return run_command(target, opt, report_path, format);
    if (validate_cmd->parsed()) {
        try {
            rdi::Scenario s = rdi::load_scenario_file(config_path);
            std::cout << "ok: " << s.name << " (ambient " << s.ambient_dim
                      << ", base " << s.base_dim << ")\n";
            return 0;
        } catch (const rdi::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 3;
        }
    }
    return 2;
}
