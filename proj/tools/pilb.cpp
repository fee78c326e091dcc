// pilb: path-independent load balancing simulator.
//
//   pilb assign   [--config FILE] [--KEY VALUE ...]   assignment for one state
//   pilb simulate [--config FILE] [--KEY VALUE ...]   trace run -> CSV
//   pilb verify SUITE                                 run a verification suite
//
// Every config key is also a flag; flags override the file.
// Exit codes: 0 success, 1 usage or config error, 2 invariant violation.

#include <pilb/config.hpp>
#include <pilb/scenario.hpp>
#include <pilb/verify.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;

const char* const kConfigKeys[] = {"algorithm", "alpha",          "n",     "m",              "sizes",
                                   "sizes_file", "trace",         "trace_file", "steps",     "up_probability",
                                   "absent_machine", "state",     "seed",  "output"};

struct ScenarioFlags {
    std::string config_path;
    std::map<std::string, std::string> values;

    void attach(CLI::App& cmd) {
        cmd.add_option("-c,--config", config_path, "Scenario file with `key = value` lines")->check(CLI::ExistingFile);
        for (const char* key : kConfigKeys) {
            cmd.add_option(std::string("--") + key, values[key], std::string("Override config key '") + key + "'");
        }
    }

    pilb::ScenarioConfig load(const CLI::App& cmd) const {
        std::string text;
        if (!config_path.empty()) text = pilb::read_file(config_path);
        std::vector<std::pair<std::string, std::string>> overrides;
        for (const char* key : kConfigKeys) {
            if (cmd.count(std::string("--") + key) > 0) overrides.emplace_back(key, values.at(key));
        }
        return pilb::parse_config(text, overrides);
    }
};

int write_output(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return kExitOk;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        std::cerr << "pilb: cannot write '" << path << "'\n";
        return kExitUsage;
    }
    return kExitOk;
}

int run_assign(const pilb::ScenarioConfig& cfg) {
    const pilb::JobSet jobs(pilb::make_sizes(cfg));
    const auto state = pilb::config_state(cfg);
    const auto algorithm = pilb::make_algorithm(cfg, jobs);
    const auto assignment = algorithm(state);
    pilb::require_valid(assignment, state);
    const int rc = write_output(cfg.output, pilb::render_assignment(jobs, assignment));
    if (!jobs.empty()) {
        const double span = pilb::makespan(jobs, assignment, state);
        const double lower = pilb::opt_lower_bound(jobs, state);
        std::cerr << "makespan " << pilb::format_real(span) << ", lower bound " << pilb::format_real(lower)
                  << ", ratio " << pilb::format_real(lower > 0 ? std::optional<double>(span / lower) : std::nullopt)
                  << '\n';
        if (cfg.algorithm == pilb::AlgorithmKind::BinHash && lower > 0 &&
            !pilb::leq_tol(span / lower, cfg.alpha.makespan_coefficient())) {
            std::cerr << "pilb: invariant violation: makespan ratio exceeds 1 + 2/alpha\n";
            return kExitViolation;
        }
    }
    return rc;
}

int run_simulate(const pilb::ScenarioConfig& cfg) {
    const auto result = pilb::run_scenario(cfg);
    if (!result.violations.empty()) {
        for (const auto& v : result.violations) std::cerr << "pilb: invariant violation: " << v << '\n';
        if (!result.csv.empty()) write_output(cfg.output, result.csv);
        return kExitViolation;
    }
    const auto& r = result.report;
    std::cerr << "transitions " << r.per_step.size() << ", total reassignments " << r.total_reassignments
              << ", average " << pilb::format_real(r.average_reassignments) << ", sum r* "
              << pilb::format_real(r.sum_reference_cost) << '\n';
    return write_output(cfg.output, result.csv);
}

int run_verify(const std::string& name) {
    const auto& suites = pilb::verification_suites();
    const auto it = suites.find(name);
    if (it == suites.end()) {
        std::cerr << "pilb: unknown suite '" << name << "'; available:";
        for (const auto& [key, fn] : suites) std::cerr << ' ' << key;
        std::cerr << '\n';
        return kExitUsage;
    }
    const auto report = it->second();
    std::cout << "== " << report.name << '\n';
    for (const auto& line : report.lines) std::cout << line << '\n';
    std::cout << (report.passed ? "suite passed" : "suite FAILED") << '\n';
    return report.passed ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Path-independent load balancing simulator"};
    app.require_subcommand(1);

    ScenarioFlags assign_flags;
    auto* assign = app.add_subcommand("assign", "Print the assignment for one machine state");
    assign_flags.attach(*assign);

    ScenarioFlags simulate_flags;
    auto* simulate = app.add_subcommand("simulate", "Run an algorithm over a trace and write CSV");
    simulate_flags.attach(*simulate);

    std::string suite;
    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    std::string suite_help = "One of:";
    for (const auto& [key, fn] : pilb::verification_suites()) suite_help += " " + key;
    verify->add_option("suite", suite, suite_help)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*assign) return run_assign(assign_flags.load(*assign));
        if (*simulate) return run_simulate(simulate_flags.load(*simulate));
        if (*verify) return run_verify(suite);
    } catch (const pilb::ConfigError& e) {
        std::cerr << "pilb: config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const pilb::InputError& e) {
        std::cerr << "pilb: " << e.what() << '\n';
        return kExitUsage;
    } catch (const pilb::InvariantViolation& e) {
        std::cerr << "pilb: invariant violation: " << e.what() << '\n';
        return kExitViolation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "pilb: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
