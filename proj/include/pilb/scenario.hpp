#pragma once

// Turns a ScenarioConfig into jobs, a trace and an algorithm, runs it, and
// renders the result as CSV. Output is a pure function of the config.

#include <pilb/binhash.hpp>
#include <pilb/config.hpp>
#include <pilb/core.hpp>
#include <pilb/harness.hpp>
#include <pilb/preference.hpp>
#include <pilb/random.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace pilb {

/// Independent random streams carved out of the master seed.
enum class Stream : std::uint64_t { Sizes = 1, Trace = 2, Algorithm = 3 };

inline Seed stream_seed(Seed master, Stream stream) {
    return derive_seed(master, static_cast<std::uint64_t>(stream));
}

/// Failure to read an input file; the message names the path.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw InputError("error while reading '" + path + "'");
    return buffer.str();
}

/// Whitespace/comma separated non-negative numbers; `#` starts a comment.
inline std::vector<double> parse_sizes_text(std::string_view text, const std::string& origin) {
    std::vector<double> sizes;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        for (auto piece : detail::split_list(detail::trim(line))) {
            auto v = detail::parse_number<double>(piece);
            if (!v || !(*v >= 0.0) || !std::isfinite(*v)) {
                throw InputError(origin + ":" + std::to_string(line_no) + ": malformed size '" +
                                 std::string(piece) + "'");
            }
            sizes.push_back(*v);
        }
    }
    return sizes;
}

/// One state per nonblank line, machine ids separated by whitespace or commas.
inline ExecutionTrace parse_trace_text(std::string_view text, std::size_t m, const std::string& origin) {
    std::vector<MachineState> states;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::vector<MachineId> ids;
        for (auto piece : detail::split_list(line)) {
            auto id = detail::parse_number<MachineId>(piece);
            if (!id || *id >= m) {
                throw InputError(origin + ":" + std::to_string(line_no) + ": invalid machine id '" +
                                 std::string(piece) + "' for m = " + std::to_string(m));
            }
            ids.push_back(*id);
        }
        states.emplace_back(m, std::move(ids));
    }
    if (states.empty()) throw InputError(origin + ": trace file contains no states");
    return ExecutionTrace(std::move(states));
}

/// Job sizes in input order.
inline std::vector<double> make_sizes(const ScenarioConfig& cfg) {
    SplitMix64 rng(stream_seed(cfg.seed, Stream::Sizes));
    std::vector<double> sizes;
    std::visit(
        [&](const auto& src) {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, InlineSizes>) {
                sizes = src.sizes;
            } else if constexpr (std::is_same_v<T, SizesFile>) {
                sizes = parse_sizes_text(read_file(src.path), src.path);
                if (cfg.n != 0 && sizes.size() != cfg.n) {
                    throw InputError(src.path + ": holds " + std::to_string(sizes.size()) + " sizes but n = " +
                                     std::to_string(cfg.n));
                }
            } else if constexpr (std::is_same_v<T, IdenticalSizes>) {
                sizes.assign(cfg.n, src.size);
            } else if constexpr (std::is_same_v<T, UniformSizes>) {
                for (std::size_t j = 0; j < cfg.n; ++j) sizes.push_back(src.lo + (src.hi - src.lo) * rng.unit());
            } else {
                // Inverse CDF; 1 - u lies in (0, 1].
                for (std::size_t j = 0; j < cfg.n; ++j) {
                    sizes.push_back(src.scale * std::pow(1.0 - rng.unit(), -1.0 / src.shape));
                }
            }
        },
        cfg.sizes);
    return sizes;
}

inline ExecutionTrace make_trace(const ScenarioConfig& cfg) {
    switch (cfg.trace) {
        case TraceKind::Churn:
            return gen_random_churn(cfg.m, cfg.steps, cfg.up_probability, stream_seed(cfg.seed, Stream::Trace));
        case TraceKind::Flap:
            return gen_flap(cfg.m, cfg.steps, cfg.absent_machine);
        case TraceKind::Sweep:
            return gen_sweep(cfg.m);
        case TraceKind::File:
            return parse_trace_text(read_file(cfg.trace_file), cfg.m, cfg.trace_file);
    }
    throw std::logic_error("unhandled trace kind");
}

using AlgorithmFn = std::function<Assignment(const MachineState&)>;

inline AlgorithmFn make_algorithm(const ScenarioConfig& cfg, const JobSet& jobs) {
    const Seed seed = stream_seed(cfg.seed, Stream::Algorithm);
    if (cfg.algorithm == AlgorithmKind::Preference) {
        return PreferenceAlgorithm(jobs.size(), cfg.m, seed);
    }
    return BinHash(jobs, cfg.m, cfg.alpha, seed);
}

/// "%.6g"; the empty string for nullopt.
inline std::string format_real(std::optional<double> value) {
    if (!value) return {};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", *value);
    return buf;
}

inline constexpr const char* kCsvHeader =
    "step,state_size,reassignments,ref_cost,reassign_ratio,makespan,opt_lb,makespan_ratio";

/// One row per transition S_{i-1} -> S_i (step = i), then a TOTAL row:
/// TOTAL,,total moves,sum r*,total / sum r*,max makespan,max opt_lb,max makespan ratio.
inline std::string render_csv(const RunReport& report, const ExecutionTrace& trace) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    double worst_span = report.initial_makespan;
    double worst_lower = report.initial_opt_lower_bound;
    for (std::size_t i = 0; i < report.per_step.size(); ++i) {
        const auto& s = report.per_step[i];
        out << (i + 1) << ',' << trace[i + 1].size() << ',' << s.reassignments << ','
            << format_real(s.reference_cost) << ',' << format_real(s.reassign_ratio()) << ','
            << format_real(s.makespan) << ',' << format_real(s.opt_lower_bound) << ','
            << format_real(s.makespan_ratio()) << '\n';
        worst_span = std::max(worst_span, s.makespan);
        worst_lower = std::max(worst_lower, s.opt_lower_bound);
    }
    out << "TOTAL,," << report.total_reassignments << ',' << format_real(report.sum_reference_cost) << ','
        << format_real(report.cumulative_reassign_ratio()) << ',' << format_real(worst_span) << ','
        << format_real(worst_lower) << ',' << format_real(report.max_makespan_ratio) << '\n';
    return out.str();
}

struct ScenarioResult {
    RunReport report;
    std::string csv;
    /// Invariant breaches found during the run; empty on a clean run.
    std::vector<std::string> violations;
};

/// Runs the configured scenario. Input problems throw (InputError,
/// std::invalid_argument); invariant breaches are collected in `violations`.
inline ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    const JobSet jobs(make_sizes(cfg));
    const auto trace = make_trace(cfg);
    const auto algorithm = make_algorithm(cfg, jobs);

    ScenarioResult result;
    try {
        result.report = run_execution(algorithm, jobs, trace);
    } catch (const InvariantViolation& e) {
        result.violations.emplace_back(e.what());
        return result;
    }
    result.csv = render_csv(result.report, trace);

    if (cfg.algorithm == AlgorithmKind::BinHash && result.report.max_makespan_ratio &&
        !leq_tol(*result.report.max_makespan_ratio, cfg.alpha.makespan_coefficient())) {
        result.violations.push_back("makespan ratio " + format_real(result.report.max_makespan_ratio) +
                                    " exceeds 1 + 2/alpha = " + format_real(cfg.alpha.makespan_coefficient()));
    }
    for (const auto& step : result.report.per_step) {
        for (double v : {step.reference_cost, step.makespan, step.opt_lower_bound}) {
            if (!std::isfinite(v)) {
                result.violations.emplace_back("non-finite value in report");
                return result;
            }
        }
    }
    return result;
}

/// `job,size,machine` rows in input order for a single state.
inline std::string render_assignment(const JobSet& jobs, const Assignment& assignment) {
    std::vector<MachineId> by_input(jobs.size());
    for (JobIndex j = 0; j < jobs.size(); ++j) by_input[jobs.original_index(j)] = assignment[j];
    std::vector<double> sizes(jobs.size());
    for (JobIndex j = 0; j < jobs.size(); ++j) sizes[jobs.original_index(j)] = jobs[j];
    std::ostringstream out;
    out << "job,size,machine\n";
    for (JobIndex j = 0; j < jobs.size(); ++j) out << j << ',' << format_real(sizes[j]) << ',' << by_input[j] << '\n';
    return out.str();
}

inline MachineState config_state(const ScenarioConfig& cfg) {
    return cfg.state ? MachineState(cfg.m, *cfg.state) : MachineState::full(cfg.m);
}

}  // namespace pilb
