#pragma once

// Executions (sequences of machine states) and scoring of an algorithm over them.

#include <pilb/core.hpp>
#include <pilb/random.hpp>

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pilb {

/// S_0, ..., S_t over a shared machine count. Never empty.
class ExecutionTrace {
public:
    explicit ExecutionTrace(std::vector<MachineState> states) : states_(std::move(states)) {
        if (states_.empty()) throw std::invalid_argument("execution trace needs at least one state");
        for (const auto& s : states_) states_.front().require_same_universe(s);
    }

    std::size_t size() const noexcept { return states_.size(); }
    std::size_t machine_count() const noexcept { return states_.front().machine_count(); }
    const MachineState& operator[](std::size_t i) const { return states_[i]; }
    std::span<const MachineState> states() const noexcept { return states_; }

private:
    std::vector<MachineState> states_;
};

/// Each machine is up independently with probability `up_probability`;
/// all-down draws are redrawn.
inline ExecutionTrace gen_random_churn(std::size_t m, std::size_t steps, double up_probability, Seed seed) {
    if (m == 0) throw std::invalid_argument("gen_random_churn: m must be >= 1");
    if (steps == 0) throw std::invalid_argument("gen_random_churn: steps must be >= 1");
    if (!(up_probability > 0.0 && up_probability <= 1.0)) {
        throw std::invalid_argument("gen_random_churn: up_probability must lie in (0,1]");
    }
    SplitMix64 rng(derive_seed(seed, 0));
    std::vector<MachineState> states;
    states.reserve(steps);
    std::vector<MachineId> up;
    for (std::size_t step = 0; step < steps; ++step) {
        do {
            up.clear();
            for (MachineId i = 0; i < m; ++i) {
                if (rng.bernoulli(up_probability)) up.push_back(i);
            }
        } while (up.empty());
        states.emplace_back(m, up);
    }
    return ExecutionTrace(std::move(states));
}

/// Alternates the full set (even steps) with the full set minus `absent_machine` (odd steps).
inline ExecutionTrace gen_flap(std::size_t m, std::size_t steps, MachineId absent_machine) {
    if (m < 2) throw std::invalid_argument("gen_flap: m must be >= 2");
    if (steps == 0) throw std::invalid_argument("gen_flap: steps must be >= 1");
    if (absent_machine >= m) throw std::invalid_argument("gen_flap: absent machine out of range");
    const auto full = MachineState::full(m);
    std::vector<MachineId> rest;
    for (MachineId i = 0; i < m; ++i) {
        if (i != absent_machine) rest.push_back(i);
    }
    const MachineState reduced(m, rest);
    std::vector<MachineState> states;
    states.reserve(steps);
    for (std::size_t step = 0; step < steps; ++step) states.push_back(step % 2 == 0 ? full : reduced);
    return ExecutionTrace(std::move(states));
}

/// Full set, then drop the highest id one at a time down to {0}, then add them back.
/// Length 2m - 1.
inline ExecutionTrace gen_sweep(std::size_t m) {
    if (m == 0) throw std::invalid_argument("gen_sweep: m must be >= 1");
    auto prefix = [m](std::size_t size) {
        std::vector<MachineId> ids(size);
        std::iota(ids.begin(), ids.end(), MachineId{0});
        return MachineState(m, std::move(ids));
    };
    std::vector<MachineState> states;
    states.reserve(2 * m - 1);
    for (std::size_t size = m; size >= 1; --size) states.push_back(prefix(size));
    for (std::size_t size = 2; size <= m; ++size) states.push_back(prefix(size));
    return ExecutionTrace(std::move(states));
}

struct RunReport {
    std::vector<TransitionMetrics> per_step;
    std::size_t total_reassignments = 0;
    double average_reassignments = 0.0;
    double sum_reference_cost = 0.0;
    double initial_makespan = 0.0;
    double initial_opt_lower_bound = 0.0;
    /// Worst makespan / opt_lower_bound over every state including S_0;
    /// empty when no state has a positive lower bound.
    std::optional<double> max_makespan_ratio;

    /// total / sum r*, empty when sum r* is 0.
    std::optional<double> cumulative_reassign_ratio() const {
        if (sum_reference_cost <= 0.0) return std::nullopt;
        return static_cast<double>(total_reassignments) / sum_reference_cost;
    }

    /// Worst per-transition reassignments / r* over transitions with r* > 0.
    std::optional<double> max_reassign_ratio() const {
        std::optional<double> worst;
        for (const auto& step : per_step) {
            if (auto r = step.reassign_ratio()) worst = std::max(worst.value_or(0.0), *r);
        }
        return worst;
    }
};

/// Jobs that must move on S -> T: those A_S places on machines absent from T.
inline std::size_t forced_moves(const Assignment& in_s, const MachineState& t) {
    std::size_t forced = 0;
    for (MachineId target : in_s.target) forced += t.contains(target) ? 0 : 1;
    return forced;
}

/// Scores `algorithm` over `trace`. Throws InvariantViolation if an assignment
/// leaves its state or has the wrong size.
template <class Algorithm>
RunReport run_execution(Algorithm&& algorithm, const JobSet& jobs, const ExecutionTrace& trace) {
    const std::size_t n = jobs.size();
    auto assign = [&](const MachineState& state) {
        Assignment a = algorithm(state);
        if (a.size() != n) {
            throw InvariantViolation("algorithm produced " + std::to_string(a.size()) +
                                     " targets for " + std::to_string(n) + " jobs");
        }
        require_valid(a, state);
        return a;
    };

    RunReport report;
    auto track_ratio = [&](double span, double lower) {
        if (lower > 0.0) report.max_makespan_ratio = std::max(report.max_makespan_ratio.value_or(0.0), span / lower);
    };

    Assignment previous = assign(trace[0]);
    report.initial_makespan = makespan(jobs, previous, trace[0]);
    report.initial_opt_lower_bound = n > 0 ? opt_lower_bound(jobs, trace[0]) : 0.0;
    track_ratio(report.initial_makespan, report.initial_opt_lower_bound);

    report.per_step.reserve(trace.size() - 1);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        Assignment current = assign(trace[i]);
        TransitionMetrics step;
        step.reassignments = reassignment_cost(previous, current);
        if (step.reassignments < forced_moves(previous, trace[i])) {
            throw InvariantViolation("transition " + std::to_string(i) +
                                     " moved fewer jobs than left vanished machines");
        }
        step.reference_cost = reference_cost(n, trace[i - 1], trace[i]);
        step.makespan = makespan(jobs, current, trace[i]);
        step.opt_lower_bound = n > 0 ? opt_lower_bound(jobs, trace[i]) : 0.0;
        track_ratio(step.makespan, step.opt_lower_bound);
        report.sum_reference_cost += step.reference_cost;
        report.per_step.push_back(step);
        previous = std::move(current);
    }

    const auto costs = aggregate_costs(report.per_step);
    report.total_reassignments = costs.total;
    report.average_reassignments = costs.average;
    return report;
}

}  // namespace pilb
