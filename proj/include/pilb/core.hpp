#pragma once

// Domain types and cost measures for path-independent load balancing.
//
// A system has m identical machines, of which a nonempty subset S is
// available. An algorithm maps S alone (never the history) to an assignment
// of every job to a machine in S. Quality is measured by the makespan in each
// state and by the number of jobs that move on each transition S -> T.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pilb {

using MachineId = std::uint32_t;
using JobIndex = std::size_t;

/// Relative tolerance for every floating-point bound check.
inline constexpr double kRelTol = 1e-9;

/// a <= b up to relative tolerance kRelTol.
inline bool leq_tol(double a, double b) noexcept {
    return a <= b + kRelTol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Thrown when an algorithm output breaks a structural invariant.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Job sizes in canonical non-increasing order.
///
/// Construction sorts stably (ties keep input order) and remembers where each
/// canonical job came from, so results can be mapped back to input order.
class JobSet {
public:
    JobSet() = default;

    explicit JobSet(std::vector<double> sizes) {
        for (double p : sizes) {
            if (!(p >= 0.0) || !std::isfinite(p)) {
                throw std::invalid_argument("job sizes must be finite and non-negative");
            }
        }
        original_.resize(sizes.size());
        std::iota(original_.begin(), original_.end(), JobIndex{0});
        std::stable_sort(original_.begin(), original_.end(),
                         [&](JobIndex a, JobIndex b) { return sizes[a] > sizes[b]; });
        sizes_.reserve(sizes.size());
        for (JobIndex j : original_) sizes_.push_back(sizes[j]);
    }

    std::size_t size() const noexcept { return sizes_.size(); }
    bool empty() const noexcept { return sizes_.empty(); }

    /// p_j for canonical index j; p_0 is the largest.
    double operator[](JobIndex j) const { return sizes_[j]; }
    std::span<const double> sizes() const noexcept { return sizes_; }

    /// Input position of canonical job j.
    JobIndex original_index(JobIndex j) const { return original_[j]; }
    std::span<const JobIndex> permutation() const noexcept { return original_; }

    double total() const noexcept { return std::accumulate(sizes_.begin(), sizes_.end(), 0.0); }

    static JobSet identical(std::size_t n, double size = 1.0) {
        return JobSet(std::vector<double>(n, size));
    }

private:
    std::vector<double> sizes_;
    std::vector<JobIndex> original_;
};

/// A nonempty set of available machines drawn from {0, ..., m-1}.
class MachineState {
public:
    MachineState(std::size_t m, std::vector<MachineId> members) : m_(m), present_(m, false) {
        if (members.empty()) throw std::invalid_argument("machine state must be nonempty");
        for (MachineId id : members) {
            if (id >= m) {
                throw std::invalid_argument("machine id " + std::to_string(id) +
                                            " out of range for m = " + std::to_string(m));
            }
            present_[id] = true;
        }
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        members_ = std::move(members);
    }

    /// All m machines available.
    static MachineState full(std::size_t m) {
        std::vector<MachineId> all(m);
        std::iota(all.begin(), all.end(), MachineId{0});
        return MachineState(m, std::move(all));
    }

    /// State whose members are the set bits of `mask` (m <= 64).
    static MachineState from_mask(std::size_t m, std::uint64_t mask) {
        std::vector<MachineId> ids;
        for (MachineId i = 0; i < m; ++i) {
            if (mask >> i & 1U) ids.push_back(i);
        }
        return MachineState(m, std::move(ids));
    }

    std::size_t machine_count() const noexcept { return m_; }
    std::size_t size() const noexcept { return members_.size(); }
    std::span<const MachineId> members() const noexcept { return members_; }
    bool contains(MachineId id) const noexcept { return id < m_ && present_[id]; }

    /// |S ∩ T|. Both states must share m.
    std::size_t intersection_size(const MachineState& other) const {
        require_same_universe(other);
        std::size_t count = 0;
        for (MachineId id : members_) count += other.contains(id) ? 1 : 0;
        return count;
    }

    std::size_t union_size(const MachineState& other) const {
        return size() + other.size() - intersection_size(other);
    }

    bool operator==(const MachineState& other) const noexcept {
        return m_ == other.m_ && members_ == other.members_;
    }

    void require_same_universe(const MachineState& other) const {
        if (m_ != other.m_) throw std::invalid_argument("machine states over different m");
    }

private:
    std::size_t m_;
    std::vector<MachineId> members_;
    std::vector<bool> present_;
};

/// Job (canonical index) -> machine.
struct Assignment {
    std::vector<MachineId> target;

    std::size_t size() const noexcept { return target.size(); }
    MachineId operator[](JobIndex j) const { return target[j]; }
    bool operator==(const Assignment&) const = default;
};

/// Throws InvariantViolation unless every target lies in `state`.
inline void require_valid(const Assignment& assignment, const MachineState& state) {
    for (JobIndex j = 0; j < assignment.size(); ++j) {
        if (!state.contains(assignment[j])) {
            throw InvariantViolation("job " + std::to_string(j) + " assigned to machine " +
                                     std::to_string(assignment[j]) +
                                     " which is not in the current state");
        }
    }
}

/// Per-machine load under `assignment`, indexed by machine id.
inline std::vector<double> machine_loads(const JobSet& jobs, const Assignment& assignment,
                                         const MachineState& state) {
    if (assignment.size() != jobs.size()) {
        throw std::invalid_argument("assignment size does not match job count");
    }
    require_valid(assignment, state);
    std::vector<double> load(state.machine_count(), 0.0);
    for (JobIndex j = 0; j < jobs.size(); ++j) load[assignment[j]] += jobs[j];
    return load;
}

/// C^max: the largest total size on any machine.
inline double makespan(const JobSet& jobs, const Assignment& assignment, const MachineState& state) {
    const auto load = machine_loads(jobs, assignment, state);
    return load.empty() ? 0.0 : *std::max_element(load.begin(), load.end());
}

/// Number of jobs whose machine differs between `a` and `b`.
inline std::size_t reassignment_cost(const Assignment& a, const Assignment& b) {
    if (a.size() != b.size()) throw std::invalid_argument("assignments cover different job counts");
    std::size_t moved = 0;
    for (JobIndex j = 0; j < a.size(); ++j) moved += a[j] != b[j] ? 1 : 0;
    return moved;
}

/// r*(S,T) = n (1 - |S ∩ T| / max(|S|, |T|)).
///
/// The reassignments forced on any algorithm that keeps exactly n/|S| jobs on
/// each machine, and the expected cost of any algorithm under a random
/// renaming of machines.
inline double reference_cost(std::size_t n, const MachineState& s, const MachineState& t) {
    const auto common = static_cast<double>(s.intersection_size(t));
    const auto larger = static_cast<double>(std::max(s.size(), t.size()));
    return static_cast<double>(n) * (1.0 - common / larger);
}

/// max(p_0, sum p_j / |S|), a certified lower bound on the optimal makespan.
inline double opt_lower_bound(const JobSet& jobs, const MachineState& state) {
    if (jobs.empty()) throw std::invalid_argument("opt_lower_bound needs at least one job");
    return std::max(jobs[0], jobs.total() / static_cast<double>(state.size()));
}

/// Measurements for one transition S -> T.
struct TransitionMetrics {
    std::size_t reassignments = 0;
    double reference_cost = 0.0;
    double makespan = 0.0;         // in T
    double opt_lower_bound = 0.0;  // in T; 0 when there are no jobs

    /// reassignments / r*, undefined when r* = 0.
    std::optional<double> reassign_ratio() const {
        if (reference_cost <= 0.0) return std::nullopt;
        return static_cast<double>(reassignments) / reference_cost;
    }

    std::optional<double> makespan_ratio() const {
        if (opt_lower_bound <= 0.0) return std::nullopt;
        return makespan / opt_lower_bound;
    }
};

struct CostSummary {
    std::size_t total = 0;
    double average = 0.0;
};

/// Total and mean reassignments over a sequence of transitions.
inline CostSummary aggregate_costs(std::span<const TransitionMetrics> per_step) {
    CostSummary out;
    for (const auto& step : per_step) out.total += step.reassignments;
    if (!per_step.empty()) {
        out.average = static_cast<double>(out.total) / static_cast<double>(per_step.size());
    }
    return out;
}

}  // namespace pilb
