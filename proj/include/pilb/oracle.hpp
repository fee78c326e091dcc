#pragma once

// Independent verifiers: exhaustive optimum for tiny instances and Monte
// Carlo estimators for every expectation or high-probability claim.
//
// Every Monte Carlo estimate carries a standard error; comparisons against a
// bound are made "within k standard errors" so that noise is quantified
// rather than hidden behind a hand-tuned slack.

#include <pilb/binhash.hpp>
#include <pilb/core.hpp>
#include <pilb/random.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pilb {

inline constexpr std::size_t kExactOptMaxJobs = 12;
inline constexpr std::size_t kExactOptMaxMachines = 6;

/// Running mean and variance (Welford).
class RunningStats {
public:
    void add(double x) noexcept {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }

    std::size_t count() const noexcept { return count_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept {
        return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
    }
    double std_error() const noexcept {
        return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
    }

private:
    std::size_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// How a sample mean is judged against `bound`.
enum class Relation {
    Within,   // |mean - bound| <= sigmas * se
    AtMost,   // mean - sigmas * se <= bound
    AtLeast,  // mean + sigmas * se >= bound
};

struct MonteCarloReport {
    std::size_t trials = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double bound = 0.0;
    bool satisfied = false;
};

inline constexpr double kDefaultSigmas = 3.0;

inline bool judge(double mean, double std_error, double bound, Relation relation,
                  double sigmas = kDefaultSigmas) {
    const double slack = sigmas * std_error;
    switch (relation) {
        case Relation::Within:
            return leq_tol(mean, bound + slack) && leq_tol(bound - slack, mean);
        case Relation::AtMost:
            return leq_tol(mean - slack, bound);
        case Relation::AtLeast:
            return leq_tol(bound, mean + slack);
    }
    return false;
}

inline MonteCarloReport make_report(const RunningStats& stats, double bound, Relation relation,
                                    double sigmas = kDefaultSigmas) {
    MonteCarloReport r;
    r.trials = stats.count();
    r.mean = stats.mean();
    r.std_error = stats.std_error();
    r.bound = bound;
    r.satisfied = judge(r.mean, r.std_error, bound, relation, sigmas);
    return r;
}

/// Minimum makespan of `jobs` on the machines of `state`, by branch and bound.
///
/// Jobs are placed largest first; a job never opens a second empty machine
/// (machines are identical), and any branch whose partial makespan reaches
/// the incumbent is cut. Search stops as soon as the incumbent meets
/// opt_lower_bound.
inline double exact_opt(const JobSet& jobs, const MachineState& state) {
    if (jobs.size() > kExactOptMaxJobs || state.size() > kExactOptMaxMachines) {
        throw std::invalid_argument("exact_opt is limited to n <= 12 jobs and |S| <= 6 machines");
    }
    if (jobs.empty()) return 0.0;

    const double lower = opt_lower_bound(jobs, state);
    const std::size_t machines = state.size();
    std::vector<double> load(machines, 0.0);

    // Incumbent: longest-processing-time greedy.
    double best = 0.0;
    for (JobIndex j = 0; j < jobs.size(); ++j) {
        auto lightest = std::min_element(load.begin(), load.end());
        *lightest += jobs[j];
        best = std::max(best, *lightest);
    }
    std::fill(load.begin(), load.end(), 0.0);

    std::function<void(JobIndex, double)> search = [&](JobIndex j, double current) {
        if (best <= lower) return;
        if (j == jobs.size()) {
            best = std::min(best, current);
            return;
        }
        bool tried_empty = false;
        for (std::size_t i = 0; i < machines; ++i) {
            if (load[i] == 0.0) {
                if (tried_empty) continue;
                tried_empty = true;
            }
            const double next = load[i] + jobs[j];
            if (next >= best) continue;
            load[i] = next;
            search(j + 1, std::max(current, next));
            load[i] -= jobs[j];
        }
    };
    search(0, 0.0);
    return best;
}

/// Mean moves S -> T over independently seeded instances of an algorithm.
///
/// `family(seed)` must return a fresh algorithm (a callable MachineState ->
/// Assignment) for that seed; trial t uses derive_seed(seed, t).
template <class Family>
MonteCarloReport mc_expected_reassignments(Family&& family, const MachineState& s, const MachineState& t,
                                           std::size_t trials, Seed seed, double bound,
                                           Relation relation = Relation::Within) {
    if (trials == 0) throw std::invalid_argument("mc_expected_reassignments needs trials >= 1");
    RunningStats stats;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const auto algorithm = family(derive_seed(seed, trial));
        stats.add(static_cast<double>(reassignment_cost(algorithm(s), algorithm(t))));
    }
    return make_report(stats, bound, relation);
}

/// Image of `state` under the machine renaming `rho` (machine i becomes rho[i]).
inline MachineState rename(const MachineState& state, std::span<const MachineId> rho) {
    std::vector<MachineId> ids;
    ids.reserve(state.size());
    for (MachineId id : state.members()) ids.push_back(rho[id]);
    return MachineState(state.machine_count(), std::move(ids));
}

/// Runs `algorithm` behind a uniformly random machine renaming and checks
/// that the mean number of moves S -> T is at least r*(S, T).
///
/// Per trial: draw rho, assign on rho(S) and rho(T), map machine names back
/// through rho^-1, count moves.
template <class Algorithm>
MonteCarloReport renaming_lower_bound_check(Algorithm&& algorithm, std::size_t n, const MachineState& s,
                                            const MachineState& t, std::size_t trials, Seed seed) {
    if (trials == 0) throw std::invalid_argument("renaming_lower_bound_check needs trials >= 1");
    s.require_same_universe(t);
    const std::size_t m = s.machine_count();
    RunningStats stats;
    std::vector<MachineId> inverse(m);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        SplitMix64 rng(derive_seed(seed, trial));
        const auto rho = random_permutation<MachineId>(m, rng);
        for (MachineId i = 0; i < m; ++i) inverse[rho[i]] = i;

        Assignment in_s = algorithm(rename(s, rho));
        Assignment in_t = algorithm(rename(t, rho));
        if (in_s.size() != n || in_t.size() != n) {
            throw std::invalid_argument("algorithm returned an assignment of the wrong size");
        }
        for (auto& target : in_s.target) target = inverse[target];
        for (auto& target : in_t.target) target = inverse[target];
        require_valid(in_s, s);
        require_valid(in_t, t);
        stats.add(static_cast<double>(reassignment_cost(in_s, in_t)));
    }
    return make_report(stats, reference_cost(n, s, t), Relation::AtLeast);
}

/// Max bin weight when weighted balls fall uniformly into b bins.
struct MaxLoadReport : MonteCarloReport {
    double weight_scale = 0.0;       // W = max(max weight, total / b)
    double fraction_within = 0.0;    // share of trials with X <= bound
    double max_observed = 0.0;
    double required_fraction = 0.0;
};

/// Samples X = max bin weight and reports how often X <= k W ln b / ln ln b.
inline MaxLoadReport weighted_balls_max_load(std::span<const double> weights, std::size_t b,
                                             std::size_t trials, double k, Seed seed,
                                             double required_fraction = 0.99) {
    // ln ln b <= 0 for b <= e, which makes the threshold meaningless.
    if (b < 3) throw std::invalid_argument("weighted_balls_max_load needs b >= 3 bins");
    if (trials == 0) throw std::invalid_argument("weighted_balls_max_load needs trials >= 1");
    double total = 0.0;
    double heaviest = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("ball weights must be non-negative");
        total += w;
        heaviest = std::max(heaviest, w);
    }
    const double scale = std::max(heaviest, total / static_cast<double>(b));
    const double log_b = std::log(static_cast<double>(b));
    const double threshold = k * scale * log_b / std::log(log_b);

    RunningStats stats;
    std::size_t within = 0;
    double max_observed = 0.0;
    std::vector<double> bins(b);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        SplitMix64 rng(derive_seed(seed, trial));
        std::fill(bins.begin(), bins.end(), 0.0);
        for (double w : weights) bins[rng.below(b)] += w;
        const double x = *std::max_element(bins.begin(), bins.end());
        stats.add(x);
        within += leq_tol(x, threshold) ? 1 : 0;
        max_observed = std::max(max_observed, x);
    }

    MaxLoadReport r;
    static_cast<MonteCarloReport&>(r) = make_report(stats, threshold, Relation::AtMost);
    r.weight_scale = scale;
    r.fraction_within = static_cast<double>(within) / static_cast<double>(trials);
    r.max_observed = max_observed;
    r.required_fraction = required_fraction;
    r.satisfied = r.fraction_within >= required_fraction;
    return r;
}

/// Number of bins whose machine differs between two BinHash placements.
/// A bin that exists only in the larger state counts as displaced.
inline std::size_t displaced_bins(std::span<const MachineId> before, std::span<const MachineId> after) {
    const std::size_t shared = std::min(before.size(), after.size());
    std::size_t moved = std::max(before.size(), after.size()) - shared;
    for (std::size_t i = 0; i < shared; ++i) moved += before[i] != after[i] ? 1 : 0;
    return moved;
}

/// Mean BinHash moves and bin displacements for S -> T over probe-table seeds.
struct RemovalReport {
    MonteCarloReport reassignments;  // bound: removal_coefficient * n / |S|
    MonteCarloReport displacements;  // bound: 1/(1 - alpha) + 1
};

inline RemovalReport mc_binhash_removal(const JobSet& jobs, const MachineState& s, const MachineState& t,
                                        AlphaParam alpha, std::size_t trials, Seed seed) {
    if (trials == 0) throw std::invalid_argument("mc_binhash_removal needs trials >= 1");
    s.require_same_universe(t);
    RunningStats moves;
    RunningStats chains;
    const std::size_t bs = bin_count(s.size(), alpha);
    const std::size_t bt = bin_count(t.size(), alpha);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const auto probes = ProbeTable::random(s.machine_count(), alpha, derive_seed(seed, trial));
        moves.add(static_cast<double>(
            reassignment_cost(binhash_assign(jobs, s, alpha, probes), binhash_assign(jobs, t, alpha, probes))));
        chains.add(static_cast<double>(displaced_bins(hash_bins(bs, s, probes), hash_bins(bt, t, probes))));
    }
    const double n = static_cast<double>(jobs.size());
    const double size = static_cast<double>(std::max(s.size(), t.size()));
    return {make_report(moves, alpha.removal_coefficient() * n / size, Relation::AtMost),
            make_report(chains, alpha.displacement_bound(), Relation::AtMost)};
}

}  // namespace pilb
