#pragma once

// Named verification suites. Each compares an observed quantity with the
// bound it is claimed to satisfy and reports one line per check.

#include <pilb/binhash.hpp>
#include <pilb/core.hpp>
#include <pilb/harness.hpp>
#include <pilb/oracle.hpp>
#include <pilb/preference.hpp>
#include <pilb/random.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace pilb {

struct SuiteReport {
    std::string name;
    std::vector<std::string> lines;
    bool passed = true;

    void check(bool ok, const std::string& line) {
        lines.push_back(std::string(ok ? "PASS  " : "FAIL  ") + line);
        passed = passed && ok;
    }
    void note(const std::string& line) { lines.push_back("      " + line); }
};

template <class... Args>
std::string strf(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

inline std::string mask_string(std::size_t m, std::uint64_t mask) {
    std::string out = "{";
    for (std::size_t i = 0; i < m; ++i) {
        if (mask >> i & 1U) {
            if (out.size() > 1) out += ',';
            out += std::to_string(i);
        }
    }
    return out + "}";
}

// ---------------------------------------------------------------------------
// Random preferences: mean moves vs. n (1 - |S∩T| / |S∪T|)

struct PairReport {
    std::uint64_t s_mask = 0;
    std::uint64_t t_mask = 0;
    MonteCarloReport report;
};

/// Every ordered pair of nonempty states over m machines, one preference
/// table per seed shared by all pairs.
inline std::vector<PairReport> preference_expectation_sweep(std::size_t n, std::size_t m, std::size_t seeds,
                                                            Seed seed) {
    if (m == 0 || m > 16) throw std::invalid_argument("preference_expectation_sweep needs 1 <= m <= 16");
    const std::size_t states = (std::size_t{1} << m) - 1;
    std::vector<MachineState> all;
    for (std::uint64_t mask = 1; mask <= states; ++mask) all.push_back(MachineState::from_mask(m, mask));

    std::vector<RunningStats> stats(states * states);
    std::vector<Assignment> assigned(states);
    for (std::size_t trial = 0; trial < seeds; ++trial) {
        const auto table = build_random_preferences(n, m, derive_seed(seed, trial));
        for (std::size_t i = 0; i < states; ++i) assigned[i] = assign_by_preference(table, all[i]);
        for (std::size_t i = 0; i < states; ++i) {
            for (std::size_t k = 0; k < states; ++k) {
                stats[i * states + k].add(static_cast<double>(reassignment_cost(assigned[i], assigned[k])));
            }
        }
    }

    std::vector<PairReport> out;
    out.reserve(states * states);
    for (std::size_t i = 0; i < states; ++i) {
        for (std::size_t k = 0; k < states; ++k) {
            const double expected = expected_reassignments(n, all[i], all[k]);
            out.push_back({i + 1, k + 1, make_report(stats[i * states + k], expected, Relation::Within)});
        }
    }
    return out;
}

inline SuiteReport verify_theorem4(std::size_t n = 200, std::size_t m = 4, std::size_t seeds = 1000, Seed seed = 0) {
    SuiteReport suite{"theorem4", {}, true};
    suite.note(strf("random preferences, n=%zu, m=%zu, %zu seeds, all ordered state pairs", n, m, seeds));
    const auto pairs = preference_expectation_sweep(n, m, seeds, seed);
    std::size_t outside = 0;
    double worst_z = 0.0;
    for (const auto& p : pairs) {
        if (!p.report.satisfied) {
            ++outside;
            suite.note(strf("outside 3 se: S=%s T=%s mean=%.4f expected=%.4f se=%.4f",
                            mask_string(m, p.s_mask).c_str(), mask_string(m, p.t_mask).c_str(), p.report.mean,
                            p.report.bound, p.report.std_error));
        }
        if (p.report.std_error > 0) {
            worst_z = std::max(worst_z, std::abs(p.report.mean - p.report.bound) / p.report.std_error);
        }
    }
    suite.check(outside == 0, strf("%zu/%zu pairs within 3 standard errors of the closed form (max |z| = %.2f)",
                                   pairs.size() - outside, pairs.size(), worst_z));
    return suite;
}

// ---------------------------------------------------------------------------
// BinHash deterministic makespan and bin cardinality

struct Lemma2Params {
    std::vector<double> alphas{0.3, 0.5, AlphaParam::kDefault, 0.8};
    std::size_t max_m = 10;
    std::size_t job_sets = 50;
    std::size_t max_n = 100;
    Seed seed = 0;
};

/// Random job sizes mixing light-tailed, heavy-tailed and identical workloads.
inline std::vector<double> random_job_sizes(std::size_t n, SplitMix64& rng) {
    std::vector<double> sizes(n);
    switch (rng.below(3)) {
        case 0:
            for (auto& p : sizes) p = 1.0 + 99.0 * rng.unit();
            break;
        case 1:
            for (auto& p : sizes) p = std::pow(1.0 - rng.unit(), -1.0 / 1.2);
            break;
        default:
            for (auto& p : sizes) p = 1.0;
            break;
    }
    return sizes;
}

inline SuiteReport verify_lemma2(const Lemma2Params& params = {}) {
    SuiteReport suite{"lemma2", {}, true};
    for (double a : params.alphas) {
        const AlphaParam alpha(a);
        std::size_t checked = 0;
        std::size_t span_violations = 0;
        std::size_t size_violations = 0;
        std::size_t size_violations_few_jobs = 0;  // n < b: some bin holds a job but the limit is below 1
        std::string first_size_violation;
        double worst_ratio = 0.0;
        double worst_size_ratio = 0.0;
        for (std::size_t m = 1; m <= params.max_m; ++m) {
            SplitMix64 rng(derive_seed(params.seed, m * 1000 + static_cast<std::uint64_t>(a * 1e6)));
            for (std::size_t set = 0; set < params.job_sets; ++set) {
                const std::size_t n = 1 + rng.below(params.max_n);
                const JobSet jobs(random_job_sizes(n, rng));
                const auto probes = ProbeTable::random(m, alpha, rng());
                for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
                    const auto state = MachineState::from_mask(m, mask);
                    const double ratio =
                        makespan(jobs, binhash_assign(jobs, state, alpha, probes), state) / opt_lower_bound(jobs, state);
                    worst_ratio = std::max(worst_ratio, ratio);
                    span_violations += leq_tol(ratio, alpha.makespan_coefficient()) ? 0 : 1;

                    const auto layout = binning(n, bin_count(state.size(), alpha));
                    const double limit = 4.0 * static_cast<double>(n) / (a * static_cast<double>(state.size()));
                    const double size_ratio = static_cast<double>(layout.max_bin_size()) / limit;
                    worst_size_ratio = std::max(worst_size_ratio, size_ratio);
                    if (!leq_tol(size_ratio, 1.0)) {
                        ++size_violations;
                        size_violations_few_jobs += n < layout.b ? 1 : 0;
                        if (first_size_violation.empty()) {
                            first_size_violation = strf("n=%zu, |S|=%zu, b=%zu: max |bin| %zu > %.4f", n,
                                                        state.size(), layout.b, layout.max_bin_size(), limit);
                        }
                    }
                    ++checked;
                }
            }
        }
        suite.check(span_violations == 0,
                    strf("alpha=%.6g: makespan/LB <= %.6g on %zu (state, job set) cases; worst %.4f, %zu violations",
                         a, alpha.makespan_coefficient(), checked, worst_ratio, span_violations));
        suite.check(size_violations == 0,
                    strf("alpha=%.6g: max |bin| <= 4n/(alpha|S|); worst fraction of limit %.4f, %zu violations", a,
                         worst_size_ratio, size_violations));
        if (size_violations > 0) {
            suite.note(strf("%zu of %zu violations have fewer jobs than bins; first: %s", size_violations_few_jobs,
                            size_violations, first_size_violation.c_str()));
        }
    }
    return suite;
}

// ---------------------------------------------------------------------------
// BinHash single-machine removal

struct Lemma3Params {
    double alpha = AlphaParam::kDefault;
    std::size_t m = 24;
    std::size_t state_size = 20;
    std::size_t n = 200;
    std::size_t seeds = 1000;
    Seed seed = 0;
};

inline SuiteReport verify_lemma3(const Lemma3Params& params = {}) {
    SuiteReport suite{"lemma3", {}, true};
    const AlphaParam alpha(params.alpha);
    SplitMix64 rng(derive_seed(params.seed, 0x1e3a3));
    auto order = random_permutation<MachineId>(params.m, rng);
    order.resize(params.state_size);
    const MachineState s(params.m, order);
    const JobSet jobs(random_job_sizes(params.n, rng));

    suite.note(strf("alpha=%.6g, |S|=%zu of m=%zu, n=%zu, %zu probe seeds per removal", params.alpha,
                    params.state_size, params.m, params.n, params.seeds));
    double worst_moves = 0.0;
    double worst_chain = 0.0;
    bool moves_ok = true;
    bool chain_ok = true;
    double move_bound = 0.0;
    double chain_bound = alpha.displacement_bound();
    for (MachineId removed : s.members()) {
        std::vector<MachineId> rest;
        for (MachineId id : s.members()) {
            if (id != removed) rest.push_back(id);
        }
        const MachineState t(params.m, rest);
        const auto r = mc_binhash_removal(jobs, s, t, alpha, params.seeds, derive_seed(params.seed, removed));
        move_bound = r.reassignments.bound;
        worst_moves = std::max(worst_moves, r.reassignments.mean);
        worst_chain = std::max(worst_chain, r.displacements.mean);
        moves_ok = moves_ok && r.reassignments.satisfied;
        chain_ok = chain_ok && r.displacements.satisfied;
        if (!r.reassignments.satisfied || !r.displacements.satisfied) {
            suite.note(strf("removal of %u: moves %.3f (se %.3f), chain %.3f (se %.3f)", removed, r.reassignments.mean,
                            r.reassignments.std_error, r.displacements.mean, r.displacements.std_error));
        }
    }
    suite.check(moves_ok, strf("mean moves per removal <= 4(2-a)n/(a(1-a)|S|) = %.4f; worst mean %.4f", move_bound,
                               worst_moves));
    suite.check(chain_ok, strf("mean displaced bins <= 1/(1-a)+1 = %.4f within 3 se; worst mean %.4f", chain_bound,
                               worst_chain));
    return suite;
}

// ---------------------------------------------------------------------------
// Renaming lower bound holds for every algorithm

struct Theorem3Params {
    std::size_t m = 6;
    std::size_t n = 100;
    std::size_t pairs = 10;
    std::size_t trials = 2000;
    Seed seed = 0;
};

/// Puts every job on the lowest-numbered available machine.
inline Assignment lowest_machine(std::size_t n, const MachineState& state) {
    return Assignment{std::vector<MachineId>(n, state.members().front())};
}

inline SuiteReport verify_theorem3(const Theorem3Params& params = {}) {
    SuiteReport suite{"theorem3", {}, true};
    SplitMix64 rng(derive_seed(params.seed, 0x7e3));
    const std::size_t m = params.m;
    const JobSet jobs(random_job_sizes(params.n, rng));
    const PreferenceAlgorithm preference(params.n, m, rng());
    const BinHash binhash(jobs, m, AlphaParam{}, rng());
    const auto strawman = [n = params.n](const MachineState& s) { return lowest_machine(n, s); };

    const std::map<std::string, std::function<Assignment(const MachineState&)>> algorithms{
        {"binhash", binhash}, {"lowest-id", strawman}, {"preference", preference}};

    const std::uint64_t states = (std::uint64_t{1} << m) - 1;
    for (std::size_t p = 0; p < params.pairs; ++p) {
        const auto s_mask = 1 + rng.below(states);
        const auto t_mask = 1 + rng.below(states);
        const auto s = MachineState::from_mask(m, s_mask);
        const auto t = MachineState::from_mask(m, t_mask);
        for (const auto& [name, algorithm] : algorithms) {
            const auto r = renaming_lower_bound_check(algorithm, params.n, s, t, params.trials,
                                                      derive_seed(params.seed, p * 16 + name.size()));
            suite.check(r.satisfied, strf("%-10s S=%s T=%s mean %.3f (se %.3f) >= r* %.3f - 3 se", name.c_str(),
                                          mask_string(m, s_mask).c_str(), mask_string(m, t_mask).c_str(), r.mean,
                                          r.std_error, r.bound));
        }
    }
    return suite;
}

// ---------------------------------------------------------------------------
// Weighted balls in bins / random-preference makespan

struct Lemma1Params {
    std::size_t m = 1024;
    std::size_t trials = 1000;
    double k = 4.0;
    double required_fraction = 0.99;
    Seed seed = 0;
};

inline SuiteReport verify_lemma1(const Lemma1Params& params = {}) {
    SuiteReport suite{"lemma1", {}, true};
    const std::vector<double> unit(params.m, 1.0);
    const auto balls = weighted_balls_max_load(unit, params.m, params.trials, params.k, params.seed,
                                               params.required_fraction);
    suite.check(balls.satisfied, strf("balls: %zu unit balls into %zu bins: X <= %.4f in %.1f%% of %zu trials "
                                      "(mean X %.3f, max %.0f; k=%.3g is a harness threshold)",
                                      params.m, params.m, balls.bound, 100.0 * balls.fraction_within, balls.trials,
                                      balls.mean, balls.max_observed, params.k));

    // Same threshold for the random-preference algorithm with n = m unit jobs, all machines up.
    const auto full = MachineState::full(params.m);
    const JobSet jobs = JobSet::identical(params.m);
    std::size_t within = 0;
    RunningStats spans;
    for (std::size_t trial = 0; trial < params.trials; ++trial) {
        const auto table = build_random_preferences(params.m, params.m, derive_seed(params.seed ^ 0x9f, trial));
        const double span = makespan(jobs, assign_by_preference(table, full), full);
        spans.add(span);
        within += leq_tol(span, balls.bound) ? 1 : 0;
    }
    const double fraction = static_cast<double>(within) / static_cast<double>(params.trials);
    suite.check(fraction >= params.required_fraction,
                strf("random preference: makespan <= %.4f in %.1f%% of %zu trials (mean %.3f)", balls.bound,
                     100.0 * fraction, params.trials, spans.mean()));
    return suite;
}

// ---------------------------------------------------------------------------
// Binning: going from b to b+1 bins splits exactly one bin

/// True when binning(n, b) equals binning(n, b + 1) except that bin
/// b - 2^floor(log2 b) of the former is the union of that bin and bin b of the latter.
inline bool merge_property_holds(std::size_t n, std::size_t b) {
    const auto fewer = binning(n, b);
    const auto more = binning(n, b + 1);
    const std::size_t merged = b - std::bit_floor(b);
    for (std::size_t i = 0; i < b; ++i) {
        if (i == merged) continue;
        if (fewer.bins[i] != more.bins[i]) return false;
    }
    std::vector<JobIndex> joined = more.bins[merged];
    joined.insert(joined.end(), more.bins[b].begin(), more.bins[b].end());
    std::sort(joined.begin(), joined.end());
    return joined == fewer.bins[merged];
}

inline SuiteReport verify_merge(std::size_t max_n = 64, std::size_t max_b = 31) {
    SuiteReport suite{"merge", {}, true};
    std::size_t failures = 0;
    std::size_t checked = 0;
    for (std::size_t n = 0; n <= max_n; ++n) {
        for (std::size_t b = 1; b <= max_b; ++b) {
            ++checked;
            if (!merge_property_holds(n, b)) {
                ++failures;
                suite.note(strf("n=%zu b=%zu: layouts differ outside the merged bin", n, b));
            }
        }
    }
    suite.check(failures == 0, strf("%zu (n, b) pairs with n <= %zu, b <= %zu; %zu failures", checked, max_n, max_b,
                                    failures));
    return suite;
}

// ---------------------------------------------------------------------------

using SuiteFn = std::function<SuiteReport()>;

inline const std::map<std::string, SuiteFn>& verification_suites() {
    static const std::map<std::string, SuiteFn> suites{
        {"lemma1", [] { return verify_lemma1(); }},   {"lemma2", [] { return verify_lemma2(); }},
        {"lemma3", [] { return verify_lemma3(); }},   {"merge", [] { return verify_merge(); }},
        {"theorem3", [] { return verify_theorem3(); }}, {"theorem4", [] { return verify_theorem4(); }},
    };
    return suites;
}

}  // namespace pilb
