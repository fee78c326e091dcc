#include <pilb/core.hpp>
#include <pilb/harness.hpp>
#include <pilb/preference.hpp>
#include <pilb/verify.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace pilb;

TEST(BuildRandomPreferences, EmptyAndSingleMachine) {
    EXPECT_EQ(build_random_preferences(0, 5, 1).job_count(), 0u);
    const auto single = build_random_preferences(3, 1, 99);
    ASSERT_EQ(single.job_count(), 3u);
    for (JobIndex j = 0; j < 3; ++j) {
        ASSERT_EQ(single.row(j).size(), 1u);
        EXPECT_EQ(single.row(j)[0], 0u);
    }
    EXPECT_THROW(build_random_preferences(3, 0, 1), std::invalid_argument);
}

TEST(BuildRandomPreferences, RowsArePermutationsAndReproducible) {
    const auto a = build_random_preferences(50, 9, 1234);
    EXPECT_EQ(a, build_random_preferences(50, 9, 1234));
    EXPECT_NE(a, build_random_preferences(50, 9, 1235));
    // A row depends only on (seed, job index).
    const auto longer = build_random_preferences(80, 9, 1234);
    for (JobIndex j = 0; j < 50; ++j) {
        EXPECT_TRUE(std::equal(a.row(j).begin(), a.row(j).end(), longer.row(j).begin()));
    }
}

TEST(BuildRandomPreferences, FirstChoiceIsUniform) {
    const std::size_t n = 10000;
    const auto table = build_random_preferences(n, 4, 77);
    std::vector<int> first(4, 0);
    for (JobIndex j = 0; j < n; ++j) ++first[table.row(j)[0]];
    const double sd = std::sqrt(n * 0.25 * 0.75);
    for (int c : first) EXPECT_LE(std::abs(c - 2500.0), 3 * sd) << c;
}

TEST(PreferenceTable, RejectsNonPermutationRows) {
    EXPECT_THROW(PreferenceTable(3, {{0, 1, 1}}), std::invalid_argument);
    EXPECT_THROW(PreferenceTable(3, {{0, 1}}), std::invalid_argument);
    EXPECT_THROW(PreferenceTable(3, {{0, 1, 3}}), std::invalid_argument);
}

TEST(AssignByPreference, Examples) {
    const PreferenceTable table(4, {{2, 0, 1, 3}, {3, 1, 2, 0}});
    const auto a = assign_by_preference(table, MachineState(4, {0, 1}));
    EXPECT_EQ(a[0], 0u);
    const auto b = assign_by_preference(table, MachineState(4, {0, 2}));
    EXPECT_EQ(b[1], 2u);
    const auto random = build_random_preferences(30, 6, 5);
    for (MachineId target : assign_by_preference(random, MachineState(6, {4})).target) EXPECT_EQ(target, 4u);
}

TEST(AssignByPreference, RejectsMismatchedMachineCount) {
    const auto table = build_random_preferences(3, 4, 1);
    EXPECT_THROW(assign_by_preference(table, MachineState(5, {0})), std::invalid_argument);
}

TEST(AssignByPreference, PathIndependentUnderShuffledReplays) {
    const std::size_t m = 7;
    const PreferenceAlgorithm algorithm(40, m, 3);
    const auto trace = gen_random_churn(m, 200, 0.5, 17);
    std::vector<Assignment> first;
    for (const auto& s : trace.states()) first.push_back(algorithm(s));
    // Replay in a different order; each state must give the same answer.
    SplitMix64 rng(8);
    std::vector<std::size_t> order(trace.size());
    std::iota(order.begin(), order.end(), 0u);
    shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t i : order) EXPECT_EQ(algorithm(trace[i]), first[i]);
}

TEST(AssignByPreference, StableWhenChosenMachineSurvivesShrinking) {
    const std::size_t m = 6;
    const auto table = build_random_preferences(25, m, 21);
    for (std::uint64_t sm = 1; sm < (1u << m); ++sm) {
        const auto s = MachineState::from_mask(m, sm);
        const auto in_s = assign_by_preference(table, s);
        for (std::uint64_t tm = sm; tm > 0; tm = (tm - 1) & sm) {  // subsets of S
            const auto t = MachineState::from_mask(m, tm);
            const auto in_t = assign_by_preference(table, t);
            for (JobIndex j = 0; j < in_s.size(); ++j) {
                if (t.contains(in_s[j])) {
                    EXPECT_EQ(in_t[j], in_s[j]);
                }
            }
        }
    }
}

TEST(ExpectedReassignments, Examples) {
    EXPECT_NEAR(expected_reassignments(10, MachineState(3, {0, 1}), MachineState(3, {1, 2})), 20.0 / 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(expected_reassignments(10, MachineState(3, {0, 1}), MachineState(3, {0, 1})), 0.0);
    EXPECT_DOUBLE_EQ(expected_reassignments(6, MachineState(2, {0}), MachineState(2, {1})), 6.0);
}

TEST(ExpectedReassignments, MatchesExhaustivePermutationEnumeration) {
    for (unsigned m = 1; m <= 5; ++m) {
        for (std::uint64_t sm = 1; sm < (1u << m); ++sm) {
            for (std::uint64_t tm = 1; tm < (1u << m); ++tm) {
                const double exact = 10.0 * oracle::exact_move_probability(m, oracle::mask_set(sm), oracle::mask_set(tm));
                EXPECT_NEAR(expected_reassignments(10, MachineState::from_mask(m, sm), MachineState::from_mask(m, tm)),
                            exact, 1e-9);
            }
        }
    }
}

TEST(ExpectedReassignments, AtMostTwiceReferenceCost) {
    for (std::size_t m = 1; m <= 8; ++m) {
        for (std::uint64_t sm = 1; sm < (1u << m); ++sm) {
            for (std::uint64_t tm = 1; tm < (1u << m); ++tm) {
                const auto s = MachineState::from_mask(m, sm);
                const auto t = MachineState::from_mask(m, tm);
                EXPECT_TRUE(leq_tol(expected_reassignments(100, s, t), 2.0 * reference_cost(100, s, t)));
            }
        }
    }
}

TEST(ExpectedReassignments, MonteCarloAgreesForSmallMachineCounts) {
    // m <= 4 here; the acceptance suite covers m = 5.
    for (std::size_t m = 1; m <= 4; ++m) {
        const auto pairs = preference_expectation_sweep(200, m, 1000, 100 + m);
        for (const auto& p : pairs) {
            EXPECT_TRUE(p.report.satisfied) << "m=" << m << " S=" << p.s_mask << " T=" << p.t_mask
                                            << " mean=" << p.report.mean << " expected=" << p.report.bound
                                            << " se=" << p.report.std_error;
        }
    }
}
