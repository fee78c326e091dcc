#pragma once

// Test-only reference implementations. Each one follows the textbook
// definition as literally as possible and shares no code with the library
// route it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace oracle {

/// n (1 - |S ∩ T| / max(|S|, |T|)) from explicit sets.
inline double reference_cost(std::size_t n, const std::set<unsigned>& s, const std::set<unsigned>& t) {
    std::vector<unsigned> common;
    std::set_intersection(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(common));
    const double larger = static_cast<double>(std::max(s.size(), t.size()));
    return static_cast<double>(n) - static_cast<double>(n) * static_cast<double>(common.size()) / larger;
}

inline std::set<unsigned> mask_set(std::uint64_t mask) {
    std::set<unsigned> out;
    for (unsigned i = 0; i < 64; ++i) {
        if (mask >> i & 1U) out.insert(i);
    }
    return out;
}

/// Minimum makespan over every one of |S|^n assignments.
inline double brute_force_opt(const std::vector<double>& sizes, std::size_t machines) {
    const std::size_t n = sizes.size();
    std::vector<std::size_t> choice(n, 0);
    double best = std::numeric_limits<double>::infinity();
    if (n == 0) return 0.0;
    while (true) {
        std::vector<double> load(machines, 0.0);
        for (std::size_t j = 0; j < n; ++j) load[choice[j]] += sizes[j];
        best = std::min(best, *std::max_element(load.begin(), load.end()));
        std::size_t pos = 0;
        while (pos < n && ++choice[pos] == machines) choice[pos++] = 0;
        if (pos == n) break;
    }
    return best;
}

/// Binary expansion without leading zeros; "" for 0.
inline std::string binary(std::size_t x) {
    std::string out;
    for (; x > 0; x >>= 1) out.insert(out.begin(), static_cast<char>('0' + (x & 1)));
    return out;
}

inline bool is_suffix(const std::string& whole, const std::string& tail) {
    return tail.size() <= whole.size() && whole.compare(whole.size() - tail.size(), tail.size(), tail) == 0;
}

/// Bins by the literal recurrence: for i = b-1 down to 0,
/// A_i = { i + k 2^ceil(log2(i+1)) < n }, B_i = A_i minus the higher bins.
inline std::vector<std::vector<std::size_t>> binning_recurrence(std::size_t n, std::size_t b) {
    std::vector<std::vector<std::size_t>> bins(b);
    std::vector<bool> taken(n, false);
    for (std::size_t i = b; i-- > 0;) {
        const auto step = static_cast<std::size_t>(std::llround(std::pow(2.0, std::ceil(std::log2(double(i) + 1.0)))));
        std::vector<std::size_t> a;
        for (std::size_t j = i; j < n; j += step) a.push_back(j);
        for (std::size_t j : a) {
            if (!taken[j]) {
                bins[i].push_back(j);
                taken[j] = true;
            }
        }
        std::sort(bins[i].begin(), bins[i].end());
    }
    return bins;
}

/// Bins by string matching: the largest i < b whose binary expansion is a
/// suffix of j's (the empty expansion of 0 is a suffix of everything).
inline std::vector<std::vector<std::size_t>> binning_suffix_strings(std::size_t n, std::size_t b) {
    std::vector<std::vector<std::size_t>> bins(b);
    for (std::size_t j = 0; j < n; ++j) {
        const auto bj = binary(j);
        for (std::size_t i = b; i-- > 0;) {
            if (is_suffix(bj, binary(i))) {
                bins[i].push_back(j);
                break;
            }
        }
    }
    return bins;
}

/// All permutations of {0, ..., m-1}.
inline std::vector<std::vector<unsigned>> all_permutations(unsigned m) {
    std::vector<unsigned> p(m);
    std::iota(p.begin(), p.end(), 0U);
    std::vector<std::vector<unsigned>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

/// Exact expected moves of one job with a uniformly random preference order,
/// by enumerating every order: P[first choice in S differs from first choice in T].
inline double exact_move_probability(unsigned m, const std::set<unsigned>& s, const std::set<unsigned>& t) {
    const auto perms = all_permutations(m);
    std::size_t moved = 0;
    for (const auto& p : perms) {
        auto first_in = [&](const std::set<unsigned>& state) {
            for (unsigned id : p) {
                if (state.count(id)) return id;
            }
            return m;
        };
        moved += first_in(s) != first_in(t) ? 1 : 0;
    }
    return static_cast<double>(moved) / static_cast<double>(perms.size());
}

}  // namespace oracle
