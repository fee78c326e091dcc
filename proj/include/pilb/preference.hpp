#pragma once

// Preference-based assignment: every job carries a fixed ranking of all
// machines and sits on the highest-ranked machine that is currently up.
// The assignment is a function of the available set alone, so path
// independence holds by construction.

#include <pilb/core.hpp>
#include <pilb/random.hpp>

#include <stdexcept>
#include <vector>

namespace pilb {

/// One machine ranking per job; row j lists machine ids from most to least preferred.
class PreferenceTable {
public:
    PreferenceTable(std::size_t m, std::vector<std::vector<MachineId>> rows, Seed seed = 0)
        : m_(m), rows_(std::move(rows)), seed_(seed) {
        if (m == 0) throw std::invalid_argument("preference table needs m >= 1");
        for (const auto& row : rows_) {
            std::vector<bool> seen(m, false);
            if (row.size() != m) throw std::invalid_argument("preference row is not a permutation of m machines");
            for (MachineId id : row) {
                if (id >= m || seen[id]) throw std::invalid_argument("preference row is not a permutation of m machines");
                seen[id] = true;
            }
        }
    }

    std::size_t job_count() const noexcept { return rows_.size(); }
    std::size_t machine_count() const noexcept { return m_; }
    Seed seed() const noexcept { return seed_; }
    std::span<const MachineId> row(JobIndex j) const { return rows_[j]; }

    bool operator==(const PreferenceTable&) const = default;

private:
    std::size_t m_;
    std::vector<std::vector<MachineId>> rows_;
    Seed seed_;
};

/// n independent uniform permutations of m machines; row j is drawn from its
/// own stream derive_seed(seed, j), so rows do not depend on n.
inline PreferenceTable build_random_preferences(std::size_t n, std::size_t m, Seed seed) {
    if (m == 0) throw std::invalid_argument("build_random_preferences: m must be >= 1");
    std::vector<std::vector<MachineId>> rows;
    rows.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        SplitMix64 rng(derive_seed(seed, j));
        rows.push_back(random_permutation<MachineId>(m, rng));
    }
    return PreferenceTable(m, std::move(rows), seed);
}

inline Assignment assign_by_preference(const PreferenceTable& table, const MachineState& state) {
    if (state.machine_count() != table.machine_count()) {
        throw std::invalid_argument("state and preference table disagree on m");
    }
    Assignment out;
    out.target.reserve(table.job_count());
    for (JobIndex j = 0; j < table.job_count(); ++j) {
        for (MachineId id : table.row(j)) {
            if (state.contains(id)) {
                out.target.push_back(id);
                break;
            }
        }
    }
    return out;
}

/// Expected moves S -> T when each job's ranking is uniformly random:
/// n (1 - |S ∩ T| / |S ∪ T|). A job stays exactly when its favourite machine
/// in S ∪ T lies in S ∩ T.
inline double expected_reassignments(std::size_t n, const MachineState& s, const MachineState& t) {
    const auto common = static_cast<double>(s.intersection_size(t));
    const auto all = static_cast<double>(s.union_size(t));
    return static_cast<double>(n) * (1.0 - common / all);
}

/// Random-preference algorithm as a state -> assignment callable.
class PreferenceAlgorithm {
public:
    explicit PreferenceAlgorithm(PreferenceTable table) : table_(std::move(table)) {}
    PreferenceAlgorithm(std::size_t n, std::size_t m, Seed seed)
        : table_(build_random_preferences(n, m, seed)) {}

    Assignment operator()(const MachineState& state) const { return assign_by_preference(table_, state); }
    const PreferenceTable& table() const noexcept { return table_; }

private:
    PreferenceTable table_;
};

}  // namespace pilb
