#pragma once

// BinHash: deterministic constant-factor makespan with constant-factor
// expected reassignment cost.
//
// Stage 1 (binning) splits the size-sorted jobs into b = max(floor(alpha|S|), 1)
// bins: job j goes to the largest bin index i < b whose binary expansion is a
// suffix of j's. Stage 2 (hashing) places bins 0, 1, ..., b-1 in order, each
// on the first machine of its own fixed probe permutation that is available
// and not yet taken by a lower bin (open addressing with uniform hashing).

#include <pilb/core.hpp>
#include <pilb/random.hpp>

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace pilb {

/// Load factor in the open interval (0, 1).
class AlphaParam {
public:
    /// 2 - sqrt(2): minimizes the reassignment coefficient.
    static constexpr double kDefault = 0.58578643762690495119;

    constexpr AlphaParam() = default;
    explicit AlphaParam(double alpha) : value_(alpha) {
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw std::invalid_argument("alpha must lie in the open interval (0,1), got " +
                                        std::to_string(alpha));
        }
    }

    constexpr double value() const noexcept { return value_; }

    /// Deterministic makespan factor 1 + 2/alpha.
    constexpr double makespan_coefficient() const noexcept { return 1.0 + 2.0 / value_; }

    /// Expected moves per single-machine removal, divided by n/|S|:
    /// 4(2 - alpha) / (alpha (1 - alpha)).
    constexpr double removal_coefficient() const noexcept {
        return 4.0 * (2.0 - value_) / (value_ * (1.0 - value_));
    }

    /// Expected moves for any transition, divided by r*: 2(1 + removal_coefficient).
    constexpr double reassignment_coefficient() const noexcept {
        return 2.0 * (1.0 + removal_coefficient());
    }

    /// Bound on the mean number of bins that change machine after one removal.
    constexpr double displacement_bound() const noexcept { return 1.0 / (1.0 - value_) + 1.0; }

private:
    double value_ = kDefault;
};

inline std::size_t bin_count(std::size_t state_size, AlphaParam alpha) {
    if (state_size == 0) throw std::invalid_argument("bin_count: state size must be >= 1");
    const auto scaled = static_cast<std::size_t>(std::floor(alpha.value() * static_cast<double>(state_size)));
    return std::max<std::size_t>(scaled, 1);
}

/// Bin of job j among b bins: the largest i < b with j mod 2^{bit_width(i)} == i.
/// bit_width(i) equals ceil(log2(i + 1)), and is 0 for i = 0, so bin 0 matches every job.
inline std::size_t bin_of(JobIndex j, std::size_t b) {
    if (b == 0) throw std::invalid_argument("bin_of: b must be >= 1");
    // A suffix of length L > 0 names bin (j mod 2^L) only if bit L-1 of j is set.
    for (int len = static_cast<int>(std::bit_width(b - 1)); len > 0; --len) {
        const std::size_t candidate = j & ((std::size_t{1} << len) - 1);
        if ((candidate >> (len - 1)) == 1 && candidate < b) return candidate;
    }
    return 0;
}

struct BinLayout {
    std::size_t b = 0;
    std::vector<std::vector<JobIndex>> bins;  // ascending job indices
    std::vector<std::size_t> bin_of_job;

    std::size_t max_bin_size() const {
        std::size_t largest = 0;
        for (const auto& bin : bins) largest = std::max(largest, bin.size());
        return largest;
    }

    bool operator==(const BinLayout&) const = default;
};

inline BinLayout binning(std::size_t n, std::size_t b) {
    if (b == 0) throw std::invalid_argument("binning: b must be >= 1");
    BinLayout layout;
    layout.b = b;
    layout.bins.resize(b);
    layout.bin_of_job.resize(n);
    for (JobIndex j = 0; j < n; ++j) {
        const std::size_t i = bin_of(j, b);
        layout.bin_of_job[j] = i;
        layout.bins[i].push_back(j);
    }
    return layout;
}

/// One probe permutation of all m machines per bin index 0 ... floor(alpha m).
class ProbeTable {
public:
    ProbeTable(std::size_t m, std::vector<std::vector<MachineId>> rows, Seed seed = 0)
        : m_(m), rows_(std::move(rows)), seed_(seed) {
        for (const auto& row : rows_) {
            if (row.size() != m) throw std::invalid_argument("probe row is not a permutation of m machines");
            std::vector<bool> seen(m, false);
            for (MachineId id : row) {
                if (id >= m || seen[id]) throw std::invalid_argument("probe row is not a permutation of m machines");
                seen[id] = true;
            }
        }
    }

    static ProbeTable random(std::size_t m, AlphaParam alpha, Seed seed) {
        if (m == 0) throw std::invalid_argument("probe table needs m >= 1");
        const auto rows = static_cast<std::size_t>(std::floor(alpha.value() * static_cast<double>(m))) + 1;
        std::vector<std::vector<MachineId>> probes;
        probes.reserve(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            SplitMix64 rng(derive_seed(seed, i));
            probes.push_back(random_permutation<MachineId>(m, rng));
        }
        return ProbeTable(m, std::move(probes), seed);
    }

    std::size_t machine_count() const noexcept { return m_; }
    std::size_t row_count() const noexcept { return rows_.size(); }
    Seed seed() const noexcept { return seed_; }
    std::span<const MachineId> row(std::size_t bin) const { return rows_[bin]; }

private:
    std::size_t m_;
    std::vector<std::vector<MachineId>> rows_;
    Seed seed_;
};

/// Machine for each bin, placing bins in index order by open addressing.
inline std::vector<MachineId> hash_bins(std::size_t b, const MachineState& state, const ProbeTable& probes) {
    if (b > state.size()) {
        throw std::invalid_argument("hash_bins: " + std::to_string(b) + " bins cannot fit on " +
                                    std::to_string(state.size()) + " machines");
    }
    if (b > probes.row_count()) throw std::invalid_argument("hash_bins: probe table has too few rows");
    if (probes.machine_count() != state.machine_count()) {
        throw std::invalid_argument("hash_bins: probe table and state disagree on m");
    }
    std::vector<bool> taken(state.machine_count(), false);
    std::vector<MachineId> placement;
    placement.reserve(b);
    for (std::size_t bin = 0; bin < b; ++bin) {
        for (MachineId id : probes.row(bin)) {
            if (state.contains(id) && !taken[id]) {
                taken[id] = true;
                placement.push_back(id);
                break;
            }
        }
    }
    return placement;
}

inline std::vector<MachineId> hash_bins(const BinLayout& layout, const MachineState& state,
                                        const ProbeTable& probes) {
    return hash_bins(layout.b, state, probes);
}

inline Assignment binhash_assign(const JobSet& jobs, const MachineState& state, AlphaParam alpha,
                                 const ProbeTable& probes) {
    const std::size_t b = bin_count(state.size(), alpha);
    const auto placement = hash_bins(b, state, probes);
    Assignment out;
    out.target.resize(jobs.size());
    for (JobIndex j = 0; j < jobs.size(); ++j) out.target[j] = placement[bin_of(j, b)];
    return out;
}

/// BinHash bound to a job set, load factor and probe table.
class BinHash {
public:
    BinHash(JobSet jobs, std::size_t m, AlphaParam alpha, Seed seed)
        : jobs_(std::move(jobs)), alpha_(alpha), probes_(ProbeTable::random(m, alpha, seed)) {}
    BinHash(JobSet jobs, AlphaParam alpha, ProbeTable probes)
        : jobs_(std::move(jobs)), alpha_(alpha), probes_(std::move(probes)) {}

    Assignment operator()(const MachineState& state) const {
        return binhash_assign(jobs_, state, alpha_, probes_);
    }

    const JobSet& jobs() const noexcept { return jobs_; }
    AlphaParam alpha() const noexcept { return alpha_; }
    const ProbeTable& probes() const noexcept { return probes_; }

private:
    JobSet jobs_;
    AlphaParam alpha_;
    ProbeTable probes_;
};

}  // namespace pilb
