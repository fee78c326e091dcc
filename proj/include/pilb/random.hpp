#pragma once

// Deterministic, platform-independent randomness.
//
// The standard <random> distributions are implementation-defined, so two
// standard libraries can produce different permutations from the same seed.
// Everything here is specified bit-for-bit: SplitMix64 as the generator,
// Lemire's multiply-shift with rejection for bounded integers, and a
// Fisher-Yates shuffle on top of that.

#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace pilb {

using Seed = std::uint64_t;

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stable sub-seed for stream `index` under master seed `seed`.
constexpr Seed derive_seed(Seed seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) + mix64(index + 0x9e3779b97f4a7c15ULL));
}

/// Counter-based generator: output k is mix64(key + (k+1)*gamma).
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(Seed seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform integer in [0, bound). bound must be nonzero.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept {
        // Lemire, "Fast random integer generation in an interval" (2019).
        unsigned __int128 product = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

    /// Uniform double in [0, 1) with 53 bits of resolution.
    constexpr double unit() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    constexpr bool bernoulli(double p) noexcept { return unit() < p; }

private:
    std::uint64_t state_;
};

/// Fisher-Yates shuffle driven by `rng`.
template <class T>
void shuffle(std::span<T> values, SplitMix64& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        using std::swap;
        swap(values[i - 1], values[j]);
    }
}

/// Uniformly random permutation of {0, ..., size-1}.
template <class Id = std::uint32_t>
std::vector<Id> random_permutation(std::size_t size, SplitMix64& rng) {
    std::vector<Id> perm(size);
    std::iota(perm.begin(), perm.end(), Id{0});
    shuffle(std::span<Id>(perm), rng);
    return perm;
}

}  // namespace pilb
