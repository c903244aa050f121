#pragma once

#include <cstdint>

namespace perco {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

/// Counter-mode generator: the value at `counter` is a pure function of
/// (key, counter), so any element of a stream can be produced in O(1) and
/// independently of evaluation order.
constexpr std::uint64_t counter_hash(std::uint64_t key, std::uint64_t counter) {
    return mix64(mix64(key + 0x9e3779b97f4a7c15ULL) ^ (counter * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Bernoulli(p) status of item `counter` in the stream `key`.
constexpr bool bernoulli_at(std::uint64_t key, std::uint64_t counter, double p) {
    return to_unit(counter_hash(key, counter)) < p;
}

/// Seed of replica `index` in the stream rooted at `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return counter_hash(master ^ 0x5851f42d4c957f2dULL, index);
}

/// Seed for a named sub-stream (stream tags keep estimators from sharing
/// samples unintentionally).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
    return derive_seed(derive_seed(master, tag), index);
}

}  // namespace perco
