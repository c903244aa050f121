#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "perco/bond_config.hpp"
#include "perco/coupling.hpp"
#include "perco/cycles.hpp"
#include "perco/lattice.hpp"

namespace perco::oracle {

using Rational = boost::multiprecision::cpp_rational;

class GuardExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

inline constexpr std::size_t kMaxCycleEdges = 40;
inline constexpr std::size_t kMaxConfigEdges = 24;

/// Every closed edge-self-avoiding walk of the open graph, once each, in
/// canonical form: the lexicographically smallest vertex sequence among all
/// rotations and both directions (so it starts at its smallest vertex).
/// Sorted by (length, vertices).
std::vector<CycleWitness> enumerate_all_cycles(const Torus& torus, std::span<const EdgeId> open_edges,
                                               std::size_t max_length = std::numeric_limits<std::size_t>::max(),
                                               std::size_t max_edges = kMaxCycleEdges);

/// Long cycles only.
std::vector<CycleWitness> enumerate_long_cycles(const Torus& torus, std::span<const EdgeId> open_edges,
                                                std::size_t max_edges = kMaxCycleEdges);

bool contains_long_cycle(const Torus& torus, std::span<const EdgeId> open_edges);
bool vertex_in_long_cycle(const Torus& torus, std::span<const EdgeId> open_edges, VertexId x);
/// Shortest long cycle through x, 0 if none.
std::size_t shortest_long_cycle_through(const Torus& torus, std::span<const EdgeId> open_edges, VertexId x);

/// Smallest number of edges whose removal leaves no long cycle, by subsets of
/// increasing size.
std::int64_t exact_Y_bruteforce(const Torus& torus, std::span<const EdgeId> open_edges,
                                std::size_t max_edges = kMaxCycleEdges);

/// Vertices z joined to root by an open path edge-disjoint from some long
/// cycle through z.
std::vector<VertexId> interior_set_bruteforce(const Torus& torus, std::span<const EdgeId> open_edges, VertexId root);

struct ExhaustiveResult {
    Rational probability;
    /// hits[k] = number of configurations with k open edges where the event holds.
    std::vector<std::uint64_t> hits;
};

using Event = std::function<bool(const BondConfig&)>;

/// Exact probability of an event under product Bernoulli(p), summing over all
/// 2^E configurations.
ExhaustiveResult exhaustive_config_check(const Torus& torus, const Rational& p, const Event& event,
                                         std::size_t max_edges = kMaxConfigEdges);

double to_double(const Rational& q);

struct Agreement {
    std::size_t queries = 0;
    std::size_t unknown = 0;
    std::size_t disagreements = 0;
    std::vector<std::string> details;  // one line per disagreement

    double unknown_rate() const { return queries ? static_cast<double>(unknown) / static_cast<double>(queries) : 0.0; }
    void merge(const Agreement& other);
};

/// Runs cluster_contains_long_cycle and compute_Y on every non-tree cluster
/// and vertex_in_long_cycle on every vertex, comparing each definite verdict
/// with brute-force enumeration.
Agreement compare_with_oracle(const Torus& torus, std::span<const EdgeId> open_edges,
                              std::uint64_t budget = kDefaultBudget);

struct PropertyBWitness {
    int k;
    VertexId y, z, v1, v2;  // frame vertices
};

struct PropertyBReport {
    std::size_t discrepancies = 0;  // (y, k) with 0 <->_k y in the lattice but not x in the torus
    std::vector<PropertyBWitness> witnesses;
    std::vector<std::pair<int, VertexId>> unwitnessed;

    bool holds() const { return unwitnessed.empty(); }
};

inline constexpr std::size_t kMaxBallEdges = 256;

/// For every discrepancy up to kmax, searches the lattice ball B_k(0) for z,
/// distinct r-equivalent v1, v2 and four edge-disjoint open paths of length
/// at most k: 0 to z, z to v1, z to v2, v1 to y. Throws GuardExceeded when a
/// ball has more than kMaxBallEdges open edges or the search gets too long,
/// and std::invalid_argument on truncated samples.
PropertyBReport verify_coupling_property_b(const CouplingSample& sample, int kmax,
                                           std::uint64_t max_work = 50'000'000);

}  // namespace perco::oracle
