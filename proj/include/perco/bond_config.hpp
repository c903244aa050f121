#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "perco/lattice.hpp"
#include "perco/rng.hpp"

namespace perco {

/// One bond percolation sample on a torus: a packed bit per EdgeId.
///
/// Reads through is_open() are recorded when instrumentation is enabled;
/// the read log is the only mutable state and is meant for single-threaded
/// audit runs.
class BondConfig {
public:
    BondConfig(Torus torus, std::vector<std::uint64_t> words, double p, std::uint64_t seed);

    /// Every edge open independently with probability p; edge e is open iff
    /// the counter-mode uniform at (seed, e) is below p.
    static BondConfig sample(const Torus& torus, double p, std::uint64_t seed);
    /// Fixture constructor: exactly the listed edges are open.
    static BondConfig from_open_edges(const Torus& torus, std::span<const EdgeId> open);

    const Torus& torus() const { return torus_; }
    double p() const { return p_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t edge_count() const { return torus_.edge_count(); }

    bool is_open(EdgeId e) const {
        if (instrumented_) ++reads_[e];
        return peek(e);
    }
    /// Status without touching the read log. Only for analysis that runs
    /// after an audited algorithm finished.
    bool peek(EdgeId e) const { return (words_[e >> 6] >> (e & 63)) & 1u; }

    std::uint64_t open_count() const;
    std::vector<EdgeId> open_edges() const;
    const std::vector<std::uint64_t>& words() const { return words_; }

    void set_open(EdgeId e, bool open);

    void instrument(bool on = true);
    bool instrumented() const { return instrumented_; }
    void clear_read_log();
    std::uint32_t read_count(EdgeId e) const { return instrumented_ ? reads_[e] : 0; }

private:
    Torus torus_;
    std::vector<std::uint64_t> words_;
    double p_;
    std::uint64_t seed_;
    bool instrumented_ = false;
    mutable std::vector<std::uint32_t> reads_;
};

/// Edge statuses of an unbounded index space, evaluated on demand from the
/// same counter-mode stream as BondConfig::sample. Used for lattice boxes too
/// large to store.
struct LazyBonds {
    std::uint64_t seed = 0;
    double p = 0.0;

    bool is_open(EdgeId e) const { return bernoulli_at(seed, e, p); }
};

void check_probability(double p);

}  // namespace perco
