#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "perco/bond_config.hpp"
#include "perco/lattice.hpp"

namespace perco {

/// Joint sample of torus percolation and lattice percolation on the window
/// [-K r, K r]^d, coupled through the unwrapping exploration of C_T(0).
///
/// Lattice edge ids are ids of `frame`, a box one step range larger than the
/// window, so that an exploration step leaving the window can be named.
class CouplingSample {
public:
    CouplingSample(BondConfig omega, int window_factor, LazyBonds filler);

    const Torus& torus() const { return omega_.torus(); }
    const BondConfig& omega() const { return omega_; }
    const Box& frame() const { return frame_; }
    int window_factor() const { return window_factor_; }
    int window_radius() const { return window_radius_; }
    LazyBonds filler() const { return filler_; }

    bool in_window(VertexId frame_vertex) const { return frame_.center_distance(frame_vertex) <= window_radius_; }
    bool edge_in_window(EdgeId e) const;
    /// Torus edge whose r-equivalence class contains the lattice edge.
    EdgeId torus_class(EdgeId e) const;
    VertexId torus_vertex(VertexId frame_vertex) const;

    /// Lattice status: the copied torus status on explored edges, the
    /// independent filler elsewhere.
    bool lattice_open(EdgeId e) const;
    bool is_explored(EdgeId e) const { return explored_.count(e) != 0; }
    bool is_ghost(EdgeId e) const;

    /// Explored lattice edges in exploration order.
    const std::vector<EdgeId>& order() const { return order_; }
    std::vector<EdgeId> occupied() const;  // sorted
    std::vector<EdgeId> vacant() const;    // sorted
    /// Window edges in a touched class other than its explored member.
    std::vector<EdgeId> ghosts() const;    // sorted
    /// Torus edges read by the exploration, with the explored lattice member.
    const std::unordered_map<EdgeId, EdgeId>& consumed() const { return consumed_; }
    /// O_T: torus edges whose class was explored open (sorted).
    std::vector<EdgeId> torus_occupied() const;

    bool truncated() const { return truncated_; }
    std::uint64_t steps() const { return steps_; }

    /// Graph distance from the origin through explored open edges.
    const std::unordered_map<VertexId, int>& explored_distance() const { return dist_; }

    void explore(std::uint64_t step_budget);

private:
    BondConfig omega_;
    int window_factor_;
    int window_radius_;
    Box frame_;
    LazyBonds filler_;
    std::unordered_map<EdgeId, char> explored_;
    std::unordered_map<EdgeId, EdgeId> consumed_;
    std::unordered_map<VertexId, int> dist_;
    std::vector<EdgeId> order_;
    bool truncated_ = false;
    std::uint64_t steps_ = 0;
};

/// The window graph: frame vertices at sup-distance <= K r from the origin.
struct WindowView {
    const CouplingSample& sample;

    template <class F>
    void for_each_incident(VertexId v, F&& f) const {
        sample.frame().for_each_incident(v, [&](const Incidence& inc) {
            if (sample.in_window(inc.neighbor)) f(inc);
        });
    }
};

inline constexpr std::uint64_t kDefaultStepBudget = 10'000'000;

/// Samples omega ~ P_T,p from `seed`, explores, and fills the rest of the
/// window from an independent stream. Throws std::invalid_argument when
/// K < 2 or p is outside [0, 1].
CouplingSample coupled_sample(const Torus& torus, double p, std::uint64_t seed, int window_factor = 4,
                              std::uint64_t step_budget = kDefaultStepBudget);
/// Couples a given torus configuration (an instrumented one keeps its read log).
CouplingSample coupled_sample(BondConfig omega, std::uint64_t filler_seed, int window_factor = 4,
                              std::uint64_t step_budget = kDefaultStepBudget);

struct InclusionViolation {
    int k;
    VertexId torus_vertex;
    int torus_distance;
    int lattice_distance;  // -1 when no equivalent vertex is reached within max k
};

struct InclusionReport {
    bool applicable = false;  // false on truncated samples
    std::vector<int> ks;
    std::vector<std::size_t> violations_per_k;
    std::vector<InclusionViolation> violations;

    bool holds() const { return applicable && violations.empty(); }
};

/// Checks that every x with torus intrinsic distance <= k from 0 has an
/// r-equivalent y in the window at lattice intrinsic distance <= k.
InclusionReport check_inclusion_property(const CouplingSample& sample, const std::vector<int>& ks);

std::string coupling_json(const CouplingSample& sample);

}  // namespace perco
