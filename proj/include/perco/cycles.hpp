#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "perco/bond_config.hpp"
#include "perco/cluster.hpp"
#include "perco/lattice.hpp"

namespace perco {

class MalformedCycle : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Radius a cycle must reach to be long: floor(r/4).
inline int long_radius(const Torus& torus) { return torus.side() / 4; }

/// A closed edge-self-avoiding walk. vertices.front() == vertices.back() and
/// edges[i] joins vertices[i] and vertices[i+1].
struct CycleWitness {
    std::vector<VertexId> vertices;
    std::vector<EdgeId> edges;
    std::vector<std::int64_t> winding;
    bool long_cycle = false;

    std::size_t length() const { return edges.size(); }
};

/// Builds a witness from a closed vertex sequence, deriving edges, winding
/// and the long flag. Throws MalformedCycle on non-adjacent steps, repeated
/// edges or an open walk.
CycleWitness make_witness(const Torus& torus, std::vector<VertexId> closed_walk);
CycleWitness reversed(const Torus& torus, const CycleWitness& c);
/// Rotation that starts at vertices[k].
CycleWitness rotated(const Torus& torus, const CycleWitness& c, std::size_t k);

/// Throws MalformedCycle unless the witness is structurally valid and
/// (when cfg is given) uses only open edges.
void validate_witness(const Torus& torus, const CycleWitness& c, const BondConfig* cfg = nullptr);

/// Every vertex of the set has another one at torus sup-distance >= floor(r/4).
bool is_long_vertex_set(const Torus& torus, std::span<const VertexId> vertices);
bool is_long_cycle(const Torus& torus, const CycleWitness& c);
/// Net lattice displacement of the closed walk divided by r.
std::vector<std::int64_t> winding_vector(const Torus& torus, const CycleWitness& c);

/// Work accounting in search-tree node expansions.
class WorkBudget {
public:
    explicit WorkBudget(std::uint64_t limit) : limit_(limit) {}

    bool spend(std::uint64_t n = 1) {
        used_ += n;
        return used_ <= limit_;
    }
    bool exhausted() const { return used_ > limit_; }
    std::uint64_t used() const { return used_; }
    std::uint64_t limit() const { return limit_; }

private:
    std::uint64_t limit_;
    std::uint64_t used_ = 0;
};

inline constexpr std::uint64_t kDefaultBudget = 1'000'000;

enum class Verdict { yes, no, unknown };
const char* to_string(Verdict v);

/// Tri-state answer of a budgeted existence query. `no` is only produced by
/// an exhausted search or a sound pruning rule; `unknown` only when the work
/// counter passed the budget.
template <class T>
struct BudgetedAnswer {
    Verdict verdict = Verdict::unknown;
    T value{};
    std::uint64_t work = 0;
    std::uint64_t budget = 0;

    bool yes() const { return verdict == Verdict::yes; }
    bool no() const { return verdict == Verdict::no; }
    bool unknown() const { return verdict == Verdict::unknown; }
};

using CycleAnswer = BudgetedAnswer<std::optional<CycleWitness>>;

/// The subgraph of the torus spanned by a set of edges, with local dense
/// vertex and edge indices (both in increasing global-id order) and CSR
/// adjacency.
class OpenSubgraph {
public:
    struct Arc {
        std::uint32_t to;
        std::uint32_t edge;
        bool forward;
    };

    OpenSubgraph(const Torus& torus, std::span<const EdgeId> edges);
    OpenSubgraph(const Torus& torus, const Cluster& cluster) : OpenSubgraph(torus, cluster.edges) {}

    const Torus& torus() const { return torus_; }
    std::uint32_t vertex_count() const { return static_cast<std::uint32_t>(vertices_.size()); }
    std::uint32_t edge_count() const { return static_cast<std::uint32_t>(edges_.size()); }
    VertexId vertex(std::uint32_t v) const { return vertices_[v]; }
    EdgeId edge(std::uint32_t e) const { return edges_[e]; }
    std::uint32_t lower(std::uint32_t e) const { return lower_[e]; }
    std::uint32_t upper(std::uint32_t e) const { return upper_[e]; }
    std::optional<std::uint32_t> local_vertex(VertexId v) const;
    std::optional<std::uint32_t> local_edge(EdgeId e) const;
    std::span<const Arc> arcs(std::uint32_t v) const {
        return {arcs_.data() + arc_begin_[v], arc_begin_[v + 1] - arc_begin_[v]};
    }
    /// Lattice displacement of traversing `arc`, component `axis`.
    int displacement(const Arc& arc, int axis) const {
        const int o = torus_.offsets()[dir_[arc.edge]][static_cast<std::size_t>(axis)];
        return arc.forward ? o : -o;
    }
    std::vector<char> all_edges() const { return std::vector<char>(edges_.size(), 1); }

    /// Witness from a closed local trail (vertex list closed, edge list).
    CycleWitness witness(std::span<const std::uint32_t> trail_vertices, std::span<const std::uint32_t> trail_edges) const;

private:
    Torus torus_;
    std::vector<VertexId> vertices_;
    std::vector<EdgeId> edges_;
    std::vector<std::uint32_t> lower_, upper_;
    std::vector<int> dir_;
    std::vector<std::size_t> arc_begin_;
    std::vector<Arc> arcs_;
};

/// Edge mask over an OpenSubgraph (1 = edge present).
using EdgeMask = std::vector<char>;

/// Bridges of the masked graph.
std::vector<char> find_bridges(const OpenSubgraph& g, const EdgeMask& mask);

/// Sound pruning: repeatedly drops bridges and vertices whose 2-edge-connected
/// component holds no vertex at sup-distance >= floor(r/4). Every long
/// closed trail of the masked graph survives in the returned mask.
EdgeMask long_cycle_core(const OpenSubgraph& g, const EdgeMask& mask);

/// Some closed trail through the masked graph with nonzero winding, if the
/// lift of any component is inconsistent.
std::optional<CycleWitness> find_wrapping_cycle(const OpenSubgraph& g, const EdgeMask& mask);

// Queries on explicit subgraphs. All searches share the given budget.
CycleAnswer long_cycle_through_vertex(const OpenSubgraph& g, const EdgeMask& mask, std::uint32_t v, WorkBudget& budget,
                                      int max_length = std::numeric_limits<int>::max());
CycleAnswer long_cycle_through_edge(const OpenSubgraph& g, const EdgeMask& mask, std::uint32_t e, WorkBudget& budget);
CycleAnswer find_long_cycle(const OpenSubgraph& g, const EdgeMask& mask, WorkBudget& budget);

// Queries on sampled configurations.

/// Per-vertex flag: the vertex's cluster lifts to Z^d with two distinct
/// r-equivalent copies of one vertex, i.e. it contains a cycle with nonzero
/// winding. Computed with an offset union-find over all open edges.
struct WrappingLabels {
    std::vector<char> vertex_wraps;
    bool any() const;
};
WrappingLabels has_wrapping_cluster(const BondConfig& cfg);

CycleAnswer vertex_in_long_cycle(const BondConfig& cfg, VertexId x, std::uint64_t budget = kDefaultBudget);
CycleAnswer cluster_contains_long_cycle(const BondConfig& cfg, const Cluster& cluster, std::uint64_t budget = kDefaultBudget);
CycleAnswer shortest_long_cycle_through(const BondConfig& cfg, VertexId x, int k, std::uint64_t budget = kDefaultBudget);

struct LongCycleCount {
    std::uint64_t count = 0;
    bool unknown = false;
    /// Longest long cycle exhibited while counting (a lower bound on the
    /// longest one present).
    std::size_t longest_witness = 0;
    std::uint64_t work = 0;
};
/// Budget applies per vertex query.
LongCycleCount long_cycle_vertex_count(const BondConfig& cfg, std::uint64_t budget = kDefaultBudget);
/// Same, restricted to one cluster.
LongCycleCount long_cycle_vertex_count(const OpenSubgraph& g, std::uint64_t budget = kDefaultBudget);

/// Shortest long cycle through x among lengths <= max_length (exact search).
BudgetedAnswer<std::optional<std::size_t>> shortest_long_cycle_length(const BondConfig& cfg, VertexId x, int max_length,
                                                                      std::uint64_t budget = kDefaultBudget);

struct YValue {
    std::int64_t value = 0;          // exact when verdict == yes
    std::int64_t lower_bound = 0;
    std::int64_t surplus_bound = 0;  // cycle rank
    std::optional<std::int64_t> special_bound;
};
using YAnswer = BudgetedAnswer<YValue>;

/// Minimum number of edges whose removal leaves no long cycle.
YAnswer compute_Y(const OpenSubgraph& g, std::uint64_t budget = kDefaultBudget,
                  std::optional<std::int64_t> special_bound = std::nullopt);
inline YAnswer compute_Y(const Torus& torus, const Cluster& cluster, std::uint64_t budget = kDefaultBudget,
                         std::optional<std::int64_t> special_bound = std::nullopt) {
    return compute_Y(OpenSubgraph(torus, cluster), budget, special_bound);
}

struct InteriorSet {
    std::vector<VertexId> members;  // sorted
    bool exact = false;
    std::uint64_t work = 0;
};
/// Vertices z of root's cluster joined to root by a path that is
/// edge-disjoint from some long cycle through z.
InteriorSet interior_set_I(const BondConfig& cfg, VertexId root, std::uint64_t budget = kDefaultBudget);

}  // namespace perco
