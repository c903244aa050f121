#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <unordered_map>
#include <vector>

#include "perco/bond_config.hpp"
#include "perco/cycles.hpp"
#include "perco/lattice.hpp"

namespace perco {

/// Depth-first exploration of the cluster of `root`. Tree data is indexed by
/// discovery position (vertices[0] == root).
struct Stage1Result {
    VertexId root = 0;
    std::vector<VertexId> vertices;
    std::vector<std::int64_t> parent;  // -1 at the root
    std::vector<EdgeId> parent_edge;   // unused at the root
    std::vector<int> depth;
    std::vector<EdgeId> explored;      // E, in exploration order
    std::vector<char> explored_open;
    std::vector<EdgeId> surplus;       // U, in exploration order; never read
    /// (position of the vertex it was chosen from, position of the other end)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> surplus_ends;
    std::unordered_map<VertexId, std::uint32_t> index;
    std::uint64_t steps = 0;
    /// Steps at which the extendable set was not a root path with a unique
    /// deepest vertex equal to the one chosen (verification mode only).
    std::uint64_t parent_uniqueness_violations = 0;

    bool contains(VertexId v) const { return index.count(v) != 0; }
    std::uint32_t position(VertexId v) const { return index.at(v); }
    /// Ancestor-or-self in the spanning tree, by position.
    bool is_ancestor(std::uint32_t anc, std::uint32_t v) const;
    std::vector<EdgeId> tree_edges() const;  // sorted
    /// Tree edges on the path from position v up to the root.
    std::vector<EdgeId> root_path_edges(std::uint32_t v) const;
};

/// With verify set, the extendable set is recomputed by brute force before
/// every step and compared with the stack-based choice.
Stage1Result depth_first_explore(const BondConfig& cfg, VertexId x, bool verify = false);

/// Branch vertices B_x in numbering order (index 0 has number 1).
struct BranchOrder {
    std::vector<VertexId> branch;
    std::vector<VertexId> aux_parent;  // x for top-level branch vertices and for x itself
    std::vector<int> aux_depth;        // 0 only for x
    std::vector<std::vector<EdgeId>> edges;  // surplus edges hanging below each b, sorted
    /// Surplus edges whose endpoints are not in ancestor relation.
    std::uint64_t surplus_ancestry_violations = 0;
};

/// Throws std::logic_error if a surplus edge leaves the explored set.
BranchOrder order_branch_vertices(const Stage1Result& s1);

struct Stage2Result {
    VertexId root = 0;
    std::vector<EdgeId> G;        // sorted open edges of E and F
    std::vector<EdgeId> F;        // processing order
    std::vector<char> F_open;
    std::vector<EdgeId> Z;        // processing order; never read
    BranchOrder order;
    bool valid = true;            // false once a decision came back unknown
    std::uint64_t work = 0;
};

/// `budget` bounds each long-cycle decision separately.
Stage2Result second_stage(const BondConfig& cfg, const Stage1Result& s1, std::uint64_t budget = kDefaultBudget);

struct SurgeryAudit {
    std::uint64_t steps = 0;
    std::uint64_t parent_uniqueness = 0;
    std::uint64_t surplus_ancestry = 0;
    std::uint64_t partition = 0;
    std::uint64_t long_cycle_in_G = 0;
    std::uint64_t certificate = 0;
    std::uint64_t kill_switch = 0;
    std::uint64_t stage1_reads = 0;  // reads of U in stage 1, or E edges read other than once
    std::uint64_t stage2_reads = 0;  // reads of Z in stage 2, or F edges read other than once
    /// A check could not be decided within budget.
    bool inconclusive = false;

    std::uint64_t violations() const {
        return parent_uniqueness + surplus_ancestry + partition + long_cycle_in_G + certificate + kill_switch + stage1_reads + stage2_reads;
    }
};

struct AuditedExploration {
    Stage1Result stage1;
    Stage2Result stage2;
    SurgeryAudit audit;
};

/// Runs both stages on an instrumented copy of cfg and re-checks every
/// structural property of the result.
AuditedExploration audit_exploration(const BondConfig& cfg, VertexId x, std::uint64_t budget = kDefaultBudget);

/// One JSON object per line; sets as sorted id arrays.
std::string exploration_json(const Torus& torus, const Stage1Result& s1, const Stage2Result& s2);

/// delta * V^(2/3); clusters strictly larger count.
double Ydelta_threshold(const Torus& torus, double delta);

/// Y_delta = sum of Y_C over clusters with |C| > delta V^(2/3).
BudgetedAnswer<std::int64_t> compute_Ydelta(const BondConfig& cfg, double delta, std::uint64_t budget = kDefaultBudget);

/// (1-p)^(sum |Z_x| over representatives of clusters above the threshold),
/// with one uniformly chosen representative per cluster. nullopt when a
/// stage-2 decision was unknown.
std::optional<double> special_edge_weight(const BondConfig& cfg, double delta, std::mt19937_64& rng,
                                          std::uint64_t budget = kDefaultBudget);

enum class YdeltaMethod { direct, special_edge };

struct YdeltaEstimate {
    std::size_t replicas = 0;
    std::size_t discarded = 0;
    std::size_t zero_count = 0;  // direct method only
    double mean = 0.0;
    double stderr_ = 0.0;
};

YdeltaEstimate estimate_p_Ydelta_zero(const Torus& torus, double p, double delta, YdeltaMethod method,
                                      std::size_t replicas, std::uint64_t seed,
                                      std::uint64_t budget = kDefaultBudget, int threads = 1);

}  // namespace perco
