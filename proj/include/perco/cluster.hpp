#pragma once

#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "perco/bond_config.hpp"
#include "perco/lattice.hpp"

namespace perco {

/// An open cluster with its open edges (both sorted by id).
struct Cluster {
    VertexId root = 0;
    std::vector<VertexId> vertices;
    std::vector<EdgeId> edges;

    std::size_t size() const { return vertices.size(); }
    /// Independent cycles: |edges| - |vertices| + 1.
    std::int64_t cycle_rank() const {
        return static_cast<std::int64_t>(edges.size()) - static_cast<std::int64_t>(vertices.size()) + 1;
    }
};

Cluster component_of(const BondConfig& cfg, VertexId x);

/// Partition of the torus into clusters, sorted by size descending with
/// ties broken by the smallest vertex id (which is also the root).
std::vector<Cluster> all_components(const BondConfig& cfg);

/// Compact component labelling; label ids follow the same order as
/// all_components.
struct ComponentLabels {
    std::vector<std::uint32_t> label;
    std::vector<VertexId> roots;
    std::vector<std::uint64_t> sizes;
    std::vector<std::uint64_t> edge_counts;

    std::size_t count() const { return roots.size(); }
};

ComponentLabels label_components(const BondConfig& cfg);
/// Materializes one labelled cluster.
Cluster extract_cluster(const BondConfig& cfg, const ComponentLabels& labels, std::uint32_t id);

class IntrinsicBall {
public:
    static constexpr int kOutside = std::numeric_limits<int>::max();

    IntrinsicBall(VertexId center, int radius) : center_(center), radius_(radius) {}

    VertexId center() const { return center_; }
    int radius() const { return radius_; }
    /// Vertices in nondecreasing distance order.
    const std::vector<VertexId>& vertices() const { return order_; }
    int distance(VertexId y) const;
    bool contains(VertexId y) const { return distance(y) != kOutside; }
    /// Vertices at distance exactly k (k <= radius).
    std::vector<VertexId> shell(int k) const;
    std::size_t size() const { return order_.size(); }

    void add(VertexId v, int dist) {
        order_.push_back(v);
        dist_.emplace(v, dist);
    }

private:
    VertexId center_;
    int radius_;
    std::vector<VertexId> order_;
    std::unordered_map<VertexId, int> dist_;
};

IntrinsicBall intrinsic_ball(const BondConfig& cfg, VertexId x, int k);
bool connected_within(const BondConfig& cfg, VertexId x, VertexId y, int k);

/// Breadth-first search over open edges of any geometry exposing
/// for_each_incident. `visit(v, dist)` is called once per reached vertex in
/// BFS order; returning false stops the search. Distances are capped at
/// max_depth. `open(e)` decides edge status.
template <class Geometry, class Open, class Visit>
void bfs_open(const Geometry& g, VertexId source, int max_depth, Open&& open, Visit&& visit) {
    std::unordered_map<VertexId, int> dist;
    std::vector<VertexId> frontier{source}, next;
    dist.emplace(source, 0);
    if (!visit(source, 0)) return;
    for (int depth = 0; depth < max_depth && !frontier.empty(); ++depth) {
        next.clear();
        for (VertexId v : frontier) {
            bool stop = false;
            g.for_each_incident(v, [&](const Incidence& inc) {
                if (stop || dist.count(inc.neighbor) || !open(inc.edge)) return;
                dist.emplace(inc.neighbor, depth + 1);
                next.push_back(inc.neighbor);
                if (!visit(inc.neighbor, depth + 1)) stop = true;
            });
            if (stop) return;
        }
        frontier.swap(next);
    }
}

}  // namespace perco
