#include "perco/cluster.hpp"

#include <algorithm>
#include <deque>

namespace perco {

namespace {

constexpr std::uint32_t kUnlabelled = std::numeric_limits<std::uint32_t>::max();

}  // namespace

Cluster component_of(const BondConfig& cfg, VertexId x) {
    const Torus& torus = cfg.torus();
    torus.check_vertex(x);
    Cluster c;
    c.root = x;
    std::unordered_map<VertexId, bool> seen{{x, true}};
    std::vector<VertexId> stack{x};
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        c.vertices.push_back(v);
        torus.for_each_incident(v, [&](const Incidence& inc) {
            if (!cfg.is_open(inc.edge)) return;
            if (inc.forward) c.edges.push_back(inc.edge);
            if (seen.emplace(inc.neighbor, true).second) stack.push_back(inc.neighbor);
        });
    }
    std::sort(c.vertices.begin(), c.vertices.end());
    std::sort(c.edges.begin(), c.edges.end());
    return c;
}

ComponentLabels label_components(const BondConfig& cfg) {
    const Torus& torus = cfg.torus();
    const std::uint64_t V = torus.vertex_count();
    ComponentLabels out;
    std::vector<std::uint32_t> raw(V, kUnlabelled);
    std::vector<VertexId> roots;
    std::vector<std::uint64_t> sizes, edges;
    std::vector<VertexId> queue;
    for (VertexId s = 0; s < V; ++s) {
        if (raw[s] != kUnlabelled) continue;
        const auto id = static_cast<std::uint32_t>(roots.size());
        roots.push_back(s);
        std::uint64_t size = 0, nedges = 0;
        queue.clear();
        queue.push_back(s);
        raw[s] = id;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const VertexId v = queue[head];
            ++size;
            torus.for_each_incident(v, [&](const Incidence& inc) {
                if (!cfg.is_open(inc.edge)) return;
                if (inc.forward) ++nedges;
                if (raw[inc.neighbor] == kUnlabelled) {
                    raw[inc.neighbor] = id;
                    queue.push_back(inc.neighbor);
                }
            });
        }
        sizes.push_back(size);
        edges.push_back(nedges);
    }
    std::vector<std::uint32_t> order(roots.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return sizes[a] > sizes[b]; });
    std::vector<std::uint32_t> rank(order.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
    out.label.resize(V);
    for (VertexId v = 0; v < V; ++v) out.label[v] = rank[raw[v]];
    out.roots.resize(order.size());
    out.sizes.resize(order.size());
    out.edge_counts.resize(order.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) {
        out.roots[i] = roots[order[i]];
        out.sizes[i] = sizes[order[i]];
        out.edge_counts[i] = edges[order[i]];
    }
    return out;
}

Cluster extract_cluster(const BondConfig& cfg, const ComponentLabels& labels, std::uint32_t id) {
    const Torus& torus = cfg.torus();
    Cluster c;
    c.root = labels.roots[id];
    std::vector<VertexId> queue{c.root};
    std::unordered_map<VertexId, bool> seen{{c.root, true}};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const VertexId v = queue[head];
        torus.for_each_incident(v, [&](const Incidence& inc) {
            if (labels.label[inc.neighbor] != id || !cfg.is_open(inc.edge)) return;
            if (inc.forward) c.edges.push_back(inc.edge);
            if (seen.emplace(inc.neighbor, true).second) queue.push_back(inc.neighbor);
        });
    }
    c.vertices = std::move(queue);
    std::sort(c.vertices.begin(), c.vertices.end());
    std::sort(c.edges.begin(), c.edges.end());
    return c;
}

std::vector<Cluster> all_components(const BondConfig& cfg) {
    const ComponentLabels labels = label_components(cfg);
    std::vector<Cluster> out;
    out.reserve(labels.count());
    for (std::uint32_t id = 0; id < labels.count(); ++id) {
        if (labels.sizes[id] == 1) {
            out.push_back(Cluster{labels.roots[id], {labels.roots[id]}, {}});
        } else {
            out.push_back(extract_cluster(cfg, labels, id));
        }
    }
    return out;
}

int IntrinsicBall::distance(VertexId y) const {
    auto it = dist_.find(y);
    return it == dist_.end() ? kOutside : it->second;
}

std::vector<VertexId> IntrinsicBall::shell(int k) const {
    std::vector<VertexId> out;
    for (VertexId v : order_)
        if (distance(v) == k) out.push_back(v);
    return out;
}

IntrinsicBall intrinsic_ball(const BondConfig& cfg, VertexId x, int k) {
    if (k < 0) throw std::invalid_argument("ball radius must be >= 0");
    cfg.torus().check_vertex(x);
    IntrinsicBall ball(x, k);
    bfs_open(cfg.torus(), x, k, [&](EdgeId e) { return cfg.is_open(e); },
             [&](VertexId v, int dist) {
                 ball.add(v, dist);
                 return true;
             });
    return ball;
}

bool connected_within(const BondConfig& cfg, VertexId x, VertexId y, int k) {
    if (k < 0) throw std::invalid_argument("connection length must be >= 0");
    bool found = false;
    bfs_open(cfg.torus(), x, k, [&](EdgeId e) { return cfg.is_open(e); },
             [&](VertexId v, int) {
                 if (v == y) found = true;
                 return !found;
             });
    return found;
}

}  // namespace perco
