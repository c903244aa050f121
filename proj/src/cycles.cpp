#include "perco/cycles.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <string>
#include <unordered_set>

namespace perco {

namespace {

constexpr int kFar = std::numeric_limits<int>::max() / 4;

struct Step {
    EdgeId edge;
    int dir;
    bool forward;
};

std::optional<Step> step_between(const Torus& torus, VertexId u, VertexId v) {
    if (u == v) return std::nullopt;
    auto e = edge_between(torus, u, v);
    if (!e) return std::nullopt;
    const EdgeEnds ends = torus.endpoints(*e);
    return Step{*e, ends.dir, ends.lower == u};
}

std::vector<std::int64_t> winding_of(const Torus& torus, std::span<const VertexId> walk) {
    const int d = torus.dim();
    std::vector<std::int64_t> sum(static_cast<std::size_t>(d), 0);
    for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
        auto s = step_between(torus, walk[i], walk[i + 1]);
        if (!s) throw MalformedCycle("vertices " + std::to_string(walk[i]) + " and " + std::to_string(walk[i + 1]) + " are not adjacent");
        auto o = torus.offsets()[s->dir];
        for (int a = 0; a < d; ++a) sum[static_cast<std::size_t>(a)] += s->forward ? o[static_cast<std::size_t>(a)] : -o[static_cast<std::size_t>(a)];
    }
    for (auto& w : sum) {
        if (w % torus.side() != 0) throw MalformedCycle("walk does not close up");
        w /= torus.side();
    }
    return sum;
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::yes: return "yes";
        case Verdict::no: return "no";
        case Verdict::unknown: return "unknown";
    }
    return "unknown";
}

bool is_long_vertex_set(const Torus& torus, std::span<const VertexId> vertices) {
    std::vector<VertexId> vs(vertices.begin(), vertices.end());
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    const int t = long_radius(torus);
    for (VertexId u : vs) {
        bool far = false;
        for (VertexId v : vs) {
            if (sup_distance(torus, u, v) >= t) {
                far = true;
                break;
            }
        }
        if (!far) return false;
    }
    return !vs.empty();
}

CycleWitness make_witness(const Torus& torus, std::vector<VertexId> closed_walk) {
    if (closed_walk.size() < 2 || closed_walk.front() != closed_walk.back())
        throw MalformedCycle("cycle must start and end at the same vertex");
    for (VertexId v : closed_walk) torus.check_vertex(v);
    CycleWitness c;
    c.vertices = std::move(closed_walk);
    std::unordered_set<EdgeId> seen;
    for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i) {
        auto s = step_between(torus, c.vertices[i], c.vertices[i + 1]);
        if (!s)
            throw MalformedCycle("vertices " + std::to_string(c.vertices[i]) + " and " + std::to_string(c.vertices[i + 1]) +
                                 " are not adjacent");
        if (!seen.insert(s->edge).second) throw MalformedCycle("edge " + std::to_string(s->edge) + " repeated");
        c.edges.push_back(s->edge);
    }
    c.winding = winding_of(torus, c.vertices);
    c.long_cycle = is_long_vertex_set(torus, c.vertices);
    return c;
}

CycleWitness reversed(const Torus& torus, const CycleWitness& c) {
    std::vector<VertexId> vs(c.vertices.rbegin(), c.vertices.rend());
    return make_witness(torus, std::move(vs));
}

CycleWitness rotated(const Torus& torus, const CycleWitness& c, std::size_t k) {
    const std::size_t n = c.length();
    if (n == 0) return c;
    std::vector<VertexId> vs;
    vs.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) vs.push_back(c.vertices[(k + i) % n]);
    return make_witness(torus, std::move(vs));
}

void validate_witness(const Torus& torus, const CycleWitness& c, const BondConfig* cfg) {
    CycleWitness fresh = make_witness(torus, c.vertices);
    if (fresh.edges != c.edges) throw MalformedCycle("edge list does not match vertex sequence");
    if (!c.winding.empty() && fresh.winding != c.winding) throw MalformedCycle("winding does not match");
    if (cfg)
        for (EdgeId e : c.edges)
            if (!cfg->peek(e)) throw MalformedCycle("edge " + std::to_string(e) + " is closed");
}

bool is_long_cycle(const Torus& torus, const CycleWitness& c) {
    validate_witness(torus, c);
    return is_long_vertex_set(torus, c.vertices);
}

std::vector<std::int64_t> winding_vector(const Torus& torus, const CycleWitness& c) {
    return winding_of(torus, c.vertices);
}

// ---------------------------------------------------------------------------

OpenSubgraph::OpenSubgraph(const Torus& torus, std::span<const EdgeId> edges)
    : torus_(torus), edges_(edges.begin(), edges.end()) {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    std::vector<EdgeEnds> ends;
    ends.reserve(edges_.size());
    for (EdgeId e : edges_) {
        torus_.check_edge(e);
        ends.push_back(torus_.endpoints(e));
        vertices_.push_back(ends.back().lower);
        vertices_.push_back(ends.back().upper);
    }
    std::sort(vertices_.begin(), vertices_.end());
    vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());

    const std::size_t n = vertices_.size();
    arc_begin_.assign(n + 1, 0);
    for (const auto& ee : ends) {
        lower_.push_back(*local_vertex(ee.lower));
        upper_.push_back(*local_vertex(ee.upper));
        dir_.push_back(ee.dir);
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        ++arc_begin_[lower_[e] + 1];
        ++arc_begin_[upper_[e] + 1];
    }
    std::partial_sum(arc_begin_.begin(), arc_begin_.end(), arc_begin_.begin());
    arcs_.resize(arc_begin_[n]);
    std::vector<std::size_t> fill(arc_begin_.begin(), arc_begin_.end() - 1);
    for (std::uint32_t e = 0; e < edges_.size(); ++e) {
        arcs_[fill[lower_[e]]++] = Arc{upper_[e], e, true};
        arcs_[fill[upper_[e]]++] = Arc{lower_[e], e, false};
    }
}

std::optional<std::uint32_t> OpenSubgraph::local_vertex(VertexId v) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
    if (it == vertices_.end() || *it != v) return std::nullopt;
    return static_cast<std::uint32_t>(it - vertices_.begin());
}

std::optional<std::uint32_t> OpenSubgraph::local_edge(EdgeId e) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it == edges_.end() || *it != e) return std::nullopt;
    return static_cast<std::uint32_t>(it - edges_.begin());
}

CycleWitness OpenSubgraph::witness(std::span<const std::uint32_t> trail_vertices,
                                   std::span<const std::uint32_t> trail_edges) const {
    CycleWitness c;
    const int d = torus_.dim();
    std::vector<std::int64_t> sum(static_cast<std::size_t>(d), 0);
    for (std::uint32_t v : trail_vertices) c.vertices.push_back(vertices_[v]);
    for (std::size_t i = 0; i < trail_edges.size(); ++i) {
        const std::uint32_t e = trail_edges[i];
        c.edges.push_back(edges_[e]);
        const bool forward = lower_[e] == trail_vertices[i];
        auto o = torus_.offsets()[dir_[e]];
        for (int a = 0; a < d; ++a) sum[static_cast<std::size_t>(a)] += forward ? o[static_cast<std::size_t>(a)] : -o[static_cast<std::size_t>(a)];
    }
    for (auto& w : sum) w /= torus_.side();
    c.winding = std::move(sum);
    c.long_cycle = is_long_vertex_set(torus_, c.vertices);
    return c;
}

// ---------------------------------------------------------------------------

std::vector<char> find_bridges(const OpenSubgraph& g, const EdgeMask& mask) {
    const std::uint32_t n = g.vertex_count();
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    std::vector<char> bridge(g.edge_count(), 0);
    std::vector<std::uint32_t> tin(n, kNone), low(n, 0);
    struct Frame {
        std::uint32_t v;
        std::uint32_t parent_edge;
        std::size_t next;
    };
    std::vector<Frame> stack;
    std::uint32_t timer = 0;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (tin[root] != kNone) continue;
        tin[root] = low[root] = timer++;
        stack.push_back({root, kNone, 0});
        while (!stack.empty()) {
            Frame& f = stack.back();
            auto arcs = g.arcs(f.v);
            if (f.next < arcs.size()) {
                const auto& arc = arcs[f.next++];
                if (!mask[arc.edge] || arc.edge == f.parent_edge) continue;
                if (tin[arc.to] == kNone) {
                    tin[arc.to] = low[arc.to] = timer++;
                    stack.push_back({arc.to, arc.edge, 0});
                } else {
                    low[f.v] = std::min(low[f.v], tin[arc.to]);
                }
                continue;
            }
            const Frame done = f;
            stack.pop_back();
            if (stack.empty()) break;
            const std::uint32_t p = stack.back().v;
            low[p] = std::min(low[p], low[done.v]);
            if (low[done.v] > tin[p]) bridge[done.parent_edge] = 1;
        }
    }
    return bridge;
}

namespace {

bool has_arc(const OpenSubgraph& g, const EdgeMask& mask, std::uint32_t v) {
    for (const auto& arc : g.arcs(v))
        if (mask[arc.edge]) return true;
    return false;
}

// Component labels of the masked graph; vertices without masked edges get -1.
std::vector<int> mask_components(const OpenSubgraph& g, const EdgeMask& mask, int& count) {
    std::vector<int> comp(g.vertex_count(), -1);
    count = 0;
    std::vector<std::uint32_t> queue;
    for (std::uint32_t s = 0; s < g.vertex_count(); ++s) {
        if (comp[s] != -1 || !has_arc(g, mask, s)) continue;
        comp[s] = count;
        queue.assign(1, s);
        for (std::size_t i = 0; i < queue.size(); ++i)
            for (const auto& arc : g.arcs(queue[i]))
                if (mask[arc.edge] && comp[arc.to] == -1) {
                    comp[arc.to] = count;
                    queue.push_back(arc.to);
                }
        ++count;
    }
    return comp;
}

}  // namespace

EdgeMask long_cycle_core(const OpenSubgraph& g, const EdgeMask& mask) {
    const Torus& torus = g.torus();
    const int t = long_radius(torus);
    EdgeMask m = mask;
    while (true) {
        auto bridge = find_bridges(g, m);
        for (std::size_t e = 0; e < m.size(); ++e)
            if (bridge[e]) m[e] = 0;
        if (t <= 1) return m;

        int count = 0;
        auto comp = mask_components(g, m, count);
        std::vector<std::vector<std::uint32_t>> members(static_cast<std::size_t>(count));
        for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
            if (comp[v] >= 0) members[static_cast<std::size_t>(comp[v])].push_back(v);
        bool changed = false;
        for (const auto& vs : members) {
            for (std::uint32_t v : vs) {
                bool far = false;
                for (std::uint32_t w : vs)
                    if (sup_distance(torus, g.vertex(v), g.vertex(w)) >= t) {
                        far = true;
                        break;
                    }
                if (far) continue;
                for (const auto& arc : g.arcs(v)) m[arc.edge] = 0;
                changed = true;
            }
        }
        if (!changed) return m;
    }
}

namespace {

struct LocalTrail {
    std::vector<std::uint32_t> vertices;  // closed
    std::vector<std::uint32_t> edges;
};

// Lifts the masked component of src to Z^d by BFS. Returns a closed trail
// with nonzero winding if two lifts of a vertex disagree. Charges one unit
// per dequeued vertex; sets out_of_budget and returns nothing when exceeded.
std::optional<LocalTrail> wrapping_in_component(const OpenSubgraph& g, const EdgeMask& mask, std::uint32_t src,
                                                WorkBudget* budget, bool& out_of_budget, std::vector<char>* seen_out = nullptr) {
    const std::uint32_t n = g.vertex_count();
    const int d = g.torus().dim();
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::int64_t> pos(static_cast<std::size_t>(n) * static_cast<std::size_t>(d), 0);
    std::vector<std::uint32_t> parent_edge(n, kNone), parent(n, kNone), depth(n, 0);
    std::vector<char> seen(n, 0);
    seen[src] = 1;
    std::vector<std::uint32_t> queue{src};
    auto p = [&](std::uint32_t v, int a) -> std::int64_t& { return pos[static_cast<std::size_t>(v) * d + static_cast<std::size_t>(a)]; };
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const std::uint32_t v = queue[qi];
        if (budget && !budget->spend()) {
            out_of_budget = true;
            return std::nullopt;
        }
        for (const auto& arc : g.arcs(v)) {
            if (!mask[arc.edge] || arc.edge == parent_edge[v]) continue;
            if (!seen[arc.to]) {
                seen[arc.to] = 1;
                parent[arc.to] = v;
                parent_edge[arc.to] = arc.edge;
                depth[arc.to] = depth[v] + 1;
                for (int a = 0; a < d; ++a) p(arc.to, a) = p(v, a) + g.displacement(arc, a);
                queue.push_back(arc.to);
                continue;
            }
            bool consistent = true;
            for (int a = 0; a < d && consistent; ++a) consistent = p(arc.to, a) == p(v, a) + g.displacement(arc, a);
            if (consistent) continue;
            // Fundamental cycle: lca -> v, v -> w, w -> lca.
            std::vector<std::uint32_t> up_v{v}, up_w{arc.to};
            std::vector<std::uint32_t> edges_v, edges_w;
            std::uint32_t a = v, b = arc.to;
            while (depth[a] > depth[b]) {
                edges_v.push_back(parent_edge[a]);
                a = parent[a];
                up_v.push_back(a);
            }
            while (depth[b] > depth[a]) {
                edges_w.push_back(parent_edge[b]);
                b = parent[b];
                up_w.push_back(b);
            }
            while (a != b) {
                edges_v.push_back(parent_edge[a]);
                a = parent[a];
                up_v.push_back(a);
                edges_w.push_back(parent_edge[b]);
                b = parent[b];
                up_w.push_back(b);
            }
            LocalTrail tr;
            tr.vertices.assign(up_v.rbegin(), up_v.rend());
            tr.edges.assign(edges_v.rbegin(), edges_v.rend());
            tr.edges.push_back(arc.edge);
            tr.vertices.insert(tr.vertices.end(), up_w.begin(), up_w.end());
            tr.edges.insert(tr.edges.end(), edges_w.begin(), edges_w.end());
            return tr;
        }
    }
    if (seen_out) *seen_out = std::move(seen);
    return std::nullopt;
}

struct PathResult {
    bool out_of_budget = false;
    bool found = false;
    std::vector<std::uint32_t> vertices;
    std::vector<std::uint32_t> edges;
};

// Shortest path from `from` to `to` in the masked graph avoiding edge `skip`.
PathResult shortest_path(const OpenSubgraph& g, const EdgeMask& mask, std::uint32_t from, std::uint32_t to,
                         std::uint32_t skip, WorkBudget& budget) {
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    PathResult res;
    std::vector<std::uint32_t> parent(g.vertex_count(), kNone), parent_edge(g.vertex_count(), kNone);
    parent[from] = from;
    std::vector<std::uint32_t> queue{from};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const std::uint32_t v = queue[qi];
        if (!budget.spend()) {
            res.out_of_budget = true;
            return res;
        }
        if (v == to) break;
        for (const auto& arc : g.arcs(v)) {
            if (!mask[arc.edge] || arc.edge == skip || parent[arc.to] != kNone) continue;
            parent[arc.to] = v;
            parent_edge[arc.to] = arc.edge;
            queue.push_back(arc.to);
        }
    }
    if (parent[to] == kNone) return res;
    res.found = true;
    for (std::uint32_t v = to; v != from; v = parent[v]) {
        res.vertices.push_back(v);
        res.edges.push_back(parent_edge[v]);
    }
    res.vertices.push_back(from);
    std::reverse(res.vertices.begin(), res.vertices.end());
    std::reverse(res.edges.begin(), res.edges.end());
    return res;
}

struct ShortestCycle {
    bool out_of_budget = false;
    std::optional<LocalTrail> trail;
};

// Shortest cycle through v: BFS labelling every vertex with the first edge
// of its tree path; a non-tree edge between different branches closes a
// simple cycle through v.
ShortestCycle shortest_cycle_through(const OpenSubgraph& g, const EdgeMask& mask, std::uint32_t v, WorkBudget& budget) {
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    const std::uint32_t n = g.vertex_count();
    std::vector<std::uint32_t> dist(n, kNone), branch(n, kNone), parent(n, kNone), parent_edge(n, kNone);
    dist[v] = 0;
    std::vector<std::uint32_t> queue{v};
    std::uint32_t best = kNone, best_a = 0, best_b = 0, best_edge = 0;
    ShortestCycle res;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const std::uint32_t a = queue[qi];
        if (best != kNone && 2 * dist[a] + 1 >= best) break;
        if (!budget.spend()) {
            res.out_of_budget = true;
            return res;
        }
        for (const auto& arc : g.arcs(a)) {
            if (!mask[arc.edge] || arc.edge == parent_edge[a]) continue;
            const std::uint32_t b = arc.to;
            if (dist[b] == kNone) {
                dist[b] = dist[a] + 1;
                parent[b] = a;
                parent_edge[b] = arc.edge;
                branch[b] = a == v ? arc.edge : branch[a];
                queue.push_back(b);
            } else if (b != v && a != v && branch[a] != branch[b]) {
                const std::uint32_t len = dist[a] + dist[b] + 1;
                if (len < best) {
                    best = len;
                    best_a = a;
                    best_b = b;
                    best_edge = arc.edge;
                }
            }
        }
    }
    if (best == kNone) return res;
    LocalTrail tr;
    std::vector<std::uint32_t> up_a, up_a_edges;
    for (std::uint32_t x = best_a; x != v; x = parent[x]) {
        up_a.push_back(x);
        up_a_edges.push_back(parent_edge[x]);
    }
    tr.vertices.push_back(v);
    tr.vertices.insert(tr.vertices.end(), up_a.rbegin(), up_a.rend());
    tr.edges.assign(up_a_edges.rbegin(), up_a_edges.rend());
    tr.edges.push_back(best_edge);
    for (std::uint32_t x = best_b; x != v; x = parent[x]) {
        tr.vertices.push_back(x);
        tr.edges.push_back(parent_edge[x]);
    }
    tr.vertices.push_back(v);
    res.trail = std::move(tr);
    return res;
}

// Two edge-disjoint trails from x to the target set (x not in it), each
// ending at its first target vertex.
std::optional<std::pair<PathResult, PathResult>> two_disjoint_paths(const OpenSubgraph& g, const EdgeMask& mask,
                                                                    std::uint32_t x, const std::vector<char>& target,
                                                                    WorkBudget& budget, bool& out_of_budget) {
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    const std::uint32_t n = g.vertex_count();
    // flow[e] = +1 lower->upper, -1 upper->lower
    std::vector<int> flow(g.edge_count(), 0);
    auto pushed = [&](const OpenSubgraph::Arc& arc) { return arc.forward ? flow[arc.edge] : -flow[arc.edge]; };
    for (int round = 0; round < 2; ++round) {
        std::vector<std::uint32_t> parent(n, kNone), parent_edge(n, kNone);
        std::vector<char> parent_fwd(n, 0);
        parent[x] = x;
        std::vector<std::uint32_t> queue{x};
        std::uint32_t hit = kNone;
        for (std::size_t qi = 0; qi < queue.size() && hit == kNone; ++qi) {
            const std::uint32_t v = queue[qi];
            if (!budget.spend()) {
                out_of_budget = true;
                return std::nullopt;
            }
            for (const auto& arc : g.arcs(v)) {
                if (!mask[arc.edge] || parent[arc.to] != kNone || pushed(arc) >= 1) continue;
                parent[arc.to] = v;
                parent_edge[arc.to] = arc.edge;
                parent_fwd[arc.to] = arc.forward;
                if (target[arc.to]) {
                    hit = arc.to;
                    break;
                }
                queue.push_back(arc.to);
            }
        }
        if (hit == kNone) return std::nullopt;
        for (std::uint32_t v = hit; v != x; v = parent[v]) flow[parent_edge[v]] += parent_fwd[v] ? 1 : -1;
    }
    std::vector<char> taken(g.edge_count(), 0);
    auto walk = [&]() {
        PathResult p;
        p.found = true;
        std::uint32_t v = x;
        p.vertices.push_back(v);
        while (v == x || !target[v]) {
            bool moved = false;
            for (const auto& arc : g.arcs(v)) {
                if (!mask[arc.edge] || taken[arc.edge] || pushed(arc) != 1) continue;
                taken[arc.edge] = 1;
                p.edges.push_back(arc.edge);
                p.vertices.push_back(arc.to);
                v = arc.to;
                moved = true;
                break;
            }
            if (!moved) break;
        }
        return p;
    };
    PathResult a = walk(), b = walk();
    if (a.edges.empty() || b.edges.empty() || !target[a.vertices.back()] || !target[b.vertices.back()]) return std::nullopt;
    return std::make_pair(std::move(a), std::move(b));
}

// A long closed trail through x built from a wrapping cycle of its
// component and two edge-disjoint connections to it.
std::optional<LocalTrail> wrapping_trail_through(const OpenSubgraph& g, const EdgeMask& mask, std::uint32_t x,
                                                 WorkBudget& budget, bool& out_of_budget) {
    auto cyc = wrapping_in_component(g, mask, x, &budget, out_of_budget);
    if (!cyc) return std::nullopt;
    const std::size_t k = cyc->edges.size();
    auto rotate_to = [&](std::size_t i) {
        LocalTrail tr;
        for (std::size_t j = 0; j <= k; ++j) tr.vertices.push_back(cyc->vertices[(i + j) % k]);
        for (std::size_t j = 0; j < k; ++j) tr.edges.push_back(cyc->edges[(i + j) % k]);
        return tr;
    };
    for (std::size_t i = 0; i < k; ++i)
        if (cyc->vertices[i] == x) return rotate_to(i);

    std::vector<char> target(g.vertex_count(), 0);
    for (std::size_t i = 0; i < k; ++i) target[cyc->vertices[i]] = 1;
    auto paths = two_disjoint_paths(g, mask, x, target, budget, out_of_budget);
    if (!paths) return std::nullopt;
    const auto& [p1, p2] = *paths;
    std::size_t i1 = 0, i2 = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (cyc->vertices[i] == p1.vertices.back()) i1 = i;
        if (cyc->vertices[i] == p2.vertices.back()) i2 = i;
    }
    auto build = [&](bool forward) {
        LocalTrail tr;
        tr.vertices = p1.vertices;
        tr.edges = p1.edges;
        std::size_t steps = forward ? (i2 + k - i1) % k : (i1 + k - i2) % k;
        if (!forward && steps == 0) steps = k;
        std::size_t i = i1;
        for (std::size_t s = 0; s < steps; ++s) {
            if (forward) {
                tr.edges.push_back(cyc->edges[i]);
                i = (i + 1) % k;
            } else {
                i = (i + k - 1) % k;
                tr.edges.push_back(cyc->edges[i]);
            }
            tr.vertices.push_back(cyc->vertices[i]);
        }
        for (std::size_t j = p2.edges.size(); j-- > 0;) {
            tr.edges.push_back(p2.edges[j]);
            tr.vertices.push_back(p2.vertices[j]);
        }
        return tr;
    };
    for (bool forward : {true, false}) {
        LocalTrail tr = build(forward);
        const CycleWitness w = g.witness(tr.vertices, tr.edges);
        const bool winds = std::any_of(w.winding.begin(), w.winding.end(), [](std::int64_t x) { return x != 0; });
        if (winds && w.long_cycle) return tr;
    }
    return std::nullopt;
}

enum class SearchEnd { found, exhausted, out_of_budget };

std::vector<int> distances_to(const OpenSubgraph& g, const EdgeMask& mask, std::uint32_t target) {
    std::vector<int> dist(g.vertex_count(), kFar);
    dist[target] = 0;
    std::vector<std::uint32_t> queue{target};
    for (std::size_t qi = 0; qi < queue.size(); ++qi)
        for (const auto& arc : g.arcs(queue[qi]))
            if (mask[arc.edge] && dist[arc.to] == kFar) {
                dist[arc.to] = dist[queue[qi]] + 1;
                queue.push_back(arc.to);
            }
    return dist;
}

// Depth-first enumeration of closed trails through `start` (edges used at
// most once, vertices may repeat). Every traversed arc costs one unit.
template <class OnClosed>
SearchEnd search_trails(const OpenSubgraph& g, const EdgeMask& mask, std::uint32_t start,
                        std::optional<std::uint32_t> first_edge, int max_length, WorkBudget& budget, OnClosed&& on_closed) {
    const bool bounded = max_length < std::numeric_limits<int>::max();
    std::vector<int> dist = bounded ? distances_to(g, mask, start) : std::vector<int>(g.vertex_count(), 0);
    std::vector<char> used(g.edge_count(), 0);
    std::vector<std::uint32_t> vertices{start}, edges;
    struct Frame {
        std::uint32_t v;
        std::size_t next;
    };
    std::vector<Frame> frames;
    if (first_edge) {
        const std::uint32_t e = *first_edge;
        const std::uint32_t other = g.lower(e) == start ? g.upper(e) : g.lower(e);
        if (!budget.spend()) return SearchEnd::out_of_budget;
        if (1 + dist[other] > max_length) return SearchEnd::exhausted;
        used[e] = 1;
        edges.push_back(e);
        vertices.push_back(other);
        frames.push_back({other, 0});
    } else {
        frames.push_back({start, 0});
    }
    while (!frames.empty()) {
        Frame& f = frames.back();
        auto arcs = g.arcs(f.v);
        if (f.next == arcs.size()) {
            frames.pop_back();
            if (frames.empty()) break;
            used[edges.back()] = 0;
            edges.pop_back();
            vertices.pop_back();
            continue;
        }
        const auto arc = arcs[f.next++];
        if (!mask[arc.edge] || used[arc.edge]) continue;
        const int len = static_cast<int>(edges.size()) + 1;
        if (bounded && len + dist[arc.to] > max_length) continue;
        if (!budget.spend()) return SearchEnd::out_of_budget;
        used[arc.edge] = 1;
        edges.push_back(arc.edge);
        vertices.push_back(arc.to);
        if (arc.to == start && on_closed(vertices, edges)) return SearchEnd::found;
        frames.push_back({arc.to, 0});
    }
    return SearchEnd::exhausted;
}

int min_long_length(const Torus& torus) {
    const int t = long_radius(torus);
    const int L = torus.model().step_range();
    return std::max(3, 2 * ((t + L - 1) / L));
}

CycleAnswer answer(Verdict v, const WorkBudget& budget, std::uint64_t start, std::optional<CycleWitness> w = std::nullopt) {
    CycleAnswer a;
    a.verdict = v;
    a.value = std::move(w);
    a.work = budget.used() - start;
    a.budget = budget.limit();
    return a;
}

}  // namespace

std::optional<CycleWitness> find_wrapping_cycle(const OpenSubgraph& g, const EdgeMask& mask) {
    std::vector<char> done(g.vertex_count(), 0);
    for (std::uint32_t s = 0; s < g.vertex_count(); ++s) {
        if (done[s] || !has_arc(g, mask, s)) continue;
        bool oob = false;
        std::vector<char> seen;
        auto tr = wrapping_in_component(g, mask, s, nullptr, oob, &seen);
        if (tr) return g.witness(tr->vertices, tr->edges);
        for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
            if (seen[v]) done[v] = 1;
    }
    return std::nullopt;
}

CycleAnswer long_cycle_through_vertex(const OpenSubgraph& g, const EdgeMask& mask, std::uint32_t v, WorkBudget& budget,
                                      int max_length) {
    const std::uint64_t start = budget.used();
    const EdgeMask core = long_cycle_core(g, mask);
    if (!has_arc(g, core, v) || max_length < min_long_length(g.torus())) return answer(Verdict::no, budget, start);
    const bool unbounded = max_length == std::numeric_limits<int>::max();

    if (long_radius(g.torus()) <= 1) {
        auto sc = shortest_cycle_through(g, core, v, budget);
        if (sc.out_of_budget) return answer(Verdict::unknown, budget, start);
        if (sc.trail && static_cast<int>(sc.trail->edges.size()) <= max_length)
            return answer(Verdict::yes, budget, start, g.witness(sc.trail->vertices, sc.trail->edges));
        return answer(Verdict::no, budget, start);
    }
    if (unbounded) {
        bool oob = false;
        auto tr = wrapping_trail_through(g, core, v, budget, oob);
        if (oob) return answer(Verdict::unknown, budget, start);
        if (tr) return answer(Verdict::yes, budget, start, g.witness(tr->vertices, tr->edges));
    }
    std::optional<CycleWitness> found;
    auto end = search_trails(g, core, v, std::nullopt, max_length, budget,
                             [&](const std::vector<std::uint32_t>& vs, const std::vector<std::uint32_t>& es) {
                                 CycleWitness w = g.witness(vs, es);
                                 if (!w.long_cycle) return false;
                                 found = std::move(w);
                                 return true;
                             });
    if (end == SearchEnd::found) return answer(Verdict::yes, budget, start, std::move(found));
    if (end == SearchEnd::out_of_budget) return answer(Verdict::unknown, budget, start);
    return answer(Verdict::no, budget, start);
}

CycleAnswer long_cycle_through_edge(const OpenSubgraph& g, const EdgeMask& mask, std::uint32_t e, WorkBudget& budget) {
    const std::uint64_t start = budget.used();
    EdgeMask with = mask;
    with[e] = 1;
    const EdgeMask core = long_cycle_core(g, with);
    if (!core[e]) return answer(Verdict::no, budget, start);
    if (long_radius(g.torus()) <= 1) {
        auto path = shortest_path(g, core, g.upper(e), g.lower(e), e, budget);
        if (path.out_of_budget) return answer(Verdict::unknown, budget, start);
        std::vector<std::uint32_t> vs{g.lower(e)}, es{e};
        vs.insert(vs.end(), path.vertices.begin(), path.vertices.end());
        es.insert(es.end(), path.edges.begin(), path.edges.end());
        return answer(Verdict::yes, budget, start, g.witness(vs, es));
    }
    std::optional<CycleWitness> found;
    auto end = search_trails(g, core, g.lower(e), e, std::numeric_limits<int>::max(), budget,
                             [&](const std::vector<std::uint32_t>& vs, const std::vector<std::uint32_t>& es) {
                                 CycleWitness w = g.witness(vs, es);
                                 if (!w.long_cycle) return false;
                                 found = std::move(w);
                                 return true;
                             });
    if (end == SearchEnd::found) return answer(Verdict::yes, budget, start, std::move(found));
    if (end == SearchEnd::out_of_budget) return answer(Verdict::unknown, budget, start);
    return answer(Verdict::no, budget, start);
}

CycleAnswer find_long_cycle(const OpenSubgraph& g, const EdgeMask& mask, WorkBudget& budget) {
    const std::uint64_t start = budget.used();
    EdgeMask core = long_cycle_core(g, mask);
    auto first = std::find(core.begin(), core.end(), 1);
    if (first == core.end()) return answer(Verdict::no, budget, start);
    if (long_radius(g.torus()) <= 1) {
        auto a = long_cycle_through_edge(g, core, static_cast<std::uint32_t>(first - core.begin()), budget);
        a.work = budget.used() - start;
        return a;
    }
    if (auto w = find_wrapping_cycle(g, core); w && w->long_cycle) return answer(Verdict::yes, budget, start, std::move(w));
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
        if (!has_arc(g, core, v)) continue;
        auto a = long_cycle_through_vertex(g, core, v, budget);
        if (a.yes()) return answer(Verdict::yes, budget, start, std::move(a.value));
        if (a.unknown()) return answer(Verdict::unknown, budget, start);
        for (const auto& arc : g.arcs(v)) core[arc.edge] = 0;
        core = long_cycle_core(g, core);
    }
    return answer(Verdict::no, budget, start);
}

// ---------------------------------------------------------------------------

bool WrappingLabels::any() const {
    return std::any_of(vertex_wraps.begin(), vertex_wraps.end(), [](char c) { return c != 0; });
}

WrappingLabels has_wrapping_cluster(const BondConfig& cfg) {
    const Torus& torus = cfg.torus();
    const std::uint64_t n = torus.vertex_count();
    const int d = torus.dim();
    std::vector<VertexId> parent(n);
    std::iota(parent.begin(), parent.end(), VertexId{0});
    // offset[v] = lift(v) - lift(parent[v])
    std::vector<std::int64_t> offset(n * static_cast<std::uint64_t>(d), 0);
    std::vector<char> wraps(n, 0);
    auto off = [&](VertexId v) { return offset.data() + v * static_cast<std::uint64_t>(d); };

    std::vector<VertexId> path;
    std::vector<std::int64_t> acc(static_cast<std::size_t>(d));
    // Returns the root; writes lift(v) - lift(root) into out.
    auto find = [&](VertexId v, std::int64_t* out) {
        path.clear();
        while (parent[v] != v) {
            path.push_back(v);
            v = parent[v];
        }
        const VertexId root = v;
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t i = path.size(); i-- > 0;) {
            const VertexId u = path[i];
            for (int a = 0; a < d; ++a) {
                acc[static_cast<std::size_t>(a)] += off(u)[a];
                off(u)[a] = acc[static_cast<std::size_t>(a)];
            }
            parent[u] = root;
        }
        std::copy(acc.begin(), acc.end(), out);
        if (path.empty()) std::fill(out, out + d, 0);
        return root;
    };

    std::vector<std::int64_t> ou(static_cast<std::size_t>(d)), ov(static_cast<std::size_t>(d));
    for (EdgeId e : cfg.open_edges()) {
        const EdgeEnds ends = torus.endpoints(e);
        auto o = torus.offsets()[ends.dir];
        const VertexId ru = find(ends.lower, ou.data());
        const VertexId rv = find(ends.upper, ov.data());
        if (ru == rv) {
            for (int a = 0; a < d; ++a)
                if (ov[static_cast<std::size_t>(a)] - ou[static_cast<std::size_t>(a)] != o[static_cast<std::size_t>(a)]) {
                    wraps[ru] = 1;
                    break;
                }
            continue;
        }
        parent[rv] = ru;
        for (int a = 0; a < d; ++a)
            off(rv)[a] = o[static_cast<std::size_t>(a)] + ou[static_cast<std::size_t>(a)] - ov[static_cast<std::size_t>(a)];
        wraps[ru] = static_cast<char>(wraps[ru] | wraps[rv]);
    }
    WrappingLabels out;
    out.vertex_wraps.resize(n);
    std::vector<std::int64_t> scratch(static_cast<std::size_t>(d));
    for (VertexId v = 0; v < n; ++v) out.vertex_wraps[v] = wraps[find(v, scratch.data())];
    return out;
}

CycleAnswer vertex_in_long_cycle(const BondConfig& cfg, VertexId x, std::uint64_t budget) {
    cfg.torus().check_vertex(x);
    WorkBudget b(budget);
    Cluster c = component_of(cfg, x);
    if (c.cycle_rank() <= 0) return answer(Verdict::no, b, 0);
    OpenSubgraph g(cfg.torus(), c);
    return long_cycle_through_vertex(g, g.all_edges(), *g.local_vertex(x), b);
}

CycleAnswer cluster_contains_long_cycle(const BondConfig& cfg, const Cluster& cluster, std::uint64_t budget) {
    WorkBudget b(budget);
    if (cluster.cycle_rank() <= 0) return answer(Verdict::no, b, 0);
    OpenSubgraph g(cfg.torus(), cluster);
    return find_long_cycle(g, g.all_edges(), b);
}

CycleAnswer shortest_long_cycle_through(const BondConfig& cfg, VertexId x, int k, std::uint64_t budget) {
    cfg.torus().check_vertex(x);
    WorkBudget b(budget);
    Cluster c = component_of(cfg, x);
    if (c.cycle_rank() <= 0 || k <= 0) return answer(Verdict::no, b, 0);
    OpenSubgraph g(cfg.torus(), c);
    return long_cycle_through_vertex(g, g.all_edges(), *g.local_vertex(x), b, k);
}

BudgetedAnswer<std::optional<std::size_t>> shortest_long_cycle_length(const BondConfig& cfg, VertexId x, int max_length,
                                                                      std::uint64_t budget) {
    cfg.torus().check_vertex(x);
    BudgetedAnswer<std::optional<std::size_t>> out;
    out.budget = budget;
    WorkBudget b(budget);
    Cluster c = component_of(cfg, x);
    if (c.cycle_rank() <= 0) {
        out.verdict = Verdict::no;
        return out;
    }
    OpenSubgraph g(cfg.torus(), c);
    const std::uint32_t lx = *g.local_vertex(x);
    const EdgeMask all = g.all_edges();
    if (long_radius(cfg.torus()) <= 1) {
        auto a = long_cycle_through_vertex(g, all, lx, b, max_length);
        out.verdict = a.verdict;
        if (a.yes()) out.value = a.value->length();
        out.work = b.used();
        return out;
    }
    for (int k = min_long_length(cfg.torus()); k <= max_length; ++k) {
        auto a = long_cycle_through_vertex(g, all, lx, b, k);
        if (a.unknown()) {
            out.verdict = Verdict::unknown;
            out.work = b.used();
            return out;
        }
        if (a.yes()) {
            out.verdict = Verdict::yes;
            out.value = a.value->length();
            out.work = b.used();
            return out;
        }
    }
    out.verdict = Verdict::no;
    out.work = b.used();
    return out;
}

namespace {

// Longest fundamental cycle of a DFS forest of the masked graph.
std::size_t longest_fundamental_cycle(const OpenSubgraph& g, const EdgeMask& mask) {
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> depth(g.vertex_count(), kNone);
    std::vector<char> on_stack(g.vertex_count(), 0);
    std::size_t best = 0;
    struct Frame {
        std::uint32_t v, parent_edge;
        std::size_t next;
    };
    std::vector<Frame> stack;
    for (std::uint32_t s = 0; s < g.vertex_count(); ++s) {
        if (depth[s] != kNone || !has_arc(g, mask, s)) continue;
        depth[s] = 0;
        on_stack[s] = 1;
        stack.push_back({s, kNone, 0});
        while (!stack.empty()) {
            Frame& f = stack.back();
            auto arcs = g.arcs(f.v);
            if (f.next == arcs.size()) {
                on_stack[f.v] = 0;
                stack.pop_back();
                continue;
            }
            const auto arc = arcs[f.next++];
            if (!mask[arc.edge] || arc.edge == f.parent_edge) continue;
            if (depth[arc.to] == kNone) {
                depth[arc.to] = depth[f.v] + 1;
                on_stack[arc.to] = 1;
                stack.push_back({arc.to, arc.edge, 0});
            } else if (on_stack[arc.to]) {
                best = std::max<std::size_t>(best, depth[f.v] - depth[arc.to] + 1);
            }
        }
    }
    return best;
}

}  // namespace

LongCycleCount long_cycle_vertex_count(const OpenSubgraph& g, std::uint64_t budget) {
    LongCycleCount out;
    EdgeMask core = long_cycle_core(g, g.all_edges());
    if (long_radius(g.torus()) <= 1) {
        // Every cycle is long, so a vertex qualifies iff it has a non-bridge edge.
        out.work = g.edge_count();
        if (out.work > budget) {
            out.unknown = true;
            return out;
        }
        for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
            if (has_arc(g, core, v)) ++out.count;
        out.longest_witness = longest_fundamental_cycle(g, core);
        return out;
    }
    std::vector<char> marked(g.vertex_count(), 0);
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
        if (marked[v] || !has_arc(g, core, v)) continue;
        WorkBudget b(budget);
        auto a = long_cycle_through_vertex(g, core, v, b);
        out.work += a.work;
        if (a.yes()) {
            out.longest_witness = std::max(out.longest_witness, a.value->length());
            for (VertexId u : a.value->vertices) marked[*g.local_vertex(u)] = 1;
        } else if (a.no()) {
            for (const auto& arc : g.arcs(v)) core[arc.edge] = 0;
            core = long_cycle_core(g, core);
        } else {
            out.unknown = true;
        }
    }
    out.count = static_cast<std::uint64_t>(std::count(marked.begin(), marked.end(), 1));
    return out;
}

LongCycleCount long_cycle_vertex_count(const BondConfig& cfg, std::uint64_t budget) {
    LongCycleCount total;
    const ComponentLabels labels = label_components(cfg);
    for (std::uint32_t id = 0; id < labels.count(); ++id) {
        if (labels.edge_counts[id] < labels.sizes[id]) continue;  // tree
        Cluster c = extract_cluster(cfg, labels, id);
        OpenSubgraph g(cfg.torus(), c);
        auto part = long_cycle_vertex_count(g, budget);
        total.count += part.count;
        total.unknown = total.unknown || part.unknown;
        total.longest_witness = std::max(total.longest_witness, part.longest_witness);
        total.work += part.work;
    }
    return total;
}

// ---------------------------------------------------------------------------

namespace {

struct OutOfBudget {};

std::int64_t cycle_rank(const OpenSubgraph& g, const EdgeMask& mask) {
    int comps = 0;
    auto comp = mask_components(g, mask, comps);
    const auto edges = std::count(mask.begin(), mask.end(), 1);
    const auto verts = std::count_if(comp.begin(), comp.end(), [](int c) { return c >= 0; });
    return static_cast<std::int64_t>(edges) - static_cast<std::int64_t>(verts) + comps;
}

// True iff removing at most k edges from the masked graph destroys all long
// cycles. Branches on the edges of one long cycle: any hitting set must
// contain one of them.
bool removable_within(const OpenSubgraph& g, EdgeMask& mask, std::int64_t k, WorkBudget& budget) {
    auto a = find_long_cycle(g, mask, budget);
    if (a.unknown()) throw OutOfBudget{};
    if (a.no()) return true;
    if (k == 0) return false;
    for (EdgeId e : a.value->edges) {
        const std::uint32_t le = *g.local_edge(e);
        mask[le] = 0;
        const bool ok = removable_within(g, mask, k - 1, budget);
        mask[le] = 1;
        if (ok) return true;
    }
    return false;
}

}  // namespace

YAnswer compute_Y(const OpenSubgraph& g, std::uint64_t budget, std::optional<std::int64_t> special_bound) {
    YAnswer out;
    out.budget = budget;
    WorkBudget b(budget);
    const EdgeMask all = g.all_edges();
    out.value.surplus_bound = cycle_rank(g, all);
    out.value.special_bound = special_bound;
    if (long_radius(g.torus()) <= 1) {
        out.verdict = Verdict::yes;
        out.value.value = out.value.lower_bound = out.value.surplus_bound;
        return out;
    }
    std::int64_t upper = out.value.surplus_bound;
    if (special_bound) upper = std::min(upper, *special_bound);

    // Edge-disjoint long cycles each need their own removed edge.
    EdgeMask pack = long_cycle_core(g, all);
    std::int64_t lower = 0;
    while (true) {
        auto a = find_long_cycle(g, pack, b);
        if (a.unknown()) {
            out.value.lower_bound = lower;
            out.value.value = upper;
            out.work = b.used();
            return out;
        }
        if (a.no()) break;
        ++lower;
        for (EdgeId e : a.value->edges) pack[*g.local_edge(e)] = 0;
    }
    out.value.lower_bound = lower;
    try {
        EdgeMask mask = long_cycle_core(g, all);
        for (std::int64_t k = lower; k < upper; ++k) {
            if (removable_within(g, mask, k, b)) {
                upper = k;
                break;
            }
            out.value.lower_bound = k + 1;
        }
    } catch (const OutOfBudget&) {
        out.value.value = upper;
        out.work = b.used();
        return out;
    }
    out.verdict = Verdict::yes;
    out.value.value = upper;
    out.value.lower_bound = upper;
    out.work = b.used();
    return out;
}

InteriorSet interior_set_I(const BondConfig& cfg, VertexId root, std::uint64_t budget) {
    cfg.torus().check_vertex(root);
    InteriorSet out;
    Cluster c = component_of(cfg, root);
    if (c.cycle_rank() <= 0) {
        out.exact = true;
        return out;
    }
    OpenSubgraph g(cfg.torus(), c);
    const std::uint32_t lroot = *g.local_vertex(root);
    const EdgeMask all = g.all_edges();
    const EdgeMask core = long_cycle_core(g, all);
    WorkBudget b(budget);
    out.exact = true;
    for (std::uint32_t z = 0; z < g.vertex_count(); ++z) {
        if (!has_arc(g, core, z)) continue;
        bool member = false;
        auto end = search_trails(g, core, z, std::nullopt, std::numeric_limits<int>::max(), b,
                                 [&](const std::vector<std::uint32_t>& vs, const std::vector<std::uint32_t>& es) {
                                     std::vector<VertexId> global;
                                     for (auto v : vs) global.push_back(g.vertex(v));
                                     if (!is_long_vertex_set(g.torus(), global)) return false;
                                     if (z == lroot) return member = true;
                                     EdgeMask rest = all;
                                     for (auto e : es) rest[e] = 0;
                                     WorkBudget unlimited(std::numeric_limits<std::uint64_t>::max());
                                     member = shortest_path(g, rest, lroot, z, std::numeric_limits<std::uint32_t>::max(), unlimited).found;
                                     return member;
                                 });
        if (end == SearchEnd::out_of_budget) {
            out.exact = false;
            break;
        }
        if (member) out.members.push_back(g.vertex(z));
    }
    out.work = b.used();
    return out;
}

}  // namespace perco
