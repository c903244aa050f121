#include "perco/oracle.hpp"

#include <algorithm>
#include <bit>
#include <bitset>
#include <unordered_map>
#include <set>
#include <string>

#include "perco/cluster.hpp"

namespace perco::oracle {

namespace {

void guard(std::size_t n, std::size_t limit, const char* what) {
    if (n > limit)
        throw GuardExceeded(std::string(what) + ": " + std::to_string(n) + " edges exceeds the limit of " + std::to_string(limit));
}

std::vector<VertexId> canonical(const std::vector<VertexId>& closed) {
    const std::size_t n = closed.size() - 1;
    std::vector<VertexId> best, cand(n + 1);
    for (int dir = 0; dir < 2; ++dir) {
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i <= n; ++i) {
                const std::size_t j = (k + i) % n;
                cand[i] = dir == 0 ? closed[j] : closed[n - j];
            }
            if (best.empty() || cand < best) best = cand;
        }
    }
    return best;
}

std::uint64_t edge_mask(const OpenSubgraph& g, const CycleWitness& c) {
    std::uint64_t m = 0;
    for (EdgeId e : c.edges) m |= std::uint64_t{1} << *g.local_edge(e);
    return m;
}

}  // namespace

std::vector<CycleWitness> enumerate_all_cycles(const Torus& torus, std::span<const EdgeId> open_edges,
                                               std::size_t max_length, std::size_t max_edges) {
    const OpenSubgraph g(torus, open_edges);
    guard(g.edge_count(), max_edges, "cycle enumeration");
    std::set<std::vector<VertexId>> found;

    // Anchor every closed trail at its smallest edge e, traversed lower -> upper.
    std::vector<char> used(g.edge_count(), 0);
    std::vector<std::uint32_t> path;
    for (std::uint32_t e = 0; e < g.edge_count(); ++e) {
        const std::uint32_t home = g.lower(e);
        path.assign({home, g.upper(e)});
        used.assign(g.edge_count(), 0);
        used[e] = 1;
        auto dfs = [&](auto&& self, std::uint32_t v, std::size_t len) -> void {
            for (const auto& arc : g.arcs(v)) {
                if (arc.edge <= e || used[arc.edge] || len + 1 > max_length) continue;
                used[arc.edge] = 1;
                path.push_back(arc.to);
                if (arc.to == home) {
                    std::vector<VertexId> closed;
                    for (auto u : path) closed.push_back(g.vertex(u));
                    found.insert(canonical(closed));
                }
                self(self, arc.to, len + 1);
                path.pop_back();
                used[arc.edge] = 0;
            }
        };
        dfs(dfs, g.upper(e), 1);
    }
    std::vector<CycleWitness> out;
    for (const auto& vs : found) out.push_back(make_witness(torus, vs));
    std::stable_sort(out.begin(), out.end(), [](const CycleWitness& a, const CycleWitness& b) { return a.length() < b.length(); });
    return out;
}

std::vector<CycleWitness> enumerate_long_cycles(const Torus& torus, std::span<const EdgeId> open_edges, std::size_t max_edges) {
    auto all = enumerate_all_cycles(torus, open_edges, std::numeric_limits<std::size_t>::max(), max_edges);
    std::erase_if(all, [](const CycleWitness& c) { return !c.long_cycle; });
    return all;
}

bool contains_long_cycle(const Torus& torus, std::span<const EdgeId> open_edges) {
    return !enumerate_long_cycles(torus, open_edges).empty();
}

bool vertex_in_long_cycle(const Torus& torus, std::span<const EdgeId> open_edges, VertexId x) {
    for (const auto& c : enumerate_long_cycles(torus, open_edges))
        if (std::find(c.vertices.begin(), c.vertices.end(), x) != c.vertices.end()) return true;
    return false;
}

std::size_t shortest_long_cycle_through(const Torus& torus, std::span<const EdgeId> open_edges, VertexId x) {
    std::size_t best = 0;
    for (const auto& c : enumerate_long_cycles(torus, open_edges))
        if (std::find(c.vertices.begin(), c.vertices.end(), x) != c.vertices.end() && (best == 0 || c.length() < best))
            best = c.length();
    return best;
}

std::int64_t exact_Y_bruteforce(const Torus& torus, std::span<const EdgeId> open_edges, std::size_t max_edges) {
    const OpenSubgraph g(torus, open_edges);
    guard(g.edge_count(), std::min<std::size_t>(max_edges, 64), "exact Y");
    std::vector<std::uint64_t> cycles;
    std::uint64_t candidates = 0;
    for (const auto& c : enumerate_long_cycles(torus, open_edges, max_edges)) {
        cycles.push_back(edge_mask(g, c));
        candidates |= cycles.back();
    }
    if (cycles.empty()) return 0;
    std::vector<std::uint32_t> cand;
    for (std::uint32_t e = 0; e < 64; ++e)
        if (candidates >> e & 1u) cand.push_back(e);
    const std::size_t n = cand.size();
    // Subsets of the candidate edges by increasing size.
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            std::uint64_t removed = 0;
            for (auto i : idx) removed |= std::uint64_t{1} << cand[i];
            if (std::all_of(cycles.begin(), cycles.end(), [&](std::uint64_t c) { return (c & removed) != 0; }))
                return static_cast<std::int64_t>(k);
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return static_cast<std::int64_t>(n);
}

std::vector<VertexId> interior_set_bruteforce(const Torus& torus, std::span<const EdgeId> open_edges, VertexId root) {
    const auto cycles = enumerate_long_cycles(torus, open_edges);
    std::set<VertexId> members;
    for (const auto& c : cycles) {
        std::set<EdgeId> on_cycle(c.edges.begin(), c.edges.end());
        std::vector<EdgeId> rest;
        for (EdgeId e : open_edges)
            if (!on_cycle.count(e)) rest.push_back(e);
        const BondConfig cfg = BondConfig::from_open_edges(torus, rest);
        const Cluster reach = component_of(cfg, root);
        for (VertexId z : c.vertices)
            if (std::binary_search(reach.vertices.begin(), reach.vertices.end(), z)) members.insert(z);
    }
    // z must also share root's cluster in the full graph, which reach implies.
    return {members.begin(), members.end()};
}

ExhaustiveResult exhaustive_config_check(const Torus& torus, const Rational& p, const Event& event, std::size_t max_edges) {
    const std::uint64_t m = torus.edge_count();
    guard(m, std::min<std::size_t>(max_edges, 30), "exhaustive enumeration");
    if (p < 0 || p > 1) throw std::invalid_argument("p must lie in [0, 1]");
    ExhaustiveResult out;
    out.hits.assign(m + 1, 0);
    std::vector<EdgeId> open;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        open.clear();
        for (std::uint64_t e = 0; e < m; ++e)
            if (mask >> e & 1u) open.push_back(e);
        const BondConfig cfg = BondConfig::from_open_edges(torus, open);
        if (event(cfg)) ++out.hits[static_cast<std::size_t>(std::popcount(mask))];
    }
    const Rational q = 1 - p;
    out.probability = 0;
    for (std::uint64_t k = 0; k <= m; ++k) {
        if (out.hits[k] == 0) continue;
        Rational term = out.hits[k];
        for (std::uint64_t i = 0; i < k; ++i) term *= p;
        for (std::uint64_t i = k; i < m; ++i) term *= q;
        out.probability += term;
    }
    return out;
}

double to_double(const Rational& q) { return static_cast<double>(q); }

namespace {

using EdgeSet = std::bitset<kMaxBallEdges>;

struct BallGraph {
    std::vector<VertexId> vertices;  // frame ids
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj;  // (neighbour, local edge)
};

class PathSearch {
public:
    PathSearch(const BallGraph& g, int k, std::uint64_t max_work) : g_(g), k_(k), max_work_(max_work) {}

    /// Vertex-simple open paths of length <= k from s, grouped by endpoint.
    const std::vector<std::vector<EdgeSet>>& from(std::uint32_t s) {
        auto it = cache_.find(s);
        if (it != cache_.end()) return it->second;
        auto& out = cache_[s];
        out.assign(g_.vertices.size(), {});
        std::vector<char> on_path(g_.vertices.size(), 0);
        EdgeSet cur;
        extend(s, 0, on_path, cur, out);
        return out;
    }

    void charge() {
        if (++work_ > max_work_) throw GuardExceeded("property (b) search exceeded its work limit");
    }

private:
    void extend(std::uint32_t v, int len, std::vector<char>& on_path, EdgeSet& cur, std::vector<std::vector<EdgeSet>>& out) {
        charge();
        on_path[v] = 1;
        out[v].push_back(cur);
        if (len < k_) {
            for (auto [u, e] : g_.adj[v]) {
                if (on_path[u]) continue;
                cur.set(e);
                extend(u, len + 1, on_path, cur, out);
                cur.reset(e);
            }
        }
        on_path[v] = 0;
    }

    const BallGraph& g_;
    int k_;
    std::uint64_t max_work_;
    std::uint64_t work_ = 0;
    std::unordered_map<std::uint32_t, std::vector<std::vector<EdgeSet>>> cache_;
};

}  // namespace

PropertyBReport verify_coupling_property_b(const CouplingSample& sample, int kmax, std::uint64_t max_work) {
    if (sample.truncated()) throw std::invalid_argument("property (b) needs an untruncated sample");
    PropertyBReport report;
    BondConfig plain = sample.omega();
    plain.instrument(false);
    const IntrinsicBall torus_ball = intrinsic_ball(plain, 0, kmax);
    const Box& frame = sample.frame();
    const WindowView view{sample};
    auto lattice_open = [&](EdgeId e) { return sample.lattice_open(e); };

    for (int k = 0; k <= kmax; ++k) {
        BallGraph g;
        std::unordered_map<VertexId, std::uint32_t> local;
        std::vector<std::uint32_t> discrepant;
        bfs_open(view, frame.center_vertex(), k, lattice_open, [&](VertexId v, int) {
            const auto id = static_cast<std::uint32_t>(g.vertices.size());
            local.emplace(v, id);
            g.vertices.push_back(v);
            const VertexId x = sample.torus_vertex(v);
            if (!torus_ball.contains(x) || torus_ball.distance(x) > k) discrepant.push_back(id);
            return true;
        });
        if (discrepant.empty()) continue;

        g.adj.resize(g.vertices.size());
        std::uint32_t edges = 0;
        for (std::uint32_t a = 0; a < g.vertices.size(); ++a) {
            view.for_each_incident(g.vertices[a], [&](const Incidence& inc) {
                if (!inc.forward || !lattice_open(inc.edge)) return;
                auto it = local.find(inc.neighbor);
                if (it == local.end()) return;
                if (edges == kMaxBallEdges) throw GuardExceeded("lattice ball too large for the property (b) oracle");
                g.adj[a].emplace_back(it->second, edges);
                g.adj[it->second].emplace_back(a, edges);
                ++edges;
            });
        }
        std::unordered_map<VertexId, std::vector<std::uint32_t>> classes;
        for (std::uint32_t a = 0; a < g.vertices.size(); ++a) classes[sample.torus_vertex(g.vertices[a])].push_back(a);

        PathSearch paths(g, k, max_work);
        const auto& from_origin = paths.from(local.at(frame.center_vertex()));
        for (std::uint32_t y : discrepant) {
            ++report.discrepancies;
            bool found = false;
            for (std::uint32_t v1 = 0; v1 < g.vertices.size() && !found; ++v1) {
                const auto& cls = classes.at(sample.torus_vertex(g.vertices[v1]));
                if (cls.size() < 2) continue;
                const std::vector<EdgeSet> to_y = paths.from(v1)[y];
                for (const EdgeSet& p4 : to_y) {
                    for (std::uint32_t v2 : cls) {
                        if (v2 == v1) continue;
                        for (std::uint32_t z = 0; z < g.vertices.size() && !found; ++z) {
                            if (from_origin[z].empty()) continue;
                            const auto& from_z = paths.from(z);
                            if (from_z[v1].empty() || from_z[v2].empty()) continue;
                            for (const EdgeSet& p1 : from_origin[z]) {
                                if ((p1 & p4).any()) continue;
                                const EdgeSet used = p1 | p4;
                                for (const EdgeSet& p2 : from_z[v1]) {
                                    paths.charge();
                                    if ((p2 & used).any()) continue;
                                    const EdgeSet used2 = used | p2;
                                    for (const EdgeSet& p3 : from_z[v2]) {
                                        if ((p3 & used2).any()) continue;
                                        report.witnesses.push_back(
                                            {k, g.vertices[y], g.vertices[z], g.vertices[v1], g.vertices[v2]});
                                        found = true;
                                        break;
                                    }
                                    if (found) break;
                                }
                                if (found) break;
                            }
                        }
                        if (found) break;
                    }
                    if (found) break;
                }
            }
            if (!found) report.unwitnessed.emplace_back(k, g.vertices[y]);
        }
    }
    return report;
}

void Agreement::merge(const Agreement& other) {
    queries += other.queries;
    unknown += other.unknown;
    disagreements += other.disagreements;
    details.insert(details.end(), other.details.begin(), other.details.end());
}

Agreement compare_with_oracle(const Torus& torus, std::span<const EdgeId> open_edges, std::uint64_t budget) {
    Agreement out;
    const BondConfig cfg = BondConfig::from_open_edges(torus, open_edges);
    const auto long_cycles = enumerate_long_cycles(torus, open_edges);
    std::set<VertexId> on_long;
    for (const auto& c : long_cycles) on_long.insert(c.vertices.begin(), c.vertices.end());

    auto record = [&](Verdict v, bool truth, const std::string& what) {
        ++out.queries;
        if (v == Verdict::unknown) {
            ++out.unknown;
        } else if ((v == Verdict::yes) != truth) {
            ++out.disagreements;
            out.details.push_back(what + ": main path says " + to_string(v));
        }
    };

    for (const Cluster& c : all_components(cfg)) {
        if (c.cycle_rank() <= 0) continue;
        const bool truth =
            std::any_of(c.vertices.begin(), c.vertices.end(), [&](VertexId v) { return on_long.count(v) != 0; });
        const std::string where = "cluster " + std::to_string(c.root);
        const CycleAnswer a = cluster_contains_long_cycle(cfg, c, budget);
        record(a.verdict, truth, where + " long cycle");
        if (a.yes()) {
            try {
                validate_witness(torus, *a.value, &cfg);
                if (!a.value->long_cycle) throw MalformedCycle("witness is not long");
            } catch (const MalformedCycle& e) {
                ++out.disagreements;
                out.details.push_back(where + ": bad witness: " + e.what());
            }
        }
        const YAnswer y = compute_Y(torus, c, budget);
        ++out.queries;
        if (y.unknown()) {
            ++out.unknown;
        } else {
            const std::int64_t exact = exact_Y_bruteforce(torus, c.edges);
            if (y.value.value != exact) {
                ++out.disagreements;
                out.details.push_back(where + ": Y main " + std::to_string(y.value.value) + " oracle " + std::to_string(exact));
            }
        }
    }
    for (VertexId x = 0; x < torus.vertex_count(); ++x)
        record(vertex_in_long_cycle(cfg, x, budget).verdict, on_long.count(x) != 0, "vertex " + std::to_string(x));
    return out;
}

}  // namespace perco::oracle
