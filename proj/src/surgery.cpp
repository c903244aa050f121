#include "perco/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "perco/cluster.hpp"
#include "perco/parallel.hpp"
#include "perco/rng.hpp"
#include "perco/stats.hpp"

namespace perco {

namespace {

constexpr std::uint64_t kTagSample = 0x5347;
constexpr std::uint64_t kTagRepresentative = 0x5250;

std::vector<EdgeId> sorted(std::vector<EdgeId> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

bool Stage1Result::is_ancestor(std::uint32_t anc, std::uint32_t v) const {
    while (depth[v] > depth[anc]) v = static_cast<std::uint32_t>(parent[v]);
    return v == anc;
}

std::vector<EdgeId> Stage1Result::tree_edges() const {
    std::vector<EdgeId> out(parent_edge.begin() + (parent_edge.empty() ? 0 : 1), parent_edge.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<EdgeId> Stage1Result::root_path_edges(std::uint32_t v) const {
    std::vector<EdgeId> out;
    while (parent[v] >= 0) {
        out.push_back(parent_edge[v]);
        v = static_cast<std::uint32_t>(parent[v]);
    }
    return out;
}

Stage1Result depth_first_explore(const BondConfig& cfg, VertexId x, bool verify) {
    const Torus& torus = cfg.torus();
    torus.check_vertex(x);
    Stage1Result s;
    s.root = x;

    std::vector<std::vector<Incidence>> inc;
    std::vector<std::size_t> cursor;
    std::vector<int> remaining;  // verification only
    std::unordered_set<EdgeId> W;

    auto discover = [&](VertexId v, std::int64_t parent, EdgeId via, int depth) {
        const auto id = static_cast<std::uint32_t>(s.vertices.size());
        s.index.emplace(v, id);
        s.vertices.push_back(v);
        s.parent.push_back(parent);
        s.parent_edge.push_back(via);
        s.depth.push_back(depth);
        inc.push_back(torus.incident(v));
        cursor.push_back(0);
        if (verify) {
            int free = 0;
            for (const auto& i : inc.back()) free += W.count(i.edge) ? 0 : 1;
            remaining.push_back(free);
        }
        return id;
    };

    auto mark = [&](const Incidence& i, std::uint32_t from) {
        W.insert(i.edge);
        if (!verify) return;
        --remaining[from];
        auto it = s.index.find(i.neighbor);
        if (it != s.index.end()) --remaining[it->second];
    };

    // Brute-force reading of the selection rule: the extendable vertices
    // must lie on one root path with a unique deepest element, which must be
    // the vertex the stack offers.
    auto check_selection = [&](std::uint32_t chosen) {
        std::int64_t deepest = -1;
        int best = -1, at_best = 0;
        std::vector<std::uint32_t> ext;
        for (std::uint32_t v = 0; v < s.vertices.size(); ++v) {
            if (remaining[v] <= 0) continue;
            ext.push_back(v);
            if (s.depth[v] > best) {
                best = s.depth[v];
                deepest = v;
                at_best = 1;
            } else if (s.depth[v] == best) {
                ++at_best;
            }
        }
        bool ok = at_best == 1 && deepest == chosen;
        if (ok)
            for (auto v : ext) ok = ok && s.is_ancestor(v, chosen);
        if (!ok) ++s.parent_uniqueness_violations;
    };

    discover(x, -1, 0, 0);
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        const std::uint32_t a = stack.back();
        auto& list = inc[a];
        std::size_t& c = cursor[a];
        while (c < list.size() && W.count(list[c].edge)) ++c;
        if (c == list.size()) {
            stack.pop_back();
            continue;
        }
        if (verify) check_selection(a);
        const Incidence chosen = list[c];
        ++s.steps;
        mark(chosen, a);
        if (s.contains(chosen.neighbor)) {
            s.surplus.push_back(chosen.edge);
            s.surplus_ends.emplace_back(a, s.position(chosen.neighbor));
            continue;
        }
        const bool open = cfg.is_open(chosen.edge);
        s.explored.push_back(chosen.edge);
        s.explored_open.push_back(open);
        if (open) stack.push_back(discover(chosen.neighbor, a, chosen.edge, s.depth[a] + 1));
    }
    return s;
}

BranchOrder order_branch_vertices(const Stage1Result& s1) {
    BranchOrder out;
    const auto n = static_cast<std::uint32_t>(s1.vertices.size());
    if (s1.surplus.size() != s1.surplus_ends.size()) throw std::logic_error("stage-1 surplus records are inconsistent");
    std::vector<std::vector<EdgeId>> hanging(n);
    for (std::size_t k = 0; k < s1.surplus.size(); ++k) {
        const auto [u, w] = s1.surplus_ends[k];
        if (u >= n || w >= n) throw std::logic_error("surplus edge leaves the explored vertex set");
        std::uint32_t b;
        if (s1.is_ancestor(w, u)) {
            b = w;
        } else if (s1.is_ancestor(u, w)) {
            b = u;
        } else {
            ++out.surplus_ancestry_violations;
            b = s1.depth[u] <= s1.depth[w] ? u : w;
        }
        hanging[b].push_back(s1.surplus[k]);
    }

    // anchor[v]: nearest ancestor-or-self of v that is a branch vertex or the root
    std::vector<std::uint32_t> anchor(n, 0);
    std::vector<int> aux_depth(n, 0);
    std::vector<std::uint32_t> members;
    for (std::uint32_t v = 0; v < n; ++v) {
        const bool branch = !hanging[v].empty();
        if (v == 0) {
            if (branch) members.push_back(v);
            continue;
        }
        const std::uint32_t up = anchor[static_cast<std::uint32_t>(s1.parent[v])];
        anchor[v] = branch ? v : up;
        if (branch) {
            aux_depth[v] = aux_depth[up] + 1;
            members.push_back(v);
        }
    }
    std::sort(members.begin(), members.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (aux_depth[a] != aux_depth[b]) return aux_depth[a] < aux_depth[b];
        if (s1.depth[a] != s1.depth[b]) return s1.depth[a] < s1.depth[b];
        return s1.vertices[a] < s1.vertices[b];
    });
    for (auto v : members) {
        out.branch.push_back(s1.vertices[v]);
        out.aux_parent.push_back(v == 0 ? s1.root : s1.vertices[anchor[static_cast<std::uint32_t>(s1.parent[v])]]);
        out.aux_depth.push_back(aux_depth[v]);
        out.edges.push_back(sorted(hanging[v]));
    }
    return out;
}

Stage2Result second_stage(const BondConfig& cfg, const Stage1Result& s1, std::uint64_t budget) {
    Stage2Result out;
    out.root = s1.root;
    out.order = order_branch_vertices(s1);

    std::vector<EdgeId> tree = s1.tree_edges();
    std::vector<EdgeId> span = tree;
    span.insert(span.end(), s1.surplus.begin(), s1.surplus.end());
    std::sort(span.begin(), span.end());
    OpenSubgraph g(cfg.torus(), span);
    EdgeMask mask(g.edge_count(), 0);
    for (EdgeId e : tree) mask[*g.local_edge(e)] = 1;

    for (std::size_t i = out.order.branch.size(); i-- > 0;) {
        for (EdgeId e : out.order.edges[i]) {
            const std::uint32_t le = *g.local_edge(e);
            mask[le] = 1;
            WorkBudget work(budget);
            const CycleAnswer ans = long_cycle_through_edge(g, mask, le, work);
            out.work += work.used();
            if (ans.unknown()) {
                out.valid = false;
                mask[le] = 0;
                break;
            }
            if (ans.yes()) {
                out.Z.push_back(e);
                mask[le] = 0;
                continue;
            }
            const bool open = cfg.is_open(e);
            out.F.push_back(e);
            out.F_open.push_back(open);
            if (!open) mask[le] = 0;
        }
        if (!out.valid) break;
    }
    for (std::uint32_t le = 0; le < g.edge_count(); ++le)
        if (mask[le]) out.G.push_back(g.edge(le));
    return out;
}

namespace {

bool contains_sorted(const std::vector<EdgeId>& v, EdgeId e) { return std::binary_search(v.begin(), v.end(), e); }

}  // namespace

AuditedExploration audit_exploration(const BondConfig& cfg, VertexId x, std::uint64_t budget) {
    BondConfig probe = cfg;
    probe.instrument();
    AuditedExploration out;
    SurgeryAudit& audit = out.audit;
    Stage1Result& s1 = out.stage1;
    s1 = depth_first_explore(probe, x, true);
    audit.steps = s1.steps;
    audit.parent_uniqueness = s1.parent_uniqueness_violations;
    for (EdgeId e : s1.surplus) audit.stage1_reads += probe.read_count(e) != 0;
    for (EdgeId e : s1.explored) audit.stage1_reads += probe.read_count(e) != 1;

    probe.clear_read_log();
    Stage2Result& s2 = out.stage2;
    s2 = second_stage(probe, s1, budget);
    for (EdgeId e : s2.Z) audit.stage2_reads += probe.read_count(e) != 0;
    for (EdgeId e : s2.F) audit.stage2_reads += probe.read_count(e) != 1;
    for (EdgeId e : s1.explored) audit.stage2_reads += probe.read_count(e) != 0;
    audit.surplus_ancestry = s2.order.surplus_ancestry_violations;
    if (!s2.valid) {
        audit.inconclusive = true;
        return out;
    }

    const Torus& torus = cfg.torus();
    const std::vector<EdgeId> E = sorted(s1.explored), U = sorted(s1.surplus), F = sorted(s2.F), Z = sorted(s2.Z);
    const std::vector<EdgeId> tree = s1.tree_edges();

    std::vector<EdgeId> FZ;
    std::merge(F.begin(), F.end(), Z.begin(), Z.end(), std::back_inserter(FZ));
    audit.partition += FZ != U;
    audit.partition += std::adjacent_find(FZ.begin(), FZ.end()) != FZ.end();
    std::vector<EdgeId> EU;
    std::merge(E.begin(), E.end(), U.begin(), U.end(), std::back_inserter(EU));
    audit.partition += std::adjacent_find(EU.begin(), EU.end()) != EU.end();
    std::vector<EdgeId> incident;
    for (VertexId v : s1.vertices)
        for (const auto& i : torus.incident(v)) incident.push_back(i.edge);
    std::sort(incident.begin(), incident.end());
    incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
    audit.partition += incident != EU;
    std::vector<EdgeId> open_E;
    for (EdgeId e : E)
        if (cfg.peek(e)) open_E.push_back(e);
    audit.partition += open_E != tree;
    for (EdgeId e : U) {
        const auto ends = torus.endpoints(e);
        audit.partition += !s1.contains(ends.lower) || !s1.contains(ends.upper);
    }

    auto no_long_cycle = [&](const std::vector<EdgeId>& edges, std::uint64_t& counter) {
        OpenSubgraph g(torus, edges);
        WorkBudget work(budget);
        const CycleAnswer ans = find_long_cycle(g, g.all_edges(), work);
        if (ans.unknown()) audit.inconclusive = true;
        if (ans.yes()) ++counter;
    };
    no_long_cycle(s2.G, audit.long_cycle_in_G);

    Cluster base;
    base.root = x;
    base.vertices = s1.vertices;
    std::sort(base.vertices.begin(), base.vertices.end());
    for (EdgeId e : s2.Z) {
        Cluster c = base;
        c.edges = s2.G;
        c.edges.insert(std::upper_bound(c.edges.begin(), c.edges.end(), e), e);
        const CycleAnswer ans = cluster_contains_long_cycle(cfg, c, budget);
        if (ans.unknown()) {
            audit.inconclusive = true;
            continue;
        }
        const bool through = ans.yes() && ans.value &&
                             std::find(ans.value->edges.begin(), ans.value->edges.end(), e) != ans.value->edges.end();
        audit.certificate += !through;
    }

    std::vector<EdgeId> forced;
    for (EdgeId e : EU)
        if (cfg.peek(e) && !contains_sorted(Z, e)) forced.push_back(e);
    no_long_cycle(forced, audit.kill_switch);
    return out;
}

std::string exploration_json(const Torus& torus, const Stage1Result& s1, const Stage2Result& s2) {
    std::vector<VertexId> X = s1.vertices;
    std::sort(X.begin(), X.end());
    std::vector<EdgeId> open_E;
    for (std::size_t i = 0; i < s1.explored.size(); ++i)
        if (s1.explored_open[i]) open_E.push_back(s1.explored[i]);
    nlohmann::json j;
    j["d"] = torus.dim();
    j["r"] = torus.side();
    j["model"] = torus.model().name();
    j["L"] = torus.model().step_range();
    j["root"] = s1.root;
    j["X"] = X;
    j["T"] = s1.tree_edges();
    j["E"] = sorted(s1.explored);
    j["E_open"] = sorted(open_E);
    j["U"] = sorted(s1.surplus);
    j["B"] = s2.order.branch;
    j["aux_parent"] = s2.order.aux_parent;
    j["F"] = sorted(s2.F);
    j["Z"] = sorted(s2.Z);
    j["G"] = s2.G;
    j["valid"] = s2.valid;
    j["steps"] = s1.steps;
    j["work"] = s2.work;
    return j.dump();
}

double Ydelta_threshold(const Torus& torus, double delta) {
    if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
    const double c = std::cbrt(static_cast<double>(torus.vertex_count()));
    return delta * c * c;
}

BudgetedAnswer<std::int64_t> compute_Ydelta(const BondConfig& cfg, double delta, std::uint64_t budget) {
    const double threshold = Ydelta_threshold(cfg.torus(), delta);
    BudgetedAnswer<std::int64_t> out;
    out.budget = budget;
    out.verdict = Verdict::yes;
    const ComponentLabels labels = label_components(cfg);
    for (std::uint32_t id = 0; id < labels.count(); ++id) {
        if (!(static_cast<double>(labels.sizes[id]) > threshold)) break;
        if (labels.edge_counts[id] + 1 <= labels.sizes[id]) continue;
        const YAnswer y = compute_Y(cfg.torus(), extract_cluster(cfg, labels, id), budget);
        out.work += y.work;
        if (y.unknown()) {
            out.verdict = Verdict::unknown;
            return out;
        }
        out.value += y.value.value;
    }
    return out;
}

std::optional<double> special_edge_weight(const BondConfig& cfg, double delta, std::mt19937_64& rng,
                                          std::uint64_t budget) {
    const double threshold = Ydelta_threshold(cfg.torus(), delta);
    const ComponentLabels labels = label_components(cfg);
    std::uint64_t special = 0;
    for (std::uint32_t id = 0; id < labels.count(); ++id) {
        if (!(static_cast<double>(labels.sizes[id]) > threshold)) break;
        const Cluster c = extract_cluster(cfg, labels, id);
        std::uniform_int_distribution<std::size_t> pick(0, c.size() - 1);
        const VertexId rep = c.vertices[pick(rng)];
        const Stage2Result s2 = second_stage(cfg, depth_first_explore(cfg, rep), budget);
        if (!s2.valid) return std::nullopt;
        special += s2.Z.size();
    }
    return std::pow(1.0 - cfg.p(), static_cast<double>(special));
}

YdeltaEstimate estimate_p_Ydelta_zero(const Torus& torus, double p, double delta, YdeltaMethod method,
                                      std::size_t replicas, std::uint64_t seed, std::uint64_t budget, int threads) {
    check_probability(p);
    Ydelta_threshold(torus, delta);
    std::vector<double> value(replicas, 0.0);
    std::vector<char> kept(replicas, 0);
    parallel_for(replicas, threads, [&](std::size_t i) {
        const BondConfig cfg = BondConfig::sample(torus, p, derive_seed(seed, kTagSample, i));
        if (method == YdeltaMethod::direct) {
            const auto y = compute_Ydelta(cfg, delta, budget);
            if (y.unknown()) return;
            value[i] = y.value == 0 ? 1.0 : 0.0;
        } else {
            std::mt19937_64 rng(derive_seed(seed, kTagRepresentative, i));
            const auto w = special_edge_weight(cfg, delta, rng, budget);
            if (!w) return;
            value[i] = *w;
        }
        kept[i] = 1;
    });
    std::vector<double> clean;
    YdeltaEstimate out;
    out.replicas = replicas;
    for (std::size_t i = 0; i < replicas; ++i) {
        if (!kept[i]) {
            ++out.discarded;
            continue;
        }
        clean.push_back(value[i]);
        if (method == YdeltaMethod::direct && value[i] == 1.0) ++out.zero_count;
    }
    const Summary s = summarize(clean);
    out.mean = s.mean;
    out.stderr_ = s.stderr_();
    return out;
}

}  // namespace perco
