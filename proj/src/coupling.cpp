#include "perco/coupling.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "perco/cluster.hpp"
#include "perco/rng.hpp"

namespace perco {

namespace {

constexpr std::uint64_t kTagTorus = 0x544f;
constexpr std::uint64_t kTagFiller = 0x4649;

}  // namespace

CouplingSample::CouplingSample(BondConfig omega, int window_factor, LazyBonds filler)
    : omega_(std::move(omega)),
      window_factor_(window_factor),
      window_radius_(window_factor * omega_.torus().side()),
      frame_(Point(static_cast<std::size_t>(omega_.torus().dim()), 0),
             window_radius_ + omega_.torus().model().step_range(), omega_.torus().model()),
      filler_(filler) {
    if (window_factor < 2) throw std::invalid_argument("window factor K must be at least 2");
}

bool CouplingSample::edge_in_window(EdgeId e) const {
    const auto ends = frame_.endpoints(e);
    return in_window(ends.lower) && in_window(ends.upper);
}

VertexId CouplingSample::torus_vertex(VertexId frame_vertex) const {
    return torus().vertex(frame_.coords(frame_vertex));
}

EdgeId CouplingSample::torus_class(EdgeId e) const {
    const auto ends = frame_.endpoints(e);
    return torus().edge(torus_vertex(ends.lower), ends.dir);
}

bool CouplingSample::lattice_open(EdgeId e) const {
    auto it = explored_.find(e);
    if (it != explored_.end()) return it->second != 0;
    return filler_.is_open(e);
}

bool CouplingSample::is_ghost(EdgeId e) const {
    if (!edge_in_window(e)) return false;
    auto it = consumed_.find(torus_class(e));
    return it != consumed_.end() && it->second != e;
}

std::vector<EdgeId> CouplingSample::occupied() const {
    std::vector<EdgeId> out;
    for (const auto& [e, open] : explored_)
        if (open) out.push_back(e);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<EdgeId> CouplingSample::vacant() const {
    std::vector<EdgeId> out;
    for (const auto& [e, open] : explored_)
        if (!open) out.push_back(e);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<EdgeId> CouplingSample::ghosts() const {
    std::vector<EdgeId> out;
    if (consumed_.empty()) return out;
    const int h = frame_.offsets().size();
    for (VertexId v = 0; v < frame_.vertex_count(); ++v) {
        if (!in_window(v)) continue;
        for (int dir = 0; dir < h; ++dir) {
            const auto u = frame_.step(v, dir, true);
            if (!u || !in_window(*u)) continue;
            const EdgeId e = frame_.edge(v, dir);
            if (is_ghost(e)) out.push_back(e);
        }
    }
    return out;
}

std::vector<EdgeId> CouplingSample::torus_occupied() const {
    std::vector<EdgeId> out;
    for (const auto& [c, e] : consumed_)
        if (explored_.at(e)) out.push_back(c);
    std::sort(out.begin(), out.end());
    return out;
}

void CouplingSample::explore(std::uint64_t step_budget) {
    using Item = std::pair<int, EdgeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> active;
    std::unordered_set<EdgeId> queued;

    auto activate = [&](VertexId v, int d) {
        frame_.for_each_incident(v, [&](const Incidence& inc) {
            if (explored_.count(inc.edge) || consumed_.count(torus_class(inc.edge))) return;
            if (queued.insert(inc.edge).second) active.emplace(d, inc.edge);
        });
    };

    const VertexId origin = frame_.center_vertex();
    dist_[origin] = 0;
    activate(origin, 0);
    while (!active.empty()) {
        const auto [d, e] = active.top();
        active.pop();
        const EdgeId c = torus_class(e);
        if (consumed_.count(c)) continue;  // ghosted while active
        if (!edge_in_window(e) || steps_ >= step_budget) {
            truncated_ = true;
            return;
        }
        ++steps_;
        consumed_.emplace(c, e);
        const bool open = omega_.is_open(c);
        explored_.emplace(e, open);
        order_.push_back(e);
        if (!open) continue;
        const auto ends = frame_.endpoints(e);
        for (VertexId w : {ends.lower, ends.upper}) {
            if (dist_.count(w)) continue;
            dist_.emplace(w, d + 1);
            activate(w, d + 1);
        }
    }
}

CouplingSample coupled_sample(BondConfig omega, std::uint64_t filler_seed, int window_factor, std::uint64_t step_budget) {
    const LazyBonds filler{filler_seed, omega.p()};
    CouplingSample s(std::move(omega), window_factor, filler);
    s.explore(step_budget);
    return s;
}

CouplingSample coupled_sample(const Torus& torus, double p, std::uint64_t seed, int window_factor,
                              std::uint64_t step_budget) {
    check_probability(p);
    if (window_factor < 2) throw std::invalid_argument("window factor K must be at least 2");
    return coupled_sample(BondConfig::sample(torus, p, derive_seed(seed, kTagTorus)), derive_seed(seed, kTagFiller),
                          window_factor, step_budget);
}

InclusionReport check_inclusion_property(const CouplingSample& sample, const std::vector<int>& ks) {
    InclusionReport out;
    out.ks = ks;
    out.violations_per_k.assign(ks.size(), 0);
    if (sample.truncated() || ks.empty()) return out;
    out.applicable = true;
    const int kmax = *std::max_element(ks.begin(), ks.end());

    BondConfig plain = sample.omega();
    plain.instrument(false);
    const IntrinsicBall ball = intrinsic_ball(plain, 0, kmax);

    std::unordered_map<VertexId, int> lattice;  // torus vertex -> least lattice distance of a copy
    bfs_open(
        WindowView{sample}, sample.frame().center_vertex(), kmax, [&](EdgeId e) { return sample.lattice_open(e); },
        [&](VertexId v, int d) {
            lattice.emplace(sample.torus_vertex(v), d);
            return true;
        });

    for (VertexId x : ball.vertices()) {
        const int dt = ball.distance(x);
        auto it = lattice.find(x);
        const int dl = it == lattice.end() ? -1 : it->second;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const int k = ks[i];
            if (dt > k || (dl >= 0 && dl <= k)) continue;
            ++out.violations_per_k[i];
            out.violations.push_back({k, x, dt, dl});
        }
    }
    return out;
}

std::string coupling_json(const CouplingSample& sample) {
    nlohmann::json j;
    const Torus& t = sample.torus();
    j["d"] = t.dim();
    j["r"] = t.side();
    j["model"] = t.model().name();
    j["L"] = t.model().step_range();
    j["p"] = sample.omega().p();
    j["seed"] = sample.omega().seed();
    j["K"] = sample.window_factor();
    j["window_radius"] = sample.window_radius();
    j["frame_radius"] = sample.frame().radius();
    j["truncated"] = sample.truncated();
    j["steps"] = sample.steps();
    j["O_Z"] = sample.occupied();
    j["V_Z"] = sample.vacant();
    j["G_Z"] = sample.ghosts();
    j["O_T"] = sample.torus_occupied();
    return j.dump();
}

}  // namespace perco
