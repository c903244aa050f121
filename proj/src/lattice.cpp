#include "perco/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace perco {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw GeometryError(std::string(what) + ": index overflow");
    return out;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    const std::int64_t q = a % m;
    return q < 0 ? q + m : q;
}

}  // namespace

OffsetTable::OffsetTable(int dim, const EdgeModel& model) : dim_(dim) {
    if (!model.is_spread_out()) {
        count_ = dim;
        values_.assign(static_cast<std::size_t>(dim) * dim, 0);
        for (int j = 0; j < dim; ++j) {
            values_[static_cast<std::size_t>(j) * dim + j] = 1;
            axis_.push_back(j);
        }
        return;
    }
    const int L = model.range;
    std::vector<int> cur(static_cast<std::size_t>(dim), -L);
    // Enumerate [-L, L]^d with axis 0 varying fastest; keep the
    // lexicographically positive half (first nonzero component > 0).
    while (true) {
        int first = 0;
        for (int a = 0; a < dim; ++a) {
            if (cur[static_cast<std::size_t>(a)] != 0) {
                first = cur[static_cast<std::size_t>(a)];
                break;
            }
        }
        if (first > 0) {
            values_.insert(values_.end(), cur.begin(), cur.end());
            int nz = 0, ax = -1;
            for (int a = 0; a < dim; ++a) {
                if (cur[static_cast<std::size_t>(a)] != 0) {
                    ++nz;
                    ax = a;
                }
            }
            axis_.push_back(nz == 1 && std::abs(cur[static_cast<std::size_t>(ax)]) == 1 ? ax : -1);
            ++count_;
        }
        int a = 0;
        while (a < dim && cur[static_cast<std::size_t>(a)] == L) cur[static_cast<std::size_t>(a++)] = -L;
        if (a == dim) break;
        ++cur[static_cast<std::size_t>(a)];
    }
}

// ---------------------------------------------------------------------------
// Torus

Torus::Torus(int dim, int side, EdgeModel model) : dim_(dim), side_(side), model_(model) {
    if (dim < 1) throw GeometryError("torus dimension must be >= 1");
    if (side < 3) throw GeometryError("torus side must be >= 3");
    if (model.is_spread_out()) {
        if (model.range < 1) throw GeometryError("spread-out range must be >= 1");
        if (2 * model.range + 1 > side) throw GeometryError("spread-out model requires 2L+1 <= r");
    }
    strides_.resize(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) {
        strides_[static_cast<std::size_t>(a)] = vertex_count_;
        vertex_count_ = checked_mul(vertex_count_, static_cast<std::uint64_t>(side), "torus");
    }
    if (model.is_spread_out()) {
        // The spread-out step set is itself exponential in d.
        std::uint64_t steps = 1;
        for (int a = 0; a < dim; ++a) steps = checked_mul(steps, static_cast<std::uint64_t>(2 * model.range + 1), "torus");
        if (steps > (1u << 24)) throw GeometryError("torus: step set too large");
    }
    offsets_ = OffsetTable(dim, model);
    checked_mul(vertex_count_, static_cast<std::uint64_t>(offsets_.size()), "torus edges");
}

std::int64_t Torus::coordinate(VertexId v, int axis) const {
    const int c = digit(v, axis);
    return c <= (side_ + 1) / 2 - 1 ? c : c - side_;
}

Point Torus::coords(VertexId v) const {
    Point p(static_cast<std::size_t>(dim_));
    for (int a = 0; a < dim_; ++a) p[static_cast<std::size_t>(a)] = coordinate(v, a);
    return p;
}

VertexId Torus::vertex(std::span<const std::int64_t> point) const {
    if (static_cast<int>(point.size()) != dim_) throw GeometryError("point dimension mismatch");
    VertexId v = 0;
    for (int a = 0; a < dim_; ++a)
        v += static_cast<VertexId>(floor_mod(point[static_cast<std::size_t>(a)], side_)) * strides_[static_cast<std::size_t>(a)];
    return v;
}

VertexId Torus::step(VertexId v, int dir, bool forward) const {
    const int ax = offsets_.axis(dir);
    const auto r = static_cast<std::uint64_t>(side_);
    if (ax >= 0) {
        const std::uint64_t s = strides_[static_cast<std::size_t>(ax)];
        const std::uint64_t c = (v / s) % r;
        if (forward) return c == r - 1 ? v - (r - 1) * s : v + s;
        return c == 0 ? v + (r - 1) * s : v - s;
    }
    const auto off = offsets_[dir];
    VertexId out = v;
    for (int a = 0; a < dim_; ++a) {
        const int o = forward ? off[static_cast<std::size_t>(a)] : -off[static_cast<std::size_t>(a)];
        if (o == 0) continue;
        const std::uint64_t s = strides_[static_cast<std::size_t>(a)];
        const auto c = static_cast<std::int64_t>((v / s) % r);
        const std::int64_t n = floor_mod(c + o, side_);
        out = out - static_cast<std::uint64_t>(c) * s + static_cast<std::uint64_t>(n) * s;
    }
    return out;
}

EdgeEnds Torus::endpoints(EdgeId e) const {
    const auto h = static_cast<std::uint64_t>(offsets_.size());
    const VertexId lower = e / h;
    const int dir = static_cast<int>(e % h);
    return {lower, step(lower, dir, true), dir};
}

std::vector<Incidence> Torus::incident(VertexId v) const {
    std::vector<Incidence> out;
    out.reserve(static_cast<std::size_t>(degree()));
    for_each_incident(v, [&](const Incidence& inc) { out.push_back(inc); });
    std::sort(out.begin(), out.end(), [](const Incidence& a, const Incidence& b) { return a.edge < b.edge; });
    return out;
}

void Torus::check_vertex(VertexId v) const {
    if (v >= vertex_count_) throw GeometryError("vertex id out of range");
}

void Torus::check_edge(EdgeId e) const {
    if (e >= edge_count()) throw GeometryError("edge id out of range");
}

int sup_distance(const Torus& torus, VertexId x, VertexId y) {
    int best = 0;
    const int r = torus.side();
    for (int a = 0; a < torus.dim(); ++a) {
        int dx = std::abs(torus.digit(x, a) - torus.digit(y, a));
        dx = std::min(dx, r - dx);
        best = std::max(best, dx);
    }
    return best;
}

std::optional<EdgeId> edge_between(const Torus& torus, VertexId u, VertexId v) {
    const int d = torus.dim();
    std::vector<int> delta(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a)
        delta[static_cast<std::size_t>(a)] = static_cast<int>(centered_residue(torus.digit(v, a) - torus.digit(u, a), torus.side()));
    const auto& off = torus.offsets();
    for (int dir = 0; dir < off.size(); ++dir) {
        auto o = off[dir];
        if (std::equal(o.begin(), o.end(), delta.begin())) return torus.edge(u, dir);
        bool neg = true;
        for (int a = 0; a < d && neg; ++a) neg = o[static_cast<std::size_t>(a)] == -delta[static_cast<std::size_t>(a)];
        if (neg) return torus.edge(v, dir);
    }
    return std::nullopt;
}

int l1_distance(const Torus& torus, VertexId x, VertexId y) {
    int total = 0;
    const int r = torus.side();
    for (int a = 0; a < torus.dim(); ++a) {
        int dx = std::abs(torus.digit(x, a) - torus.digit(y, a));
        total += std::min(dx, r - dx);
    }
    return total;
}

std::int64_t centered_residue(std::int64_t a, int r) {
    const std::int64_t c = floor_mod(a, r);
    return c <= (r + 1) / 2 - 1 ? c : c - r;
}

bool r_equivalent(std::span<const std::int64_t> x, std::span<const std::int64_t> y, int r) {
    if (x.size() != y.size()) return false;
    for (std::size_t a = 0; a < x.size(); ++a)
        if (floor_mod(x[a] - y[a], r) != 0) return false;
    return true;
}

Point canonical_point(std::span<const std::int64_t> x, int r) {
    Point out(x.size());
    for (std::size_t a = 0; a < x.size(); ++a) out[a] = centered_residue(x[a], r);
    return out;
}

VertexId canonical_rep(const Torus& torus, std::span<const std::int64_t> x) { return torus.vertex(x); }

// ---------------------------------------------------------------------------
// Box

Box::Box(Point center, int radius, EdgeModel model) : center_(std::move(center)), radius_(radius), model_(model) {
    if (center_.empty()) throw GeometryError("box dimension must be >= 1");
    if (radius < 0) throw GeometryError("box radius must be >= 0");
    if (model.is_spread_out() && model.range < 1) throw GeometryError("spread-out range must be >= 1");
    const int d = dim();
    strides_.resize(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        strides_[static_cast<std::size_t>(a)] = vertex_count_;
        vertex_count_ = checked_mul(vertex_count_, static_cast<std::uint64_t>(side()), "box");
    }
    offsets_ = OffsetTable(d, model);
    checked_mul(vertex_count_, static_cast<std::uint64_t>(offsets_.size()), "box edges");
}

std::uint64_t Box::edge_count() const {
    std::uint64_t total = 0;
    for (int dir = 0; dir < offsets_.size(); ++dir) {
        std::uint64_t n = 1;
        for (int a = 0; a < dim(); ++a) {
            const std::int64_t len = side() - std::abs(offsets_[dir][static_cast<std::size_t>(a)]);
            if (len <= 0) {
                n = 0;
                break;
            }
            n *= static_cast<std::uint64_t>(len);
        }
        total += n;
    }
    return total;
}

bool Box::contains(std::span<const std::int64_t> point) const {
    if (point.size() != center_.size()) return false;
    for (std::size_t a = 0; a < point.size(); ++a)
        if (std::abs(point[a] - center_[a]) > radius_) return false;
    return true;
}

std::optional<VertexId> Box::vertex(std::span<const std::int64_t> point) const {
    if (!contains(point)) return std::nullopt;
    VertexId v = 0;
    for (std::size_t a = 0; a < point.size(); ++a)
        v += static_cast<VertexId>(point[a] - center_[a] + radius_) * strides_[a];
    return v;
}

std::int64_t Box::coordinate(VertexId v, int axis) const {
    const auto s = strides_[static_cast<std::size_t>(axis)];
    return static_cast<std::int64_t>((v / s) % static_cast<std::uint64_t>(side())) - radius_ + center_[static_cast<std::size_t>(axis)];
}

Point Box::coords(VertexId v) const {
    Point p(center_.size());
    for (int a = 0; a < dim(); ++a) p[static_cast<std::size_t>(a)] = coordinate(v, a);
    return p;
}

int Box::center_distance(VertexId v) const {
    std::int64_t best = 0;
    for (int a = 0; a < dim(); ++a)
        best = std::max(best, std::abs(coordinate(v, a) - center_[static_cast<std::size_t>(a)]));
    return static_cast<int>(best);
}

VertexId Box::center_vertex() const { return *vertex(center_); }

std::optional<VertexId> Box::step(VertexId v, int dir, bool forward) const {
    const auto n = static_cast<std::uint64_t>(side());
    const int ax = offsets_.axis(dir);
    if (ax >= 0) {
        const std::uint64_t s = strides_[static_cast<std::size_t>(ax)];
        const std::uint64_t c = (v / s) % n;
        if (forward) return c + 1 >= n ? std::nullopt : std::optional<VertexId>(v + s);
        return c == 0 ? std::nullopt : std::optional<VertexId>(v - s);
    }
    const auto off = offsets_[dir];
    VertexId out = v;
    for (int a = 0; a < dim(); ++a) {
        const int o = forward ? off[static_cast<std::size_t>(a)] : -off[static_cast<std::size_t>(a)];
        if (o == 0) continue;
        const std::uint64_t s = strides_[static_cast<std::size_t>(a)];
        const auto c = static_cast<std::int64_t>((v / s) % n);
        const std::int64_t m = c + o;
        if (m < 0 || m >= static_cast<std::int64_t>(n)) return std::nullopt;
        out = out - static_cast<std::uint64_t>(c) * s + static_cast<std::uint64_t>(m) * s;
    }
    return out;
}

EdgeEnds Box::endpoints(EdgeId e) const {
    const auto h = static_cast<std::uint64_t>(offsets_.size());
    const VertexId lower = e / h;
    const int dir = static_cast<int>(e % h);
    auto upper = step(lower, dir, true);
    if (!upper) throw GeometryError("edge id outside box");
    return {lower, *upper, dir};
}

bool Box::has_edge(EdgeId e) const {
    const auto h = static_cast<std::uint64_t>(offsets_.size());
    if (e >= edge_id_bound()) return false;
    return step(e / h, static_cast<int>(e % h), true).has_value();
}

BoxGraph box_graph(const Box& box, std::uint64_t max_vertices) {
    if (box.vertex_count() > max_vertices) throw GeometryError("box too large to materialize");
    BoxGraph g;
    g.vertex_count = box.vertex_count();
    g.boundary.resize(g.vertex_count);
    for (VertexId v = 0; v < g.vertex_count; ++v) {
        g.boundary[v] = box.on_boundary(v);
        for (int dir = 0; dir < box.offsets().size(); ++dir) {
            if (auto u = box.step(v, dir, true)) {
                g.edges.push_back({v, *u, dir});
                g.edge_ids.push_back(box.edge(v, dir));
            }
        }
    }
    return g;
}

}  // namespace perco
