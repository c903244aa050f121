#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace perco {

using VertexId = std::uint64_t;
using EdgeId = std::uint64_t;
using Point = std::vector<std::int64_t>;

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Edge rule shared by the torus and the lattice boxes. Spread-out edges
/// join every pair of distinct vertices at sup-distance at most `range`.
struct EdgeModel {
    enum class Kind { nearest_neighbor, spread_out };

    Kind kind = Kind::nearest_neighbor;
    int range = 1;

    static EdgeModel nearest_neighbor() { return {Kind::nearest_neighbor, 1}; }
    static EdgeModel spread_out(int range) { return {Kind::spread_out, range}; }

    bool is_spread_out() const { return kind == Kind::spread_out; }
    /// Largest sup-norm length of a single step.
    int step_range() const { return is_spread_out() ? range : 1; }
    std::string name() const { return is_spread_out() ? "spread-out" : "nn"; }

    friend bool operator==(const EdgeModel&, const EdgeModel&) = default;
};

/// The positive half of the step set: for nearest-neighbour the d unit
/// vectors, for spread-out every nonzero vector in [-L, L]^d whose first
/// nonzero component is positive. An edge is (lower endpoint, direction).
class OffsetTable {
public:
    OffsetTable() = default;
    OffsetTable(int dim, const EdgeModel& model);

    int size() const { return count_; }
    int dim() const { return dim_; }
    std::span<const int> operator[](int dir) const {
        return {values_.data() + static_cast<std::size_t>(dir) * dim_, static_cast<std::size_t>(dim_)};
    }
    /// Axis of a nearest-neighbour direction, or -1 for a general offset.
    int axis(int dir) const { return axis_[static_cast<std::size_t>(dir)]; }

private:
    int dim_ = 0;
    int count_ = 0;
    std::vector<int> values_;
    std::vector<int> axis_;
};

struct EdgeEnds {
    VertexId lower;
    VertexId upper;
    int dir;
};

/// One incident edge seen from a vertex. `forward` is true when the vertex
/// is the lower endpoint, i.e. the step follows +offset(dir).
struct Incidence {
    EdgeId edge;
    VertexId neighbor;
    int dir;
    bool forward;
};

/// The discrete torus with vertex set {-floor(r/2), ..., ceil(r/2)-1}^d.
/// Vertex ids are mixed-radix over the residues c mod r (axis 0 least
/// significant), so the origin has id 0.
class Torus {
public:
    Torus(int dim, int side, EdgeModel model = EdgeModel::nearest_neighbor());

    int dim() const { return dim_; }
    int side() const { return side_; }
    const EdgeModel& model() const { return model_; }
    const OffsetTable& offsets() const { return offsets_; }
    std::uint64_t vertex_count() const { return vertex_count_; }
    std::uint64_t edge_count() const { return vertex_count_ * static_cast<std::uint64_t>(offsets_.size()); }
    int half_degree() const { return offsets_.size(); }
    int degree() const { return 2 * offsets_.size(); }

    /// Residue of v along `axis`, in [0, r).
    int digit(VertexId v, int axis) const {
        return static_cast<int>((v / strides_[static_cast<std::size_t>(axis)]) % static_cast<std::uint64_t>(side_));
    }
    /// Centered coordinate in {-floor(r/2), ..., ceil(r/2)-1}.
    std::int64_t coordinate(VertexId v, int axis) const;
    Point coords(VertexId v) const;
    /// Canonical representative of an arbitrary lattice point.
    VertexId vertex(std::span<const std::int64_t> point) const;

    VertexId step(VertexId v, int dir, bool forward) const;
    EdgeId edge(VertexId lower, int dir) const { return lower * static_cast<std::uint64_t>(offsets_.size()) + static_cast<std::uint64_t>(dir); }
    EdgeEnds endpoints(EdgeId e) const;

    /// All incident edges of v in increasing EdgeId order.
    std::vector<Incidence> incident(VertexId v) const;

    template <class F>
    void for_each_incident(VertexId v, F&& f) const {
        const int h = offsets_.size();
        for (int dir = 0; dir < h; ++dir) {
            const VertexId u = step(v, dir, true);
            f(Incidence{edge(v, dir), u, dir, true});
            const VertexId w = step(v, dir, false);
            f(Incidence{edge(w, dir), w, dir, false});
        }
    }

    void check_vertex(VertexId v) const;
    void check_edge(EdgeId e) const;

private:
    int dim_;
    int side_;
    EdgeModel model_;
    OffsetTable offsets_;
    std::uint64_t vertex_count_ = 1;
    std::vector<std::uint64_t> strides_;
};

/// Torus sup-norm distance: max over axes of min(|dx|, r - |dx|).
int sup_distance(const Torus& torus, VertexId x, VertexId y);
int l1_distance(const Torus& torus, VertexId x, VertexId y);
/// The edge joining u and v, if they are adjacent.
std::optional<EdgeId> edge_between(const Torus& torus, VertexId u, VertexId v);

/// Centered representative of a mod r, in {-floor(r/2), ..., ceil(r/2)-1}.
std::int64_t centered_residue(std::int64_t a, int r);
bool r_equivalent(std::span<const std::int64_t> x, std::span<const std::int64_t> y, int r);
Point canonical_point(std::span<const std::int64_t> x, int r);
VertexId canonical_rep(const Torus& torus, std::span<const std::int64_t> x);

/// The lattice box Q_n(center) in Z^d with free boundary. Vertex ids are
/// mixed-radix over coordinate - (center - n); edge ids are lower * h + dir
/// and exist only when both endpoints lie in the box.
class Box {
public:
    Box(Point center, int radius, EdgeModel model = EdgeModel::nearest_neighbor());

    int dim() const { return static_cast<int>(center_.size()); }
    int radius() const { return radius_; }
    std::int64_t side() const { return 2 * static_cast<std::int64_t>(radius_) + 1; }
    const Point& center() const { return center_; }
    const EdgeModel& model() const { return model_; }
    const OffsetTable& offsets() const { return offsets_; }
    std::uint64_t vertex_count() const { return vertex_count_; }
    std::uint64_t edge_count() const;
    /// Upper bound on edge ids (edge ids are sparse in [0, edge_id_bound)).
    std::uint64_t edge_id_bound() const { return vertex_count_ * static_cast<std::uint64_t>(offsets_.size()); }

    bool contains(std::span<const std::int64_t> point) const;
    std::optional<VertexId> vertex(std::span<const std::int64_t> point) const;
    std::int64_t coordinate(VertexId v, int axis) const;
    Point coords(VertexId v) const;
    /// Sup-norm distance to the center.
    int center_distance(VertexId v) const;
    bool on_boundary(VertexId v) const { return center_distance(v) == radius_; }
    VertexId center_vertex() const;

    std::optional<VertexId> step(VertexId v, int dir, bool forward) const;
    EdgeId edge(VertexId lower, int dir) const { return lower * static_cast<std::uint64_t>(offsets_.size()) + static_cast<std::uint64_t>(dir); }
    EdgeEnds endpoints(EdgeId e) const;
    bool has_edge(EdgeId e) const;

    /// Incident edges of v whose other endpoint is also in the box.
    template <class F>
    void for_each_incident(VertexId v, F&& f) const {
        const int h = offsets_.size();
        for (int dir = 0; dir < h; ++dir) {
            if (auto u = step(v, dir, true)) f(Incidence{edge(v, dir), *u, dir, true});
            if (auto w = step(v, dir, false)) f(Incidence{edge(*w, dir), *w, dir, false});
        }
    }

private:
    Point center_;
    int radius_;
    EdgeModel model_;
    OffsetTable offsets_;
    std::uint64_t vertex_count_ = 1;
    std::vector<std::uint64_t> strides_;
};

/// Materialized box adjacency for small boxes.
struct BoxGraph {
    std::uint64_t vertex_count = 0;
    std::vector<EdgeEnds> edges;     // sorted by edge id
    std::vector<EdgeId> edge_ids;
    std::vector<bool> boundary;      // per vertex: |y - x| = n
};

BoxGraph box_graph(const Box& box, std::uint64_t max_vertices = 1u << 22);

}  // namespace perco
