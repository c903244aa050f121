#pragma once

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "perco/bond_config.hpp"
#include "perco/lattice.hpp"

namespace perco::fixtures {

inline VertexId at(const Torus& t, std::initializer_list<std::int64_t> p) {
    const Point pt(p);
    return t.vertex(pt);
}

inline EdgeId edge(const Torus& t, VertexId u, VertexId v) {
    auto e = edge_between(t, u, v);
    if (!e) throw std::logic_error("fixture vertices are not adjacent");
    return *e;
}

/// Edges of the walk through the given points.
inline std::vector<EdgeId> walk(const Torus& t, const std::vector<Point>& pts) {
    std::vector<EdgeId> out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) out.push_back(edge(t, t.vertex(pts[i]), t.vertex(pts[i + 1])));
    return out;
}

inline std::vector<VertexId> walk_vertices(const Torus& t, const std::vector<Point>& pts) {
    std::vector<VertexId> out;
    for (const auto& p : pts) out.push_back(t.vertex(p));
    return out;
}

/// Unit square with lower corner c spanned by axes 0 and 1.
inline std::vector<EdgeId> square(const Torus& t, Point c) {
    Point a = c, b = c, d = c;
    a[0] += 1;
    b[0] += 1;
    b[1] += 1;
    d[1] += 1;
    return walk(t, {c, a, b, d, c});
}

/// Axis-aligned rectangle with lower corner c, width w along axis 0 and
/// height h along axis 1.
inline std::vector<Point> rectangle_points(Point c, int w, int h) {
    std::vector<Point> pts{c};
    Point p = c;
    for (int i = 0; i < w; ++i) { ++p[0]; pts.push_back(p); }
    for (int i = 0; i < h; ++i) { ++p[1]; pts.push_back(p); }
    for (int i = 0; i < w; ++i) { --p[0]; pts.push_back(p); }
    for (int i = 0; i < h; ++i) { --p[1]; pts.push_back(p); }
    return pts;
}

/// Straight line of r steps along `axis` starting at `start`.
inline std::vector<Point> wrap_points(const Torus& t, Point start, int axis) {
    std::vector<Point> pts{start};
    for (int i = 0; i < t.side(); ++i) {
        Point p = pts.back();
        ++p[static_cast<std::size_t>(axis)];
        pts.push_back(p);
    }
    return pts;
}

inline std::vector<EdgeId> concat(std::initializer_list<std::vector<EdgeId>> parts) {
    std::vector<EdgeId> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

inline BondConfig config(const Torus& t, const std::vector<EdgeId>& open) { return BondConfig::from_open_edges(t, open); }

struct HandFixture {
    std::string name;
    Torus torus;
    std::vector<EdgeId> open;
};

/// Small hand-built configurations with known cycle structure, all within
/// the brute-force guards.
std::vector<HandFixture> hand_fixtures();

}  // namespace perco::fixtures
