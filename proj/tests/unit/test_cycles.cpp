#include <gtest/gtest.h>

#include <random>
#include <set>

#include "perco/fixtures.hpp"
#include "perco/cluster.hpp"
#include "perco/cycles.hpp"
#include "perco/oracle.hpp"
#include "perco/rng.hpp"

using namespace perco;
namespace fx = perco::fixtures;

namespace {

CycleWitness witness_of(const Torus& t, const std::vector<Point>& pts) { return make_witness(t, fx::walk_vertices(t, pts)); }

std::vector<Point> double_wrap_points() {
    return {{0, 0},  {1, 0},  {2, 0},  {3, 0},  {4, 0},  {5, 0},  {5, 1},  {6, 1},  {6, 0},
            {6, -1}, {7, -1}, {8, -1}, {9, -1}, {10, -1}, {11, -1}, {11, 0}, {12, 0}};
}

// Two horizontal wraps of the r=8 torus sharing the segment x in [3, 8]
// on y = 0; the alternative segment runs along y = 1.
std::vector<EdgeId> theta_fixture(const Torus& t) {
    return fx::concat({fx::walk(t, fx::wrap_points(t, {0, 0}, 0)), fx::walk(t, {{0, 0}, {0, 1}, {1, 1}, {2, 1}, {3, 1}, {3, 0}})});
}

BondConfig sample_with_cap(const Torus& t, double p, std::uint64_t seed, std::size_t cap) {
    for (std::uint64_t k = 0;; ++k) {
        auto cfg = BondConfig::sample(t, p, derive_seed(seed, k));
        if (cfg.open_count() <= cap) return cfg;
    }
}

}  // namespace

TEST(LongCycle, Examples) {
    Torus t(2, 8);
    EXPECT_FALSE(is_long_cycle(t, witness_of(t, fx::rectangle_points({0, 0}, 1, 1))));
    auto wrap = witness_of(t, fx::wrap_points(t, {0, 0}, 0));
    EXPECT_EQ(wrap.length(), 8u);
    EXPECT_TRUE(is_long_cycle(t, wrap));

    Torus t12(2, 12);
    EXPECT_TRUE(is_long_cycle(t12, witness_of(t12, fx::rectangle_points({-2, 0}, 5, 1))));
    EXPECT_FALSE(is_long_cycle(t12, witness_of(t12, fx::rectangle_points({-2, 0}, 4, 1))));
    EXPECT_EQ(oracle::enumerate_long_cycles(t12, fx::walk(t12, fx::rectangle_points({-2, 0}, 5, 1))).size(), 1u);
}

TEST(LongCycle, MalformedInputs) {
    Torus t(2, 8);
    EXPECT_THROW(make_witness(t, {0, 1, 2}), MalformedCycle);
    EXPECT_THROW(make_witness(t, fx::walk_vertices(t, {{0, 0}, {2, 0}, {0, 0}})), MalformedCycle);
    EXPECT_THROW(make_witness(t, fx::walk_vertices(t, {{0, 0}, {1, 0}, {0, 0}})), MalformedCycle);
    auto sq = witness_of(t, fx::rectangle_points({0, 0}, 1, 1));
    sq.edges[0] = sq.edges[1];
    EXPECT_THROW(is_long_cycle(t, sq), MalformedCycle);
}

TEST(Winding, Examples) {
    Torus t(2, 8);
    EXPECT_EQ(witness_of(t, fx::rectangle_points({0, 0}, 1, 1)).winding, (std::vector<std::int64_t>{0, 0}));
    auto wrap = witness_of(t, fx::wrap_points(t, {0, 0}, 0));
    EXPECT_EQ(winding_vector(t, wrap), (std::vector<std::int64_t>{1, 0}));
    EXPECT_EQ(winding_vector(t, reversed(t, wrap)), (std::vector<std::int64_t>{-1, 0}));

    Torus t6(2, 6);
    auto spiral = witness_of(t6, double_wrap_points());
    EXPECT_EQ(spiral.winding, (std::vector<std::int64_t>{2, 0}));
    EXPECT_TRUE(spiral.long_cycle);
}

TEST(Winding, RingFixture) {
    Torus ring(1, 5);
    auto cycles = oracle::enumerate_all_cycles(ring, fx::walk(ring, fx::wrap_points(ring, {0}, 0)));
    ASSERT_EQ(cycles.size(), 1u);
    EXPECT_EQ(cycles[0].length(), 5u);
    EXPECT_EQ(std::abs(cycles[0].winding[0]), 1);
}

TEST(LongCycle, SymmetryInvariances) {
    std::mt19937_64 rng(3);
    Torus t(2, 8);
    int checked = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        auto cfg = sample_with_cap(t, 0.42, 100 + i, 40);
        for (const auto& c : oracle::enumerate_all_cycles(t, cfg.open_edges())) {
            const bool expected = c.long_cycle;
            EXPECT_EQ(is_long_cycle(t, reversed(t, c)), expected);
            EXPECT_EQ(is_long_cycle(t, rotated(t, c, rng() % c.length())), expected);
            auto neg = winding_vector(t, reversed(t, c));
            for (std::size_t a = 0; a < neg.size(); ++a) EXPECT_EQ(neg[a], -c.winding[a]);
            // translate and swap coordinates
            const Point shift{static_cast<std::int64_t>(rng() % 8), static_cast<std::int64_t>(rng() % 8)};
            std::vector<VertexId> moved, swapped;
            for (VertexId v : c.vertices) {
                Point p = t.coords(v);
                moved.push_back(t.vertex(Point{p[0] + shift[0], p[1] + shift[1]}));
                swapped.push_back(t.vertex(Point{p[1], p[0]}));
            }
            EXPECT_EQ(make_witness(t, moved).long_cycle, expected);
            EXPECT_EQ(make_witness(t, swapped).long_cycle, expected);
            if (std::any_of(c.winding.begin(), c.winding.end(), [](std::int64_t w) { return w != 0; })) EXPECT_TRUE(expected);
            ++checked;
        }
    }
    EXPECT_GT(checked, 50);
}

TEST(Winding, ContractibleCyclesHaveZeroWinding) {
    Torus t(2, 4);
    for (std::uint64_t i = 0; i < 100; ++i) {
        auto cfg = BondConfig::sample(t, 0.5, derive_seed(21, i));
        for (const auto& c : oracle::enumerate_all_cycles(t, cfg.open_edges())) {
            // a walk whose lift closes up is contractible; recompute the lift directly
            std::vector<std::int64_t> sum(2, 0);
            for (std::size_t k = 0; k + 1 < c.vertices.size(); ++k) {
                const Point a = t.coords(c.vertices[k]), b = t.coords(c.vertices[k + 1]);
                for (int ax = 0; ax < 2; ++ax) sum[static_cast<std::size_t>(ax)] += centered_residue(b[static_cast<std::size_t>(ax)] - a[static_cast<std::size_t>(ax)], 4);
            }
            EXPECT_EQ(sum[0] == 0 && sum[1] == 0, c.winding[0] == 0 && c.winding[1] == 0);
        }
    }
}

TEST(Wrapping, Examples) {
    Torus t(3, 4);
    EXPECT_TRUE(has_wrapping_cluster(BondConfig::sample(t, 1.0, 1)).any());
    EXPECT_FALSE(has_wrapping_cluster(BondConfig::sample(t, 0.0, 1)).any());

    Torus t2(2, 6);
    auto line = fx::walk(t2, fx::wrap_points(t2, {0, 2}, 0));
    auto cfg = fx::config(t2, fx::concat({line, fx::square(t2, {0, -2})}));
    auto labels = has_wrapping_cluster(cfg);
    for (VertexId v = 0; v < t2.vertex_count(); ++v) EXPECT_EQ(labels.vertex_wraps[v] != 0, t2.coords(v)[1] == 2) << v;
}

TEST(Wrapping, AgreesWithOracleEnumeration) {
    Torus t(2, 4);
    for (std::uint64_t i = 0; i < 500; ++i) {
        auto cfg = BondConfig::sample(t, 0.5, derive_seed(31, i));
        auto labels = has_wrapping_cluster(cfg);
        std::vector<char> oracle_wraps(t.vertex_count(), 0);
        for (const auto& c : oracle::enumerate_all_cycles(t, cfg.open_edges()))
            if (std::any_of(c.winding.begin(), c.winding.end(), [](std::int64_t w) { return w != 0; }))
                for (VertexId v : component_of(cfg, c.vertices[0]).vertices) oracle_wraps[v] = 1;
        ASSERT_EQ(labels.vertex_wraps, oracle_wraps) << "sample " << i;
    }
}

TEST(Wrapping, SubgraphWitnessWinds) {
    Torus t(2, 8);
    OpenSubgraph g(t, theta_fixture(t));
    auto w = find_wrapping_cycle(g, g.all_edges());
    ASSERT_TRUE(w.has_value());
    EXPECT_NO_THROW(validate_witness(t, *w));
    EXPECT_TRUE(std::any_of(w->winding.begin(), w->winding.end(), [](std::int64_t x) { return x != 0; }));
    OpenSubgraph sq(t, fx::square(t, {0, 0}));
    EXPECT_FALSE(find_wrapping_cycle(sq, sq.all_edges()).has_value());
}

TEST(VertexInLongCycle, Examples) {
    Torus t(2, 8);
    auto tree = fx::config(t, fx::walk(t, {{0, 0}, {1, 0}, {2, 0}, {2, 1}}));
    EXPECT_TRUE(vertex_in_long_cycle(tree, fx::at(t, {1, 0})).no());

    auto line = fx::walk(t, fx::wrap_points(t, {0, 0}, 0));
    auto cfg = fx::config(t, line);
    auto a = vertex_in_long_cycle(cfg, fx::at(t, {3, 0}));
    ASSERT_TRUE(a.yes());
    EXPECT_NO_THROW(validate_witness(t, *a.value, &cfg));
    EXPECT_EQ(std::set<EdgeId>(a.value->edges.begin(), a.value->edges.end()), std::set<EdgeId>(line.begin(), line.end()));
    EXPECT_TRUE(vertex_in_long_cycle(cfg, fx::at(t, {3, 1})).no());

    auto rect = fx::config(t, fx::walk(t, fx::rectangle_points({0, 0}, 3, 2)));
    EXPECT_TRUE(vertex_in_long_cycle(rect, 0, 0).unknown());
    Torus small(2, 5);
    auto sq = fx::config(small, fx::square(small, {0, 0}));
    EXPECT_TRUE(vertex_in_long_cycle(sq, 0, 0).unknown());
    EXPECT_TRUE(vertex_in_long_cycle(sq, 0).yes());
}

TEST(VertexInLongCycle, WrappingShortcutThroughOffCycleVertex) {
    Torus t(2, 8);
    // x sits on a loop hanging off the wrap line, joined to it at two points
    auto edges = fx::concat({fx::walk(t, fx::wrap_points(t, {0, 0}, 0)), fx::walk(t, {{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}, {2, 1}, {2, 0}})});
    auto cfg = fx::config(t, edges);
    auto a = vertex_in_long_cycle(cfg, fx::at(t, {1, 2}));
    ASSERT_TRUE(a.yes());
    EXPECT_NO_THROW(validate_witness(t, *a.value, &cfg));
    EXPECT_TRUE(a.value->long_cycle);
    EXPECT_TRUE(oracle::vertex_in_long_cycle(t, edges, fx::at(t, {1, 2})));
}

TEST(ClusterLongCycle, Examples) {
    Torus t(2, 8);
    auto tree = fx::config(t, fx::walk(t, {{0, 0}, {1, 0}, {2, 0}}));
    EXPECT_TRUE(cluster_contains_long_cycle(tree, component_of(tree, 0)).no());
    auto sq = fx::config(t, fx::square(t, {0, 0}));
    EXPECT_TRUE(cluster_contains_long_cycle(sq, component_of(sq, 0)).no());
    EXPECT_EQ(oracle::enumerate_all_cycles(t, sq.open_edges()).size(), 1u);
    auto wrap = fx::config(t, theta_fixture(t));
    auto a = cluster_contains_long_cycle(wrap, component_of(wrap, 0));
    ASSERT_TRUE(a.yes());
    EXPECT_NO_THROW(validate_witness(t, *a.value, &wrap));
}

TEST(LongCycleCount, Examples) {
    Torus t(2, 8);
    auto none = long_cycle_vertex_count(BondConfig::sample(t, 0.0, 1));
    EXPECT_EQ(none.count, 0u);
    EXPECT_FALSE(none.unknown);
    auto line = long_cycle_vertex_count(fx::config(t, fx::walk(t, fx::wrap_points(t, {0, 3}, 1))));
    EXPECT_EQ(line.count, 8u);
    EXPECT_FALSE(line.unknown);
    EXPECT_EQ(line.longest_witness, 8u);

    EXPECT_TRUE(long_cycle_vertex_count(BondConfig::sample(t, 1.0, 1), 10).unknown);
    Torus t5(3, 5);
    EXPECT_TRUE(long_cycle_vertex_count(BondConfig::sample(t5, 1.0, 1), 10).unknown);
}

TEST(ShortestLongCycle, Examples) {
    Torus t(2, 8);
    auto cfg = fx::config(t, fx::walk(t, fx::wrap_points(t, {0, 0}, 0)));
    EXPECT_TRUE(shortest_long_cycle_through(cfg, 0, 3).no());
    EXPECT_TRUE(shortest_long_cycle_through(cfg, 0, 8).yes());
    EXPECT_TRUE(shortest_long_cycle_through(cfg, 0, 7).no());
    auto len = shortest_long_cycle_length(cfg, 0, 20);
    ASSERT_TRUE(len.yes());
    EXPECT_EQ(*len.value, 8u);
}

TEST(ShortestLongCycle, MonotoneInK) {
    Torus t(2, 8);
    for (std::uint64_t i = 0; i < 1000; ++i) {
        auto cfg = BondConfig::sample(t, 0.45, derive_seed(41, i));
        const VertexId x = i % t.vertex_count();
        Verdict prev = Verdict::no;
        for (int k = 4; k <= 16; k += 2) {
            auto a = shortest_long_cycle_through(cfg, x, k, 20000);
            if (prev == Verdict::yes) ASSERT_FALSE(a.no()) << "sample " << i << " k " << k;
            if (a.yes()) {
                ASSERT_LE(a.value->length(), static_cast<std::size_t>(k));
                ASSERT_TRUE(a.value->long_cycle);
            }
            if (!a.unknown()) prev = a.verdict;
        }
    }
}

TEST(ComputeY, Examples) {
    Torus t(2, 8);
    auto tree = fx::config(t, fx::walk(t, {{0, 0}, {1, 0}, {2, 0}}));
    auto y0 = compute_Y(t, component_of(tree, 0));
    ASSERT_TRUE(y0.yes());
    EXPECT_EQ(y0.value.value, 0);
    auto ring = fx::config(t, fx::walk(t, fx::wrap_points(t, {0, 0}, 0)));
    auto y1 = compute_Y(t, component_of(ring, 0));
    ASSERT_TRUE(y1.yes());
    EXPECT_EQ(y1.value.value, 1);

    const auto theta = theta_fixture(t);
    auto cfg = fx::config(t, theta);
    auto y = compute_Y(t, component_of(cfg, 0));
    ASSERT_TRUE(y.yes());
    EXPECT_EQ(y.value.value, oracle::exact_Y_bruteforce(t, theta));
    EXPECT_EQ(y.value.surplus_bound, 2);
    EXPECT_EQ(compute_Y(t, component_of(cfg, 0), kDefaultBudget, 1).value.value, 1);
}

TEST(InteriorSet, Examples) {
    Torus t(2, 8);
    auto tree = fx::config(t, fx::walk(t, {{0, 0}, {1, 0}, {2, 0}}));
    auto empty = interior_set_I(tree, 0);
    EXPECT_TRUE(empty.members.empty());
    EXPECT_TRUE(empty.exact);

    auto line = fx::walk(t, fx::wrap_points(t, {0, 0}, 0));
    auto cfg = fx::config(t, fx::concat({line, fx::walk(t, {{3, 0}, {3, 1}, {3, 2}})}));
    auto set = interior_set_I(cfg, fx::at(t, {2, 0}));
    EXPECT_TRUE(set.exact);
    // any path from the root to another line vertex uses edges of the only long cycle
    EXPECT_EQ(set.members, std::vector<VertexId>{fx::at(t, {2, 0})});
    EXPECT_EQ(set.members, oracle::interior_set_bruteforce(t, cfg.open_edges(), fx::at(t, {2, 0})));
    auto off = interior_set_I(cfg, fx::at(t, {3, 2}));
    EXPECT_EQ(off.members, std::vector<VertexId>{fx::at(t, {3, 0})});
    EXPECT_EQ(off.members, oracle::interior_set_bruteforce(t, cfg.open_edges(), fx::at(t, {3, 2})));

    auto zero = interior_set_I(cfg, fx::at(t, {2, 0}), 0);
    EXPECT_TRUE(zero.members.empty());
    EXPECT_FALSE(zero.exact);
}

// Main-path detectors against brute-force enumeration, on the general
// (floor(r/4) >= 2) search path and the fast path.
TEST(Detectors, AgreeWithOracle) {
    for (int r : {5, 8, 9}) {
        Torus t(2, r);
        const double p = r == 5 ? 0.45 : 0.33;
        for (std::uint64_t i = 0; i < 150; ++i) {
            auto cfg = sample_with_cap(t, p, derive_seed(51, static_cast<std::uint64_t>(r), i), 38);
            const auto open = cfg.open_edges();
            const auto long_cycles = oracle::enumerate_long_cycles(t, open);
            std::set<VertexId> on_long;
            for (const auto& c : long_cycles) on_long.insert(c.vertices.begin(), c.vertices.end());
            for (const auto& c : all_components(cfg)) {
                if (c.edges.empty()) continue;
                auto a = cluster_contains_long_cycle(cfg, c);
                const bool truth = std::any_of(c.vertices.begin(), c.vertices.end(), [&](VertexId v) { return on_long.count(v) > 0; });
                ASSERT_FALSE(a.unknown());
                ASSERT_EQ(a.yes(), truth) << "r=" << r << " sample " << i;
                if (a.yes()) ASSERT_NO_THROW(validate_witness(t, *a.value, &cfg));
                auto y = compute_Y(t, c);
                ASSERT_TRUE(y.yes());
                ASSERT_EQ(y.value.value, oracle::exact_Y_bruteforce(t, c.edges)) << "r=" << r << " sample " << i;
                ASSERT_EQ(y.value.value == 0, a.no());
                auto inner = interior_set_I(cfg, c.root);
                ASSERT_TRUE(inner.exact);
                ASSERT_EQ(inner.members, oracle::interior_set_bruteforce(t, open, c.root));
                ASSERT_LE(y.value.value, 2 * t.dim() * static_cast<std::int64_t>(inner.members.size()));
            }
            for (VertexId x = 0; x < t.vertex_count(); x += 3) {
                auto a = vertex_in_long_cycle(cfg, x);
                ASSERT_FALSE(a.unknown());
                ASSERT_EQ(a.yes(), on_long.count(x) > 0) << "r=" << r << " sample " << i << " x " << x;
                if (a.yes()) {
                    ASSERT_NO_THROW(validate_witness(t, *a.value, &cfg));
                    ASSERT_TRUE(a.value->long_cycle);
                    ASSERT_NE(std::find(a.value->vertices.begin(), a.value->vertices.end(), x), a.value->vertices.end());
                }
                auto len = shortest_long_cycle_length(cfg, x, 40);
                ASSERT_TRUE(len.yes() || len.no());
                ASSERT_EQ(len.yes() ? *len.value : 0u, oracle::shortest_long_cycle_through(t, open, x));
            }
            auto count = long_cycle_vertex_count(cfg);
            ASSERT_FALSE(count.unknown);
            ASSERT_EQ(count.count, on_long.size());
        }
    }
}
