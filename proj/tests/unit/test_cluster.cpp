#include <gtest/gtest.h>

#include <random>

#include "perco/fixtures.hpp"
#include "perco/cluster.hpp"
#include "perco/rng.hpp"

using namespace perco;
namespace fx = perco::fixtures;

TEST(Component, ExtremeConfigs) {
    Torus t(3, 4);
    auto full = BondConfig::sample(t, 1.0, 1);
    auto c = component_of(full, 5);
    EXPECT_EQ(c.size(), t.vertex_count());
    EXPECT_EQ(c.edges.size(), t.edge_count());
    auto empty = BondConfig::sample(t, 0.0, 1);
    auto s = component_of(empty, 5);
    EXPECT_EQ(s.vertices, std::vector<VertexId>{5});
    EXPECT_TRUE(s.edges.empty());
    EXPECT_EQ(s.root, 5u);
}

TEST(Component, UnitSquare) {
    Torus t(2, 6);
    auto cfg = fx::config(t, fx::square(t, {0, 0}));
    auto c = component_of(cfg, fx::at(t, {1, 1}));
    EXPECT_EQ(c.size(), 4u);
    EXPECT_EQ(c.edges.size(), 4u);
    EXPECT_EQ(c.cycle_rank(), 1);
}

TEST(AllComponents, PartitionAndOrder) {
    Torus t(2, 4);
    EXPECT_EQ(all_components(BondConfig::sample(t, 0.0, 1)).size(), t.vertex_count());
    EXPECT_EQ(all_components(BondConfig::sample(t, 1.0, 1)).size(), 1u);

    Torus big(2, 8);
    auto cfg = fx::config(big, fx::concat({fx::square(big, {2, 2}), fx::square(big, {-3, -3})}));
    auto comps = all_components(cfg);
    ASSERT_GE(comps.size(), 2u);
    EXPECT_EQ(comps[0].size(), 4u);
    EXPECT_EQ(comps[1].size(), 4u);
    EXPECT_LT(comps[0].root, comps[1].root);
    EXPECT_EQ(comps[0].root, comps[0].vertices.front());
}

TEST(AllComponents, RandomPartitionProperty) {
    for (std::uint64_t i = 0; i < 50; ++i) {
        Torus t(3, 5);
        auto cfg = BondConfig::sample(t, 0.3, derive_seed(3, i));
        auto comps = all_components(cfg);
        std::vector<int> hits(t.vertex_count(), 0);
        std::uint64_t total = 0;
        for (std::size_t k = 0; k < comps.size(); ++k) {
            if (k > 0) {
                EXPECT_TRUE(comps[k - 1].size() > comps[k].size() ||
                            (comps[k - 1].size() == comps[k].size() && comps[k - 1].root < comps[k].root));
            }
            total += comps[k].size();
            for (VertexId v : comps[k].vertices) ++hits[v];
        }
        EXPECT_EQ(total, t.vertex_count());
        EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));

        auto labels = label_components(cfg);
        ASSERT_EQ(labels.count(), comps.size());
        for (std::uint32_t id = 0; id < labels.count(); ++id) {
            auto c = extract_cluster(cfg, labels, id);
            EXPECT_EQ(c.vertices, comps[id].vertices);
            EXPECT_EQ(c.edges, comps[id].edges);
            EXPECT_EQ(labels.sizes[id], c.size());
            EXPECT_EQ(labels.edge_counts[id], c.edges.size());
        }
    }
}

TEST(IntrinsicBall, Examples) {
    Torus t(2, 5);
    auto cfg = BondConfig::sample(t, 0.5, 4);
    auto b0 = intrinsic_ball(cfg, 7, 0);
    EXPECT_EQ(b0.vertices(), std::vector<VertexId>{7});
    EXPECT_EQ(b0.distance(7), 0);

    Torus ring(1, 8);
    auto all = BondConfig::sample(ring, 1.0, 1);
    auto b = intrinsic_ball(all, fx::at(ring, {0}), 2);
    ASSERT_EQ(b.size(), 5u);
    std::vector<int> dists;
    for (VertexId v : b.vertices()) dists.push_back(b.distance(v));
    EXPECT_EQ(dists, (std::vector<int>{0, 1, 1, 2, 2}));
    EXPECT_EQ(b.shell(2).size(), 2u);
}

TEST(IntrinsicBall, WrapShortcut) {
    Torus t(2, 5);
    // straight path -2..2 on the x axis plus the wrap edge from 2 back to -2
    auto cfg = fx::config(t, fx::walk(t, {{-2, 0}, {-1, 0}, {0, 0}, {1, 0}, {2, 0}, {3, 0}}));
    auto b = intrinsic_ball(cfg, fx::at(t, {-2, 0}), 1);
    EXPECT_TRUE(b.contains(fx::at(t, {2, 0})));
    EXPECT_EQ(b.distance(fx::at(t, {2, 0})), 1);
    EXPECT_FALSE(b.contains(fx::at(t, {1, 0})));
}

TEST(ConnectedWithin, Examples) {
    Torus t(2, 5);
    auto cfg = BondConfig::sample(t, 0.0, 1);
    EXPECT_TRUE(connected_within(cfg, 3, 3, 0));
    EXPECT_FALSE(connected_within(cfg, 3, 4, 10));
}

TEST(ConnectedWithin, SymmetricOnRandomConfigs) {
    std::mt19937_64 rng(5);
    Torus t(2, 6);
    std::uniform_int_distribution<VertexId> pick(0, t.vertex_count() - 1);
    for (std::uint64_t i = 0; i < 1000; ++i) {
        auto cfg = BondConfig::sample(t, 0.5, derive_seed(9, i));
        const VertexId x = pick(rng), y = pick(rng);
        const int k = static_cast<int>(rng() % 12);
        EXPECT_EQ(connected_within(cfg, x, y, k), connected_within(cfg, y, x, k));
    }
}

TEST(IntrinsicBall, MonotoneAndExhaustive) {
    for (std::uint64_t i = 0; i < 30; ++i) {
        for (const auto& t : {Torus(3, 5), Torus(2, 7, EdgeModel::spread_out(2))}) {
            auto cfg = BondConfig::sample(t, 0.25, derive_seed(10, i));
            const VertexId x = i % t.vertex_count();
            IntrinsicBall prev = intrinsic_ball(cfg, x, 0);
            for (int k = 1; k <= 8; ++k) {
                auto ball = intrinsic_ball(cfg, x, k);
                for (VertexId v : prev.vertices()) EXPECT_TRUE(ball.contains(v));
                for (VertexId v : ball.vertices())
                    EXPECT_GE(ball.distance(v) * t.model().step_range(), sup_distance(t, x, v));
                prev = ball;
            }
            auto whole = intrinsic_ball(cfg, x, static_cast<int>(t.vertex_count()));
            std::vector<VertexId> vs = whole.vertices();
            std::sort(vs.begin(), vs.end());
            EXPECT_EQ(vs, component_of(cfg, x).vertices);
        }
    }
}
