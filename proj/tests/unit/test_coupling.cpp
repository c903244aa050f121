#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include <boost/math/distributions/binomial.hpp>

#include <json.hpp>

#include "perco/fixtures.hpp"
#include "perco/cluster.hpp"
#include "perco/coupling.hpp"
#include "perco/oracle.hpp"
#include "perco/rng.hpp"

using namespace perco;
namespace fx = perco::fixtures;

namespace {

// Edges deviating from p by more than 3 sigma: the count must stay within
// its own binomial 3-sigma band, and the pooled frequency within 3 sigma.
// Exact Binomial(n, p) probability that |count/n - p| > 3 sigma.
double outside_probability(std::uint64_t n, double p, double sigma) {
    const boost::math::binomial_distribution<> law(static_cast<double>(n), p);
    const double lo = static_cast<double>(n) * (p - 3 * sigma), hi = static_cast<double>(n) * (p + 3 * sigma);
    double q = 0;
    if (lo > 0) q += boost::math::cdf(law, std::ceil(lo) - 1);
    if (std::floor(hi) + 1 <= static_cast<double>(n)) q += boost::math::cdf(boost::math::complement(law, std::floor(hi)));
    return q;
}

void expect_marginals(const std::vector<std::uint64_t>& counts, std::uint64_t n, double p, const char* what) {
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
    std::size_t outside = 0;
    double pooled = 0;
    for (auto c : counts) {
        const double f = static_cast<double>(c) / static_cast<double>(n);
        outside += std::abs(f - p) > 3 * sigma;
        pooled += static_cast<double>(c);
    }
    const double m = static_cast<double>(counts.size());
    const double q = outside_probability(n, p, sigma);
    EXPECT_LE(static_cast<double>(outside), m * q + 3 * std::sqrt(m * q * (1 - q)) + 1) << what;
    pooled /= m * static_cast<double>(n);
    EXPECT_NEAR(pooled, p, 3 * std::sqrt(p * (1 - p) / (m * static_cast<double>(n)))) << what;
}

std::vector<EdgeId> window_edges(const CouplingSample& s) {
    std::vector<EdgeId> out;
    const Box& f = s.frame();
    for (VertexId v = 0; v < f.vertex_count(); ++v) {
        if (!s.in_window(v)) continue;
        for (int dir = 0; dir < f.offsets().size(); ++dir) {
            auto u = f.step(v, dir, true);
            if (u && s.in_window(*u)) out.push_back(f.edge(v, dir));
        }
    }
    return out;
}

}  // namespace

TEST(Coupling, ClosedTorusStopsAfterOriginEdges) {
    Torus t(3, 5);
    auto s = coupled_sample(t, 0.0, 1, 2);
    EXPECT_FALSE(s.truncated());
    EXPECT_EQ(s.steps(), 6u);
    EXPECT_EQ(s.vacant().size(), 6u);
    EXPECT_TRUE(s.occupied().empty());
    // every other window edge comes from the filler stream
    for (EdgeId e : window_edges(s))
        if (!s.is_explored(e) && !s.is_ghost(e)) ASSERT_EQ(s.lattice_open(e), s.filler().is_open(e));
}

TEST(Coupling, RejectsSmallWindowAndBadP) {
    Torus t(2, 5);
    EXPECT_THROW(coupled_sample(t, 0.3, 1, 1), std::invalid_argument);
    EXPECT_THROW(coupled_sample(t, 1.3, 1, 4), std::invalid_argument);
}

TEST(Coupling, FullTorusUnwrapsInsideWindow) {
    for (auto [d, r] : {std::pair{2, 5}, {3, 3}, {4, 4}}) {
        Torus t(d, r);
        auto s = coupled_sample(t, 1.0, 1, 3);
        EXPECT_FALSE(s.truncated());
        EXPECT_EQ(s.steps(), t.edge_count());
        EXPECT_EQ(s.torus_occupied().size(), t.edge_count());
    }
}

TEST(Coupling, WindingPathLeavesWindow) {
    Torus t(2, 5);
    // four rows of four steps each, climbing one row at a time: the torus
    // cluster is a path whose lift runs 16 steps along axis 0
    std::vector<Point> pts{{0, 0}};
    for (int row = 0; row < 4; ++row) {
        for (int i = 0; i < 4; ++i) pts.push_back({pts.back()[0] + 1, pts.back()[1]});
        if (row < 3) pts.push_back({pts.back()[0], pts.back()[1] + 1});
    }
    auto omega = fx::config(t, fx::walk(t, pts));
    ASSERT_EQ(component_of(omega, 0).cycle_rank(), 0);
    auto s = coupled_sample(omega, 3, 2);
    EXPECT_TRUE(s.truncated());
    EXPECT_FALSE(check_inclusion_property(s, {0, 1, 2}).applicable);
    auto wide = coupled_sample(omega, 3, 4);
    EXPECT_FALSE(wide.truncated());
}

TEST(Coupling, StepBudgetTruncates) {
    Torus t(2, 5);
    auto s = coupled_sample(t, 0.5, 3, 4, 3);
    EXPECT_TRUE(s.truncated());
    EXPECT_EQ(s.steps(), 3u);
}

TEST(Coupling, ExplorationRecoversTorusCluster) {
    for (std::uint64_t i = 0; i < 200; ++i) {
        for (const auto& t : {Torus(3, 5), Torus(2, 7, EdgeModel::spread_out(1))}) {
            auto s = coupled_sample(t, 0.22, derive_seed(11, i), 4);
            if (s.truncated()) continue;
            auto c = component_of(s.omega(), 0);
            EXPECT_EQ(s.torus_occupied(), c.edges);
            // vacant classes are exactly the closed edges touching the cluster
            std::vector<EdgeId> closed_touching, vacant_classes;
            for (VertexId v : c.vertices)
                for (const auto& inc : t.incident(v))
                    if (!s.omega().peek(inc.edge)) closed_touching.push_back(inc.edge);
            std::sort(closed_touching.begin(), closed_touching.end());
            closed_touching.erase(std::unique(closed_touching.begin(), closed_touching.end()), closed_touching.end());
            for (EdgeId e : s.vacant()) vacant_classes.push_back(s.torus_class(e));
            std::sort(vacant_classes.begin(), vacant_classes.end());
            EXPECT_EQ(vacant_classes, closed_touching);
        }
    }
}

TEST(Coupling, SingleReadAndGhostCompleteness) {
    Torus t(3, 5);
    for (std::uint64_t i = 0; i < 100; ++i) {
        auto omega = BondConfig::sample(t, 0.24, derive_seed(12, i));
        omega.instrument();
        auto s = coupled_sample(std::move(omega), derive_seed(13, i), 2);
        std::size_t read = 0;
        for (EdgeId e = 0; e < t.edge_count(); ++e) {
            ASSERT_LE(s.omega().read_count(e), 1u);
            read += s.omega().read_count(e);
        }
        EXPECT_EQ(read, s.consumed().size());
        EXPECT_EQ(read, s.order().size());
        std::map<EdgeId, int> members;
        for (EdgeId e : s.order()) {
            ++members[s.torus_class(e)];
            EXPECT_FALSE(s.is_ghost(e));
            EXPECT_EQ(s.lattice_open(e), s.omega().peek(s.torus_class(e)));
        }
        for (const auto& [c, n] : members) EXPECT_EQ(n, 1);
        if (i < 10) {
            for (EdgeId g : s.ghosts()) {
                EXPECT_FALSE(s.is_explored(g));
                EXPECT_TRUE(s.consumed().count(s.torus_class(g)));
            }
        }
    }
}

TEST(Coupling, DeterministicForSeed) {
    Torus t(3, 5);
    auto a = coupled_sample(t, 0.2, 77, 4);
    auto b = coupled_sample(t, 0.2, 77, 4);
    EXPECT_EQ(a.order(), b.order());
    EXPECT_EQ(coupling_json(a), coupling_json(b));
    auto j = nlohmann::json::parse(coupling_json(a));
    EXPECT_EQ(j["d"], 3);
    EXPECT_EQ(j["O_T"].size(), a.torus_occupied().size());
    EXPECT_TRUE(std::is_sorted(j["G_Z"].begin(), j["G_Z"].end()));
}

TEST(Coupling, MarginalsArePreserved) {
    Torus t(2, 5);
    const std::uint64_t n = 100000;
    const double p = 0.3;
    auto probe = coupled_sample(t, p, 0, 2);
    const auto edges = window_edges(probe);
    std::vector<std::uint64_t> lattice(edges.size(), 0), torus(t.edge_count(), 0);
    for (std::uint64_t i = 0; i < n; ++i) {
        auto s = coupled_sample(t, p, derive_seed(21, i), 2);
        for (std::size_t k = 0; k < edges.size(); ++k) lattice[k] += s.lattice_open(edges[k]);
        for (EdgeId e = 0; e < t.edge_count(); ++e) torus[e] += s.omega().peek(e);
    }
    expect_marginals(lattice, n, p, "lattice");
    expect_marginals(torus, n, p, "torus");
}

TEST(Coupling, ClusterSizeLawMatchesDirectSampling) {
    Torus t(2, 3);
    const std::uint64_t n = 100000;
    std::map<std::size_t, double> coupled, direct;
    for (std::uint64_t i = 0; i < n; ++i) {
        auto s = coupled_sample(t, 0.35, derive_seed(31, i), 2);
        std::set<VertexId> vs{0};
        for (EdgeId e : s.torus_occupied()) {
            auto ends = t.endpoints(e);
            vs.insert(ends.lower);
            vs.insert(ends.upper);
        }
        coupled[vs.size()] += 1.0 / n;
        direct[component_of(BondConfig::sample(t, 0.35, derive_seed(32, i)), 0).size()] += 1.0 / n;
    }
    double tv = 0;
    for (std::size_t k = 1; k <= t.vertex_count(); ++k) tv += std::abs(coupled[k] - direct[k]);
    EXPECT_LT(tv / 2, 0.02);
}

TEST(Inclusion, TrivialCases) {
    Torus t(3, 5);
    auto s = coupled_sample(t, 0.0, 5, 2);
    auto rep = check_inclusion_property(s, {0, 1, 5});
    EXPECT_TRUE(rep.holds());
    auto any = coupled_sample(t, 0.3, 5, 3);
    if (!any.truncated()) EXPECT_TRUE(check_inclusion_property(any, {0}).holds());
}

TEST(Inclusion, HoldsOnRandomSamples) {
    Torus t(3, 5);
    std::vector<int> ks;
    for (int k = 0; k <= 20; ++k) ks.push_back(k);
    int used = 0;
    for (std::uint64_t i = 0; used < 200; ++i) {
        auto s = coupled_sample(t, 0.2, derive_seed(41, i), 4);
        if (s.truncated()) continue;
        ++used;
        auto rep = check_inclusion_property(s, ks);
        ASSERT_TRUE(rep.applicable);
        EXPECT_TRUE(rep.violations.empty()) << i;
    }
}

TEST(Inclusion, DetectsABrokenCoupling) {
    // a lattice sample that ignores the torus cannot satisfy the inclusion
    Torus t(2, 5);
    auto omega = BondConfig::sample(t, 1.0, 1);
    CouplingSample s(omega, 2, LazyBonds{1, 0.0});
    auto rep = check_inclusion_property(s, {1, 2});
    EXPECT_FALSE(rep.holds());
    EXPECT_GT(rep.violations_per_k[0], 0u);
}

TEST(PropertyB, VacuousCases) {
    Torus t(2, 5);
    auto closed = coupled_sample(t, 0.0, 1, 2);
    auto rep = oracle::verify_coupling_property_b(closed, 4);
    EXPECT_TRUE(rep.holds());
    // a short torus path with an all-closed filler: both pictures agree
    auto omega = fx::config(t, fx::walk(t, {{0, 0}, {1, 0}, {1, 1}}));
    CouplingSample same(omega, 2, LazyBonds{1, 0.0});
    same.explore(kDefaultStepBudget);
    auto r2 = oracle::verify_coupling_property_b(same, 4);
    EXPECT_EQ(r2.discrepancies, 0u);
    EXPECT_TRUE(r2.holds());
    EXPECT_THROW(oracle::verify_coupling_property_b(coupled_sample(t, 0.5, 3, 4, 2), 3), std::invalid_argument);
}

TEST(PropertyB, UnwrappedLineFixture) {
    // The torus cluster is the horizontal wrap line; the lattice copy of its
    // closing edge is ghosted, the filler is fully open.
    Torus t(2, 5);
    auto omega = fx::config(t, fx::walk(t, fx::wrap_points(t, {0, 0}, 0)));
    CouplingSample s(omega, 2, LazyBonds{1, 1.0});
    s.explore(kDefaultStepBudget);
    ASSERT_FALSE(s.truncated());
    auto rep = oracle::verify_coupling_property_b(s, 4);
    EXPECT_GT(rep.discrepancies, 0u);
    EXPECT_TRUE(rep.holds());
    const Box& f = s.frame();
    const VertexId y = *f.vertex(Point{-3, 1});
    bool seen = false;
    for (const auto& w : rep.witnesses) {
        if (w.y != y || w.k != 4) continue;
        seen = true;
        EXPECT_NE(w.v1, w.v2);
        EXPECT_EQ(s.torus_vertex(w.v1), s.torus_vertex(w.v2));
    }
    EXPECT_TRUE(seen);
}

TEST(PropertyB, RandomSmallSamples) {
    Torus t(2, 5);
    int checked = 0;
    for (std::uint64_t i = 0; i < 60; ++i) {
        auto s = coupled_sample(t, 0.45, derive_seed(51, i), 2);
        if (s.truncated()) continue;
        auto rep = oracle::verify_coupling_property_b(s, 4);
        EXPECT_TRUE(rep.holds()) << i;
        checked += static_cast<int>(rep.discrepancies);
    }
    EXPECT_GT(checked, 0);
}
