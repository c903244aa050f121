#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

#include "perco/estimators.hpp"
#include "perco/oracle.hpp"

using namespace perco;

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent, size;
    explicit UnionFind(std::size_t n) : parent(n), size(n, 1) { std::iota(parent.begin(), parent.end(), 0u); }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }
};

EstimatorParams tiny_params(double p, std::size_t replicas, std::uint64_t seed) {
    EstimatorParams prm;
    prm.d = 2;
    prm.p = p;
    prm.replicas = replicas;
    prm.seed = seed;
    return prm;
}

// Exact values on the 3x3 torus at p = 1/2, averaging over all 2^18
// configurations with cycles from the brute-force enumerator.
struct TinyExact {
    double in_long_cycle = 0, long_cycle_vertices = 0, any_long_cycle = 0, count_ge5 = 0;
    double size_ge4 = 0, mean_size = 0, connected_e1 = 0, y1_zero = 0;
    double shortest_le4 = 0, shortest_le6 = 0, reach_ge1 = 0, reach_ge2 = 0;
};

const TinyExact& tiny_exact() {
    static const TinyExact exact = [] {
        const Torus t(2, 3);
        const double V = 9, threshold = std::cbrt(V) * std::cbrt(V);
        const VertexId e1 = t.vertex(Point{1, 0});
        TinyExact x;
        const std::uint32_t total = 1u << t.edge_count();
        for (std::uint32_t mask = 0; mask < total; ++mask) {
            std::vector<EdgeId> open;
            UnionFind uf(9);
            std::vector<std::vector<VertexId>> adj(9);
            for (EdgeId e = 0; e < t.edge_count(); ++e) {
                if (!(mask >> e & 1u)) continue;
                open.push_back(e);
                const auto ends = t.endpoints(e);
                uf.unite(static_cast<std::uint32_t>(ends.lower), static_cast<std::uint32_t>(ends.upper));
                adj[ends.lower].push_back(ends.upper);
                adj[ends.upper].push_back(ends.lower);
            }
            const auto size0 = uf.size[uf.find(0)];
            x.size_ge4 += size0 >= 4;
            x.mean_size += size0;
            x.connected_e1 += uf.find(0) == uf.find(static_cast<std::uint32_t>(e1));

            std::vector<int> dist(9, -1);
            std::queue<VertexId> q;
            dist[0] = 0;
            q.push(0);
            int reach = 0;
            while (!q.empty()) {
                const VertexId v = q.front();
                q.pop();
                reach = std::max(reach, dist[v]);
                for (VertexId w : adj[v])
                    if (dist[w] < 0) {
                        dist[w] = dist[v] + 1;
                        q.push(w);
                    }
            }
            x.reach_ge1 += reach >= 1;
            x.reach_ge2 += reach >= 2;

            const auto cycles = oracle::enumerate_long_cycles(t, open);
            std::vector<char> on(9, 0);
            std::size_t shortest0 = 0;
            bool y1_zero = true;
            for (const auto& c : cycles) {
                for (VertexId v : c.vertices) on[v] = 1;
                if (std::find(c.vertices.begin(), c.vertices.end(), VertexId{0}) != c.vertices.end())
                    shortest0 = shortest0 == 0 ? c.length() : std::min(shortest0, c.length());
                if (uf.size[uf.find(static_cast<std::uint32_t>(c.vertices[0]))] > threshold) y1_zero = false;
            }
            const auto count = std::count(on.begin(), on.end(), 1);
            x.in_long_cycle += on[0];
            x.long_cycle_vertices += static_cast<double>(count);
            x.any_long_cycle += !cycles.empty();
            x.count_ge5 += count >= 5;
            x.y1_zero += y1_zero;
            x.shortest_le4 += shortest0 != 0 && shortest0 <= 4;
            x.shortest_le6 += shortest0 != 0 && shortest0 <= 6;
        }
        for (double* v : {&x.in_long_cycle, &x.long_cycle_vertices, &x.any_long_cycle, &x.count_ge5, &x.size_ge4,
                          &x.mean_size, &x.connected_e1, &x.y1_zero, &x.shortest_le4, &x.shortest_le6, &x.reach_ge1,
                          &x.reach_ge2})
            *v /= total;
        return x;
    }();
    return exact;
}

void expect_within_3se(const EstimateReport& rep, const std::string& name, double truth) {
    const EstimateRow* row = rep.find(name);
    ASSERT_NE(row, nullptr) << name;
    EXPECT_EQ(row->discarded, 0u) << name;
    EXPECT_GT(row->stderr_, 0.0) << name;
    EXPECT_NEAR(row->mean, truth, 3 * row->stderr_) << name;
}

std::string csv_body(const EstimateReport& rep) { return to_csv(rep, CsvOptions{false, ""}); }

}  // namespace

TEST(LoglogSlope, ExactPowerLaw) {
    const auto fit = loglog_slope({{16, 256}, {81, 6561}, {256, 65536}});
    EXPECT_NEAR(fit.slope, 2.0, 1e-12);
    EXPECT_EQ(fit.stderr_, 0.0);
    EXPECT_NEAR(fit.r2, 1.0, 1e-12);
}

TEST(LoglogSlope, RejectsDegenerateInput) {
    EXPECT_THROW(loglog_slope({{10, 1}}), std::invalid_argument);
    EXPECT_THROW(loglog_slope({}), std::invalid_argument);
    EXPECT_THROW(loglog_slope({{10, 1}, {20, 0}}), std::invalid_argument);
    EXPECT_THROW(loglog_slope({{10, 1}, {20, -2}}), std::invalid_argument);
    EXPECT_THROW(loglog_slope({{10, 1}, {10, 2}}), std::invalid_argument);
}

TEST(LoglogSlope, NoisyCubeRoot) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::pair<double, double>> pts;
        for (double V : {16384.0, 78125.0, 279936.0}) pts.emplace_back(V, std::cbrt(V) * (1 + noise(rng)));
        EXPECT_NEAR(loglog_slope(pts).slope, 1.0 / 3.0, 0.05);
    }
}

TEST(Estimators, EmptyListsAreErrors) {
    const auto prm = tiny_params(0.5, 4, 1);
    EXPECT_THROW(est_vertex_long_cycle(prm, {}), std::invalid_argument);
    EXPECT_THROW(est_Ydelta(prm, {}, {1.0}), std::invalid_argument);
    EXPECT_THROW(est_Ydelta(prm, {3}, {0.0}), std::invalid_argument);
    EXPECT_THROW(est_long_cycle_tail(prm, {3}, {-1.0}), std::invalid_argument);
    EXPECT_THROW(est_mean_cluster_size(prm, {}), std::invalid_argument);
    EXPECT_THROW(est_two_point(prm, {3}, 3), std::invalid_argument);
    EXPECT_THROW(est_ball_boundary_sum(prm, {0}), std::invalid_argument);
    EXPECT_THROW(calibrate_pc_scan(prm, 5, {}, {1}), std::invalid_argument);
    EXPECT_THROW(calibrate_pc_scan(prm, 5, {0.5}, {}), std::invalid_argument);
}

TEST(Estimators, ClosedConfigurations) {
    auto prm = tiny_params(0.0, 20, 3);
    const auto vlc = est_vertex_long_cycle(prm, {4, 6});
    for (const auto& row : vlc.rows) EXPECT_EQ(row.mean, 0.0) << row.quantity;
    EXPECT_TRUE(vlc.slopes.empty());

    const auto y = est_Ydelta(prm, {4}, {0.5, 1.0});
    EXPECT_EQ(y.find("Ydelta_mean[delta=1]")->mean, 0.0);
    EXPECT_EQ(y.find("Ydelta_zero[delta=0.5]")->mean, 1.0);

    const auto tail = est_long_cycle_tail(prm, {4}, {1e6, 0.1});
    for (const auto& row : tail.rows) EXPECT_EQ(row.mean, 0.0) << row.quantity;

    const auto mcs = est_mean_cluster_size(prm, {4});
    EXPECT_EQ(mcs.find("mean_cluster_size")->mean, 1.0);

    const auto tp = est_two_point(prm, {4});
    EXPECT_EQ(tp.find("tau_T[x=0]")->mean, 1.0);
    EXPECT_EQ(tp.find("tau_Z[x=0]")->mean, 1.0);
    EXPECT_EQ(tp.find("tau_T[x=2]")->mean, 0.0);
    EXPECT_EQ(tp.find("tau_Z[x=1]")->mean, 0.0);

    const auto bb = est_ball_boundary_sum(prm, {1, 3});
    for (const auto& row : bb.rows) {
        EXPECT_EQ(row.mean, 0.0);
        EXPECT_FALSE(row.r.has_value());
    }
}

TEST(Estimators, FullyOpenConfigurations) {
    auto prm = tiny_params(1.0, 3, 3);
    prm.d = 3;
    EXPECT_EQ(est_ball_boundary_sum(prm, {1}).rows[0].mean, 26.0);
    EXPECT_EQ(est_mean_cluster_size(prm, {4}).find("mean_cluster_size")->mean, 64.0);
    const auto tp = est_two_point(prm, {4});
    EXPECT_EQ(tp.find("tau_T[x=2]")->mean, 1.0);
    EXPECT_EQ(tp.find("tau_Z[x=2]")->mean, 1.0);
}

TEST(Estimators, YdeltaVanishesAboveVolume) {
    auto prm = tiny_params(0.7, 30, 4);
    const auto rep = est_Ydelta(prm, {4}, {3.0, 0.5});  // 3 V^{2/3} > V = 16
    EXPECT_EQ(rep.find("Ydelta_mean[delta=3]")->mean, 0.0);
    EXPECT_EQ(rep.find("Ydelta_zero[delta=3]")->mean, 1.0);
    EXPECT_GT(rep.find("Ydelta_mean[delta=0.5]")->mean, 0.0);
}

TEST(Estimators, LCkIsMonotoneAndZeroBelowMinimumLength) {
    auto prm = tiny_params(0.6, 60, 8);
    const auto rep = est_LCk(prm, 12, {4, 5, 8, 12, 24, 48}, 4);
    EXPECT_EQ(rep.find("LCk[k=4]")->mean, 0.0);  // long cycles on r = 12 have length >= 6
    EXPECT_EQ(rep.find("LCk[k=5]")->mean, 0.0);
    double prev = 0;
    for (int k : {4, 5, 8, 12, 24, 48}) {
        const double v = rep.find("LCk[k=" + std::to_string(k) + "]")->mean;
        EXPECT_GE(v, prev) << k;
        prev = v;
    }
    EXPECT_GT(prev, 0.0);
    EXPECT_NEAR(rep.find("LCk_ratio[k=12]")->mean, rep.find("LCk[k=12]")->mean * 144 / 12, 1e-9);
}

TEST(Estimators, TailWithHugeEpsilonIsAnyLongCycle) {
    auto prm = tiny_params(0.5, 300, 9);
    const auto tail = est_long_cycle_tail(prm, {6}, {1e6});
    // the same replicas through the vertex counter
    const auto vlc = est_vertex_long_cycle(prm, {6});
    EXPECT_EQ(tail.find("tail_witness[eps=1000000]")->mean, tail.find("tail_count[eps=1000000]")->mean);
    EXPECT_GT(tail.find("tail_witness[eps=1000000]")->mean, 0.0);
    EXPECT_GT(vlc.find("long_cycle_vertices")->mean, 0.0);
}

TEST(Estimators, DiscardAccounting) {
    auto prm = tiny_params(0.5, 50, 11);
    prm.budget = 0;
    const auto rep = est_vertex_long_cycle(prm, {5});
    for (const auto& row : rep.rows) {
        EXPECT_EQ(row.replicas + row.discarded, 50u);
        EXPECT_GT(row.discarded, 0u);
    }
}

TEST(Estimators, SlopeRowsOnPowerLaw) {
    auto prm = tiny_params(1.0, 2, 1);
    const auto rep = est_mean_cluster_size(prm, {3, 5, 7});
    const SlopeRow* s = rep.slope("mean_cluster_size");
    ASSERT_NE(s, nullptr);
    EXPECT_NEAR(s->fit.slope, 1.0, 1e-12);
}

TEST(Estimators, IndependentOfThreadCount) {
    auto prm = tiny_params(0.5, 64, 21);
    prm.d = 3;
    const auto run = [&](int threads) {
        prm.threads = threads;
        EstimateReport rep = est_vertex_long_cycle(prm, {3, 4});
        rep.append(est_Ydelta(prm, {4}, {0.5, 1}));
        rep.append(est_two_point(prm, {4}));
        rep.append(est_ball_boundary_sum(prm, {2}));
        rep.append(est_LCk(prm, 4, {4, 8}));
        return csv_body(rep);
    };
    const std::string one = run(1);
    EXPECT_EQ(one, run(4));
    EXPECT_EQ(one, run(3));
}

TEST(Estimators, CsvLayout) {
    auto prm = tiny_params(0.5, 10, 2);
    EstimateReport rep = est_vertex_long_cycle(prm, {4, 6});
    rep.append(est_ball_boundary_sum(prm, {2}));
    const std::string with_meta = to_csv(rep, CsvOptions{true, "perco estimate"});
    const std::string body = csv_body(rep);
    EXPECT_EQ(with_meta.rfind("# perco estimate generated=", 0), 0u);
    EXPECT_EQ(with_meta.substr(with_meta.find('\n') + 1), body);
    std::istringstream in(body);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "quantity,d,r,L,p,replicas,discarded,mean,stderr,ci95_lo,ci95_hi,slope,slope_stderr");
    std::size_t n = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 12) << line;
        ++n;
    }
    EXPECT_EQ(n, rep.rows.size() + rep.slopes.size());
    EXPECT_EQ(rep.slopes.size(), 2u);
    EXPECT_NE(body.find("ball_boundary[n=2],2,,0,"), std::string::npos);
    const std::string jsonl = to_jsonl(rep);
    EXPECT_EQ(static_cast<std::size_t>(std::count(jsonl.begin(), jsonl.end(), '\n')), n);
}

TEST(PcScan, OpenAndNearlyClosed) {
    auto prm = tiny_params(0, 20, 5);
    const auto rep = calibrate_pc_scan(prm, 9, {1.0, 1e-9}, {1, 4, 8});
    for (int k : {1, 4, 8}) {
        const auto rows = rep.select("one_arm_kP[k=" + std::to_string(k) + "]");
        ASSERT_EQ(rows.size(), 2u);
        EXPECT_EQ(rows[0]->p, 1.0);
        EXPECT_EQ(rows[0]->mean, k);  // intrinsic diameter of the 9x9 torus is 8
        EXPECT_EQ(rows[1]->mean, 0.0);
    }
    EXPECT_NEAR(rep.select("one_arm_kP_mean")[0]->mean, 13.0 / 3.0, 1e-12);
}

class TinyTorusEstimates : public ::testing::Test {
protected:
    EstimatorParams prm = tiny_params(0.5, 4000, 2024);
};

TEST_F(TinyTorusEstimates, LongCycleQuantities) {
    const auto& x = tiny_exact();
    const auto vlc = est_vertex_long_cycle(prm, {3});
    expect_within_3se(vlc, "P_vertex_long_cycle", x.in_long_cycle);
    expect_within_3se(vlc, "long_cycle_vertices", x.long_cycle_vertices);

    const double cube = std::cbrt(9.0);
    const double eps = cube / (4 * 4.5);  // count threshold 4.5
    const auto tail = est_long_cycle_tail(prm, {3}, {1e6, eps});
    expect_within_3se(tail, "tail_witness[eps=1000000]", x.any_long_cycle);
    expect_within_3se(tail, tail.rows[3].quantity, x.count_ge5);
    ASSERT_EQ(tail.rows[3].quantity.rfind("tail_count", 0), 0u);

    const auto lck = est_LCk(prm, 3, {4, 6}, 8);
    expect_within_3se(lck, "LCk[k=4]", x.shortest_le4);
    expect_within_3se(lck, "LCk[k=6]", x.shortest_le6);
}

TEST_F(TinyTorusEstimates, YdeltaZero) {
    const auto rep = est_Ydelta(prm, {3}, {1.0});
    expect_within_3se(rep, "Ydelta_zero[delta=1]", tiny_exact().y1_zero);
}

TEST_F(TinyTorusEstimates, ClusterQuantities) {
    const auto& x = tiny_exact();
    expect_within_3se(est_cluster_size_tail(prm, {3}, {4}), "cluster_size_ge[m=4]", x.size_ge4);
    expect_within_3se(est_mean_cluster_size(prm, {3}), "mean_cluster_size", x.mean_size);
    expect_within_3se(est_two_point(prm, {3}), "tau_T[x=1]", x.connected_e1);
    const auto scan = calibrate_pc_scan(prm, 3, {0.5}, {1, 2});
    expect_within_3se(scan, "one_arm[k=1]", x.reach_ge1);
    expect_within_3se(scan, "one_arm_kP[k=2]", 2 * x.reach_ge2);
}

TEST(BallBoundaryExact, UnitBoxInThePlane) {
    const Box box(Point{0, 0}, 1);
    const BoxGraph g = box_graph(box);
    const std::uint32_t m = static_cast<std::uint32_t>(g.edges.size());
    ASSERT_EQ(m, 12u);
    double exact = 0;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        UnionFind uf(g.vertex_count);
        for (std::uint32_t i = 0; i < m; ++i)
            if (mask >> i & 1u) uf.unite(static_cast<std::uint32_t>(g.edges[i].lower), static_cast<std::uint32_t>(g.edges[i].upper));
        const auto c = uf.find(static_cast<std::uint32_t>(box.center_vertex()));
        for (VertexId v = 0; v < g.vertex_count; ++v)
            if (g.boundary[v] && uf.find(static_cast<std::uint32_t>(v)) == c) exact += 1;
    }
    exact /= 1u << m;
    auto prm = tiny_params(0.5, 4000, 31);
    expect_within_3se(est_ball_boundary_sum(prm, {1}), "ball_boundary[n=1]", exact);
}
