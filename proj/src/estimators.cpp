#include "perco/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>

#include <json.hpp>

#include "perco/bond_config.hpp"
#include "perco/cluster.hpp"
#include "perco/parallel.hpp"
#include "perco/rng.hpp"
#include "perco/stats.hpp"

namespace perco {

namespace {

constexpr std::uint64_t kTagOrigins = 0x4f52;
constexpr std::uint64_t kTagBox = 0x4258;
constexpr double kZ95 = 1.959963984540054;

std::uint64_t geometry_tag(const EstimatorParams& params, int side) {
    const std::uint64_t kind = params.model.is_spread_out() ? 1 : 0;
    return (static_cast<std::uint64_t>(params.d) << 48) | (static_cast<std::uint64_t>(side) << 24) |
           (static_cast<std::uint64_t>(params.model.step_range()) << 1) | kind;
}

std::uint64_t sample_seed(const EstimatorParams& params, int side, std::size_t i) {
    return derive_seed(params.seed, geometry_tag(params, side), i);
}

int step_range_column(const EdgeModel& model) { return model.is_spread_out() ? model.range : 0; }

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string with_param(const std::string& base, const char* key, double value) {
    return base + "[" + key + "=" + fmt(value) + "]";
}

void check_sides(const std::vector<int>& sides) {
    if (sides.empty()) throw std::invalid_argument("size list is empty");
    for (int r : sides)
        if (r < 1) throw std::invalid_argument("torus side must be positive");
}

void check_params(const EstimatorParams& params) {
    check_probability(params.p);
    if (params.d < 1) throw std::invalid_argument("dimension must be positive");
}

/// Per-replica value table: `width` columns, discarded replicas flagged.
struct ReplicaTable {
    std::size_t width = 0;
    std::vector<double> values;
    std::vector<char> kept;

    std::size_t clean() const { return static_cast<std::size_t>(std::count(kept.begin(), kept.end(), 1)); }
    std::size_t discarded() const { return kept.size() - clean(); }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> out;
        for (std::size_t i = 0; i < kept.size(); ++i)
            if (kept[i]) out.push_back(values[i * width + j]);
        return out;
    }
};

template <class F>
ReplicaTable run_replicas(std::size_t n, std::size_t width, int threads, F&& f) {
    ReplicaTable t;
    t.width = width;
    t.values.assign(n * width, 0.0);
    t.kept.assign(n, 0);
    parallel_for(n, threads, [&](std::size_t i) {
        std::span<double> out(t.values.data() + i * width, width);
        t.kept[i] = f(i, out) ? 1 : 0;
    });
    return t;
}

enum class Kind { mean, proportion };

EstimateRow make_row(std::string name, const EstimatorParams& params, std::optional<int> side, double p,
                     const ReplicaTable& table, std::size_t j, Kind kind) {
    EstimateRow row;
    row.quantity = std::move(name);
    row.d = params.d;
    row.r = side;
    row.L = step_range_column(params.model);
    row.p = p;
    row.discarded = table.discarded();
    const std::vector<double> xs = table.column(j);
    const Summary s = summarize(xs);
    row.replicas = s.n;
    row.mean = s.mean;
    row.stderr_ = s.stderr_();
    if (kind == Kind::proportion) {
        const auto k = static_cast<std::size_t>(std::count(xs.begin(), xs.end(), 1.0));
        std::tie(row.ci_lo, row.ci_hi) = wilson_interval(k, s.n);
    } else {
        row.ci_lo = s.ci_lo();
        row.ci_hi = s.ci_hi();
    }
    if (side) row.volume = std::pow(static_cast<double>(*side), params.d);
    return row;
}

EstimateRow scaled(EstimateRow row, std::string name, double factor) {
    row.quantity = std::move(name);
    row.mean *= factor;
    row.stderr_ *= std::abs(factor);
    row.ci_lo *= factor;
    row.ci_hi *= factor;
    if (row.ci_lo > row.ci_hi) std::swap(row.ci_lo, row.ci_hi);
    return row;
}

}  // namespace

const EstimateRow* EstimateReport::find(const std::string& name, std::optional<int> r) const {
    for (const auto& row : rows)
        if (row.quantity == name && (!r || row.r == r)) return &row;
    return nullptr;
}

std::vector<const EstimateRow*> EstimateReport::select(const std::string& name) const {
    std::vector<const EstimateRow*> out;
    for (const auto& row : rows)
        if (row.quantity == name) out.push_back(&row);
    return out;
}

const SlopeRow* EstimateReport::slope(const std::string& name) const {
    for (const auto& s : slopes)
        if (s.quantity == name) return &s;
    return nullptr;
}

void EstimateReport::append(const EstimateReport& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    slopes.insert(slopes.end(), other.slopes.begin(), other.slopes.end());
}

SlopeFit loglog_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw std::invalid_argument("slope fit needs at least two points");
    const double n = static_cast<double>(points.size());
    double sx = 0, sy = 0;
    for (const auto& [v, y] : points) {
        if (!(v > 0) || !(y > 0)) throw std::invalid_argument("slope fit needs positive values");
        sx += std::log(v);
        sy += std::log(y);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [v, y] : points) {
        const double dx = std::log(v) - mx, dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0)) throw std::invalid_argument("slope fit needs distinct volumes");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    double sse = 0;
    for (const auto& [v, y] : points) {
        const double e = std::log(y) - my - fit.slope * (std::log(v) - mx);
        sse += e * e;
    }
    fit.stderr_ = points.size() > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
    // rounding noise on an exact power law
    if (fit.stderr_ < 1e-12 * std::max(1.0, std::abs(fit.slope))) fit.stderr_ = 0.0;
    fit.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
    return fit;
}

void fit_slopes(EstimateReport& report, const std::vector<std::string>& names) {
    for (const auto& name : names) {
        std::vector<std::pair<double, double>> pts;
        const EstimateRow* first = nullptr;
        bool positive = true;
        for (const EstimateRow* row : report.select(name)) {
            if (!row->r) continue;
            if (!first) first = row;
            if (!(row->mean > 0)) positive = false;
            pts.emplace_back(row->volume, row->mean);
        }
        if (pts.size() < 2 || !positive) continue;
        report.slopes.push_back({name, first->d, first->L, first->p, loglog_slope(pts)});
    }
}

EstimateReport est_vertex_long_cycle(const EstimatorParams& params, const std::vector<int>& sides) {
    check_params(params);
    check_sides(sides);
    EstimateReport report;
    report.quantity = "vertex-long-cycle";
    for (int r : sides) {
        const Torus torus(params.d, r, params.model);
        const double V = static_cast<double>(torus.vertex_count());
        auto table = run_replicas(params.replicas, 2, params.threads, [&](std::size_t i, std::span<double> out) {
            const BondConfig cfg = BondConfig::sample(torus, params.p, sample_seed(params, r, i));
            const LongCycleCount c = long_cycle_vertex_count(cfg, params.budget);
            if (c.unknown) return false;
            out[0] = static_cast<double>(c.count) / V;
            out[1] = static_cast<double>(c.count);
            return true;
        });
        report.rows.push_back(make_row("P_vertex_long_cycle", params, r, params.p, table, 0, Kind::mean));
        report.rows.push_back(make_row("long_cycle_vertices", params, r, params.p, table, 1, Kind::mean));
    }
    fit_slopes(report, {"P_vertex_long_cycle", "long_cycle_vertices"});
    return report;
}

EstimateReport est_LCk(const EstimatorParams& params, int side, const std::vector<int>& ks, int origins) {
    check_params(params);
    check_sides({side});
    if (ks.empty()) throw std::invalid_argument("k schedule is empty");
    if (origins < 1) throw std::invalid_argument("need at least one origin per replica");
    const int kmax = *std::max_element(ks.begin(), ks.end());
    const Torus torus(params.d, side, params.model);
    const std::uint64_t V = torus.vertex_count();
    auto table = run_replicas(params.replicas, ks.size(), params.threads, [&](std::size_t i, std::span<double> out) {
        const BondConfig cfg = BondConfig::sample(torus, params.p, sample_seed(params, side, i));
        const std::uint64_t key = derive_seed(params.seed, geometry_tag(params, side) ^ kTagOrigins, i);
        std::vector<std::size_t> hits(ks.size(), 0);
        for (int o = 0; o < origins; ++o) {
            const VertexId x = counter_hash(key, static_cast<std::uint64_t>(o)) % V;
            const auto a = shortest_long_cycle_length(cfg, x, kmax, params.budget);
            if (a.unknown()) return false;
            if (!a.yes() || !a.value) continue;
            for (std::size_t j = 0; j < ks.size(); ++j)
                if (static_cast<int>(*a.value) <= ks[j]) ++hits[j];
        }
        for (std::size_t j = 0; j < ks.size(); ++j) out[j] = static_cast<double>(hits[j]) / origins;
        return true;
    });
    EstimateReport report;
    report.quantity = "LCk";
    for (std::size_t j = 0; j < ks.size(); ++j) {
        const EstimateRow row = make_row(with_param("LCk", "k", ks[j]), params, side, params.p, table, j, Kind::mean);
        report.rows.push_back(row);
        report.rows.push_back(scaled(row, with_param("LCk_ratio", "k", ks[j]), static_cast<double>(V) / ks[j]));
    }
    return report;
}

EstimateReport est_Ydelta(const EstimatorParams& params, const std::vector<int>& sides, const std::vector<double>& deltas) {
    check_params(params);
    check_sides(sides);
    if (deltas.empty()) throw std::invalid_argument("delta list is empty");
    for (double delta : deltas)
        if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
    const double dmin = *std::min_element(deltas.begin(), deltas.end());
    EstimateReport report;
    report.quantity = "Ydelta";
    for (int r : sides) {
        const Torus torus(params.d, r, params.model);
        const double cube = std::cbrt(static_cast<double>(torus.vertex_count()));
        const std::size_t m = deltas.size();
        auto table = run_replicas(params.replicas, 2 * m, params.threads, [&](std::size_t i, std::span<double> out) {
            const BondConfig cfg = BondConfig::sample(torus, params.p, sample_seed(params, r, i));
            const ComponentLabels labels = label_components(cfg);
            std::vector<std::pair<double, std::int64_t>> big;  // (size, Y) above the smallest threshold
            for (std::uint32_t id = 0; id < labels.count(); ++id) {
                const double size = static_cast<double>(labels.sizes[id]);
                if (!(size > dmin * cube * cube)) break;
                if (labels.edge_counts[id] + 1 <= labels.sizes[id]) continue;
                const YAnswer y = compute_Y(torus, extract_cluster(cfg, labels, id), params.budget);
                if (y.unknown()) return false;
                big.emplace_back(size, y.value.value);
            }
            for (std::size_t j = 0; j < m; ++j) {
                const double threshold = deltas[j] * cube * cube;
                std::int64_t total = 0;
                for (const auto& [size, y] : big)
                    if (size > threshold) total += y;
                out[j] = static_cast<double>(total);
                out[m + j] = total == 0 ? 1.0 : 0.0;
            }
            return true;
        });
        for (std::size_t j = 0; j < m; ++j) {
            const double delta = deltas[j];
            const EstimateRow mean = make_row(with_param("Ydelta_mean", "delta", delta), params, r, params.p, table, j, Kind::mean);
            report.rows.push_back(mean);
            report.rows.push_back(scaled(mean, with_param("delta_Ydelta_mean", "delta", delta), delta));
            report.rows.push_back(
                make_row(with_param("Ydelta_zero", "delta", delta), params, r, params.p, table, m + j, Kind::proportion));
        }
    }
    return report;
}

EstimateReport est_long_cycle_tail(const EstimatorParams& params, const std::vector<int>& sides,
                                   const std::vector<double>& eps) {
    check_params(params);
    check_sides(sides);
    if (eps.empty()) throw std::invalid_argument("epsilon list is empty");
    for (double e : eps)
        if (!(e > 0)) throw std::invalid_argument("epsilon must be positive");
    EstimateReport report;
    report.quantity = "long-cycle-tail";
    for (int r : sides) {
        const Torus torus(params.d, r, params.model);
        const double cube = std::cbrt(static_cast<double>(torus.vertex_count()));
        const std::size_t m = eps.size();
        auto table = run_replicas(params.replicas, 2 * m, params.threads, [&](std::size_t i, std::span<double> out) {
            const BondConfig cfg = BondConfig::sample(torus, params.p, sample_seed(params, r, i));
            const LongCycleCount c = long_cycle_vertex_count(cfg, params.budget);
            if (c.unknown) return false;
            for (std::size_t j = 0; j < m; ++j) {
                out[j] = static_cast<double>(c.longest_witness) >= cube / eps[j] && c.longest_witness > 0 ? 1.0 : 0.0;
                out[m + j] = static_cast<double>(c.count) >= cube / (torus.degree() * eps[j]) && c.count > 0 ? 1.0 : 0.0;
            }
            return true;
        });
        for (std::size_t j = 0; j < m; ++j) {
            report.rows.push_back(
                make_row(with_param("tail_witness", "eps", eps[j]), params, r, params.p, table, j, Kind::proportion));
            report.rows.push_back(
                make_row(with_param("tail_count", "eps", eps[j]), params, r, params.p, table, m + j, Kind::proportion));
        }
    }
    return report;
}

EstimateReport est_two_point(const EstimatorParams& params, const std::vector<int>& sides, int box_factor, int sources) {
    check_params(params);
    check_sides(sides);
    if (box_factor < 4) throw std::invalid_argument("lattice box too small: side must be at least 4r");
    if (sources < 1) throw std::invalid_argument("need at least one source per replica");
    EstimateReport report;
    report.quantity = "two-point";
    for (int r : sides) {
        const Torus torus(params.d, r, params.model);
        const int jmax = r / 2;
        const std::size_t m = static_cast<std::size_t>(jmax) + 1;
        const double V = static_cast<double>(torus.vertex_count());

        auto torus_table = run_replicas(params.replicas, m, params.threads, [&](std::size_t i, std::span<double> out) {
            const BondConfig cfg = BondConfig::sample(torus, params.p, sample_seed(params, r, i));
            const ComponentLabels labels = label_components(cfg);
            out[0] = 1.0;
            for (int j = 1; j <= jmax; ++j) {
                std::uint64_t same = 0;
                Point y(static_cast<std::size_t>(params.d));
                for (VertexId u = 0; u < torus.vertex_count(); ++u) {
                    y = torus.coords(u);
                    y[0] += j;
                    if (labels.label[u] == labels.label[torus.vertex(y)]) ++same;
                }
                out[static_cast<std::size_t>(j)] = static_cast<double>(same) / V;
            }
            return true;
        });

        // sources spread over the central torus-sized cube, at least 1.5 r from the free boundary
        const int radius = (box_factor * r + 1) / 2;
        const Box box(Point(static_cast<std::size_t>(params.d), 0), radius, params.model);
        const std::int64_t lo = -(r / 2);
        auto box_table = run_replicas(params.replicas, m, params.threads, [&](std::size_t i, std::span<double> out) {
            const std::uint64_t key = derive_seed(params.seed, geometry_tag(params, r) ^ kTagBox, i);
            const LazyBonds bonds{derive_seed(key, 0), params.p};
            for (int s = 0; s < sources; ++s) {
                Point u(static_cast<std::size_t>(params.d));
                for (int a = 0; a < params.d; ++a)
                    u[static_cast<std::size_t>(a)] = lo + static_cast<std::int64_t>(
                                                              counter_hash(key, static_cast<std::uint64_t>(s * params.d + a + 1)) %
                                                              static_cast<std::uint64_t>(r));
                std::vector<VertexId> targets;
                for (int j = 0; j <= jmax; ++j) {
                    Point x = u;
                    x[0] += j;
                    targets.push_back(*box.vertex(x));
                }
                std::size_t found = 0;
                bfs_open(
                    box, targets[0], std::numeric_limits<int>::max(), [&](EdgeId e) { return bonds.is_open(e); },
                    [&](VertexId v, int) {
                        for (std::size_t j = 0; j < m; ++j)
                            if (targets[j] == v) {
                                out[j] += 1.0 / sources;
                                ++found;
                            }
                        return found < m;
                    });
            }
            return true;
        });

        const double scale = std::pow(V, 2.0 / 3.0);
        for (std::size_t j = 0; j < m; ++j) {
            const EstimateRow t = make_row(with_param("tau_T", "x", j), params, r, params.p, torus_table, j, Kind::mean);
            const EstimateRow z = make_row(with_param("tau_Z", "x", j), params, r, params.p, box_table, j, Kind::mean);
            EstimateRow diff = t;
            diff.quantity = with_param("tau_excess", "x", j);
            diff.mean = (t.mean - z.mean) * scale;
            diff.stderr_ = std::hypot(t.stderr_, z.stderr_) * scale;
            diff.ci_lo = diff.mean - kZ95 * diff.stderr_;
            diff.ci_hi = diff.mean + kZ95 * diff.stderr_;
            report.rows.push_back(t);
            report.rows.push_back(z);
            report.rows.push_back(diff);
        }
    }
    return report;
}

EstimateReport est_ball_boundary_sum(const EstimatorParams& params, const std::vector<int>& radii) {
    check_params(params);
    if (radii.empty()) throw std::invalid_argument("radius list is empty");
    for (int n : radii)
        if (n < 1) throw std::invalid_argument("box radius must be at least 1");
    EstimateReport report;
    report.quantity = "ball-boundary";
    for (int n : radii) {
        const Box box(Point(static_cast<std::size_t>(params.d), 0), n, params.model);
        const std::uint64_t tag = (static_cast<std::uint64_t>(params.d) << 48) | (static_cast<std::uint64_t>(n) << 24) |
                                  (static_cast<std::uint64_t>(params.model.step_range()) << 16) | kTagBox;
        auto table = run_replicas(params.replicas, 1, params.threads, [&](std::size_t i, std::span<double> out) {
            const LazyBonds bonds{derive_seed(params.seed, tag, i), params.p};
            std::uint64_t hits = 0;
            bfs_open(
                box, box.center_vertex(), std::numeric_limits<int>::max(), [&](EdgeId e) { return bonds.is_open(e); },
                [&](VertexId v, int) {
                    if (box.on_boundary(v)) ++hits;
                    return true;
                });
            out[0] = static_cast<double>(hits);
            return true;
        });
        report.rows.push_back(make_row(with_param("ball_boundary", "n", n), params, std::nullopt, params.p, table, 0, Kind::mean));
    }
    return report;
}

EstimateReport est_mean_cluster_size(const EstimatorParams& params, const std::vector<int>& sides) {
    check_params(params);
    check_sides(sides);
    EstimateReport report;
    report.quantity = "mean-cluster-size";
    for (int r : sides) {
        const Torus torus(params.d, r, params.model);
        const double V = static_cast<double>(torus.vertex_count());
        auto table = run_replicas(params.replicas, 1, params.threads, [&](std::size_t i, std::span<double> out) {
            const BondConfig cfg = BondConfig::sample(torus, params.p, sample_seed(params, r, i));
            const ComponentLabels labels = label_components(cfg);
            double s2 = 0;
            for (std::uint64_t s : labels.sizes) s2 += static_cast<double>(s) * static_cast<double>(s);
            out[0] = s2 / V;
            return true;
        });
        const EstimateRow row = make_row("mean_cluster_size", params, r, params.p, table, 0, Kind::mean);
        report.rows.push_back(row);
        report.rows.push_back(scaled(row, "mean_cluster_size_scaled", 1.0 / std::cbrt(V)));
    }
    fit_slopes(report, {"mean_cluster_size"});
    return report;
}

EstimateReport est_cluster_size_tail(const EstimatorParams& params, const std::vector<int>& sides,
                                     const std::vector<std::uint64_t>& thresholds) {
    check_params(params);
    check_sides(sides);
    if (thresholds.empty()) throw std::invalid_argument("threshold list is empty");
    EstimateReport report;
    report.quantity = "cluster-size-tail";
    for (int r : sides) {
        const Torus torus(params.d, r, params.model);
        auto table = run_replicas(params.replicas, thresholds.size(), params.threads, [&](std::size_t i, std::span<double> out) {
            const BondConfig cfg = BondConfig::sample(torus, params.p, sample_seed(params, r, i));
            const std::size_t size = component_of(cfg, 0).size();
            for (std::size_t j = 0; j < thresholds.size(); ++j) out[j] = size >= thresholds[j] ? 1.0 : 0.0;
            return true;
        });
        for (std::size_t j = 0; j < thresholds.size(); ++j)
            report.rows.push_back(make_row(with_param("cluster_size_ge", "m", static_cast<double>(thresholds[j])), params, r,
                                           params.p, table, j, Kind::proportion));
    }
    return report;
}

EstimateReport calibrate_pc_scan(const EstimatorParams& params, int side, const std::vector<double>& ps,
                                 const std::vector<int>& ks) {
    if (ps.empty()) throw std::invalid_argument("p grid is empty");
    if (ks.empty()) throw std::invalid_argument("k grid is empty");
    check_sides({side});
    for (double p : ps) check_probability(p);
    for (int k : ks)
        if (k < 1) throw std::invalid_argument("k must be positive");
    const int kmax = *std::max_element(ks.begin(), ks.end());
    const Torus torus(params.d, side, params.model);
    EstimateReport report;
    report.quantity = "pc-scan";
    for (double p : ps) {
        const std::size_t m = ks.size();
        auto table = run_replicas(params.replicas, m + 1, params.threads, [&](std::size_t i, std::span<double> out) {
            const LazyBonds bonds{sample_seed(params, side, i), p};
            int reach = 0;
            bfs_open(
                torus, 0, kmax, [&](EdgeId e) { return bonds.is_open(e); },
                [&](VertexId, int dist) {
                    reach = std::max(reach, dist);
                    return true;
                });
            double sum = 0;
            for (std::size_t j = 0; j < m; ++j) {
                out[j] = reach >= ks[j] ? 1.0 : 0.0;
                sum += ks[j] * out[j];
            }
            out[m] = sum / static_cast<double>(m);
            return true;
        });
        for (std::size_t j = 0; j < m; ++j) {
            const EstimateRow row = make_row(with_param("one_arm", "k", ks[j]), params, side, p, table, j, Kind::proportion);
            report.rows.push_back(row);
            report.rows.push_back(scaled(row, with_param("one_arm_kP", "k", ks[j]), ks[j]));
        }
        report.rows.push_back(make_row("one_arm_kP_mean", params, side, p, table, m, Kind::mean));
    }
    return report;
}

bool BandResult::pass() const {
    return !items.empty() && std::all_of(items.begin(), items.end(), [](const auto& item) { return item.first; });
}

namespace {

std::string row_label(const EstimateRow& row) {
    return row.quantity + (row.r ? " r=" + std::to_string(*row.r) : "") + " mean=" + fmt(row.mean);
}

std::vector<const EstimateRow*> rows_with_prefix(const EstimateReport& report, const std::string& prefix) {
    std::vector<const EstimateRow*> out;
    for (const auto& row : report.rows)
        if (row.quantity.rfind(prefix, 0) == 0) out.push_back(&row);
    return out;
}

}  // namespace

BandResult check_slope(const EstimateReport& report, const std::string& name, double target, double tol) {
    BandResult out;
    const SlopeRow* s = report.slope(name);
    if (!s) {
        out.require(false, name + " has no slope fit");
        return out;
    }
    out.require(std::abs(s->fit.slope - target) <= tol,
                name + " slope " + fmt(s->fit.slope) + " +- " + fmt(s->fit.stderr_) + " vs " + fmt(target) + " +- " + fmt(tol));
    return out;
}

BandResult check_ratio_band(const std::vector<const EstimateRow*>& rows, double factor) {
    BandResult out;
    if (rows.empty()) {
        out.require(false, "no rows");
        return out;
    }
    double lo = rows[0]->mean, hi = rows[0]->mean;
    std::string what;
    for (const EstimateRow* row : rows) {
        lo = std::min(lo, row->mean);
        hi = std::max(hi, row->mean);
        what += (what.empty() ? "" : ", ") + row_label(*row);
    }
    out.require(lo > 0 && hi <= factor * lo, "max/min " + (lo > 0 ? fmt(hi / lo) : std::string("inf")) + " <= " + fmt(factor) + " over " + what);
    return out;
}

BandResult check_proportion_interval(const std::vector<const EstimateRow*>& rows, double lo, double hi) {
    BandResult out;
    if (rows.empty()) out.require(false, "no rows");
    for (const EstimateRow* row : rows)
        out.require(row->mean > lo && row->mean < hi && row->ci_lo > 0 && row->ci_hi < 1,
                    row_label(*row) + " in (" + fmt(lo) + ", " + fmt(hi) + ") with 95% interval [" + fmt(row->ci_lo) + ", " +
                        fmt(row->ci_hi) + "] inside (0, 1)");
    return out;
}

BandResult check_upper_bound(const std::vector<const EstimateRow*>& rows, double bound) {
    BandResult out;
    if (rows.empty()) out.require(false, "no rows");
    for (const EstimateRow* row : rows) out.require(row->mean <= bound, row_label(*row) + " <= " + fmt(bound));
    return out;
}

BandResult check_nonincreasing(const std::vector<const EstimateRow*>& rows) {
    BandResult out;
    std::string what;
    bool ok = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        what += (what.empty() ? "" : " >= ") + row_label(*rows[i]);
        if (i > 0 && rows[i]->mean > rows[i - 1]->mean) ok = false;
    }
    out.require(ok, "nonincreasing: " + what);
    return out;
}

BandResult check_discard_rate(const EstimateReport& report, double max_rate) {
    BandResult out;
    double worst = 0;
    for (const auto& row : report.rows) {
        const double total = static_cast<double>(row.replicas + row.discarded);
        if (total > 0) worst = std::max(worst, static_cast<double>(row.discarded) / total);
    }
    out.require(worst < max_rate, "discard rate " + fmt(worst) + " < " + fmt(max_rate));
    return out;
}

BandResult check_report(const EstimateReport& report) {
    BandResult out;
    auto merge = [&](const BandResult& b) { out.merge(b); };
    const std::string& q = report.quantity;
    if (q == "vertex-long-cycle") {
        merge(check_slope(report, "long_cycle_vertices", 1.0 / 3.0, 0.2));
        merge(check_discard_rate(report, 0.1));
    } else if (q == "mean-cluster-size") {
        merge(check_ratio_band(report.select("mean_cluster_size_scaled"), 3.0));
    } else if (q == "Ydelta") {
        const auto zero = report.select("Ydelta_zero[delta=1]");
        if (!zero.empty()) merge(check_proportion_interval(zero, 0.05, 0.999));
        merge(check_ratio_band(rows_with_prefix(report, "delta_Ydelta_mean["), 5.0));
        merge(check_discard_rate(report, 0.1));
    } else if (q == "ball-boundary") {
        merge(check_ratio_band(rows_with_prefix(report, "ball_boundary["), 3.0));
    } else if (q == "LCk") {
        merge(check_ratio_band(rows_with_prefix(report, "LCk_ratio["), 10.0));
    } else if (q == "long-cycle-tail") {
        std::vector<std::optional<int>> sides;
        for (const auto& row : report.rows)
            if (std::find(sides.begin(), sides.end(), row.r) == sides.end()) sides.push_back(row.r);
        for (const auto& r : sides) {
            std::vector<const EstimateRow*> rows;
            std::vector<double> eps;
            for (const auto& row : report.rows)
                if (row.r == r && row.quantity.rfind("tail_count[", 0) == 0) {
                    rows.push_back(&row);
                    eps.push_back(std::stod(row.quantity.substr(row.quantity.find('=') + 1)));
                }
            std::vector<std::size_t> idx(rows.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return eps[a] > eps[b]; });
            std::vector<const EstimateRow*> ordered;
            for (std::size_t i : idx) ordered.push_back(rows[i]);
            merge(check_nonincreasing(ordered));
        }
    } else if (q == "two-point") {
        merge(check_upper_bound(report.select("tau_excess[x=2]"), 10.0));
    } else {
        throw std::invalid_argument("no acceptance band defined for quantity " + q);
    }
    return out;
}

std::string to_csv(const EstimateReport& report, const CsvOptions& options) {
    std::string out;
    if (options.header_meta) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out += "# " + (options.meta.empty() ? report.quantity : options.meta) + " generated=" + stamp + "\n";
    }
    out += "quantity,d,r,L,p,replicas,discarded,mean,stderr,ci95_lo,ci95_hi,slope,slope_stderr\n";
    for (const auto& row : report.rows) {
        out += row.quantity + "," + std::to_string(row.d) + "," + (row.r ? std::to_string(*row.r) : "") + "," +
               std::to_string(row.L) + "," + fmt(row.p) + "," + std::to_string(row.replicas) + "," +
               std::to_string(row.discarded) + "," + fmt(row.mean) + "," + fmt(row.stderr_) + "," + fmt(row.ci_lo) + "," +
               fmt(row.ci_hi) + ",,\n";
    }
    for (const auto& s : report.slopes) {
        out += s.quantity + "," + std::to_string(s.d) + ",," + std::to_string(s.L) + "," + fmt(s.p) + ",,,,,,," +
               fmt(s.fit.slope) + "," + fmt(s.fit.stderr_) + "\n";
    }
    return out;
}

std::string to_jsonl(const EstimateReport& report) {
    std::string out;
    for (const auto& row : report.rows) {
        nlohmann::json j;
        j["quantity"] = row.quantity;
        j["d"] = row.d;
        j["r"] = row.r ? nlohmann::json(*row.r) : nlohmann::json(nullptr);
        j["L"] = row.L;
        j["p"] = row.p;
        j["replicas"] = row.replicas;
        j["discarded"] = row.discarded;
        j["mean"] = row.mean;
        j["stderr"] = row.stderr_;
        j["ci95_lo"] = row.ci_lo;
        j["ci95_hi"] = row.ci_hi;
        out += j.dump() + "\n";
    }
    for (const auto& s : report.slopes) {
        nlohmann::json j;
        j["quantity"] = s.quantity;
        j["d"] = s.d;
        j["L"] = s.L;
        j["p"] = s.p;
        j["slope"] = s.fit.slope;
        j["slope_stderr"] = s.fit.stderr_;
        j["r2"] = s.fit.r2;
        out += j.dump() + "\n";
    }
    return out;
}

}  // namespace perco
