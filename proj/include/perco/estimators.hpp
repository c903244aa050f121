#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perco/cycles.hpp"
#include "perco/lattice.hpp"

namespace perco {

/// Shared Monte Carlo settings. Torus quantities take the side lengths
/// separately.
struct EstimatorParams {
    int d = 7;
    EdgeModel model = EdgeModel::nearest_neighbor();
    double p = 0.0;
    std::size_t replicas = 100;
    std::uint64_t seed = 1;
    std::uint64_t budget = kDefaultBudget;
    int threads = 1;
};

struct EstimateRow {
    std::string quantity;  // base name, with a [key=value] suffix for extra parameters
    int d = 0;
    std::optional<int> r;  // empty for lattice-box quantities
    int L = 0;             // step range; 0 for nearest-neighbour
    double p = 0.0;
    std::size_t replicas = 0;  // clean replicas
    std::size_t discarded = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double volume = 0.0;  // r^d for torus rows
};

struct SlopeFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    double r2 = 1.0;
};

struct SlopeRow {
    std::string quantity;
    int d = 0;
    int L = 0;
    double p = 0.0;
    SlopeFit fit;
};

struct EstimateReport {
    std::string quantity;
    std::vector<EstimateRow> rows;
    std::vector<SlopeRow> slopes;

    /// First row with this exact quantity name and side (nullptr if none).
    const EstimateRow* find(const std::string& name, std::optional<int> r = std::nullopt) const;
    std::vector<const EstimateRow*> select(const std::string& name) const;
    const SlopeRow* slope(const std::string& name) const;
    void append(const EstimateReport& other);
};

/// OLS of log y on log V. Throws std::invalid_argument on fewer than two
/// points, on non-positive values, or when all V coincide.
SlopeFit loglog_slope(const std::vector<std::pair<double, double>>& points);

/// Adds a slope row for every listed quantity present at two or more sizes
/// with positive means.
void fit_slopes(EstimateReport& report, const std::vector<std::string>& names);

// Torus estimators. Each throws std::invalid_argument on an empty size list.

/// P_vertex_long_cycle = #long-cycle vertices / V and long_cycle_vertices,
/// with slopes against log V.
EstimateReport est_vertex_long_cycle(const EstimatorParams& params, const std::vector<int>& sides);

/// LCk[k=..]: fraction of sampled origins whose shortest long cycle has
/// length <= k; LCk_ratio[k=..] = LCk * V / k.
EstimateReport est_LCk(const EstimatorParams& params, int side, const std::vector<int>& ks, int origins = 8);

/// Ydelta_mean, delta_Ydelta_mean and Ydelta_zero per delta and size.
EstimateReport est_Ydelta(const EstimatorParams& params, const std::vector<int>& sides, const std::vector<double>& deltas);

/// tail_witness[eps=..]: a found long cycle has length >= V^{1/3}/eps;
/// tail_count[eps=..]: #long-cycle vertices >= V^{1/3}/(2 d eps).
EstimateReport est_long_cycle_tail(const EstimatorParams& params, const std::vector<int>& sides,
                                   const std::vector<double>& eps);

/// tau_T[x=j] (torus, averaged over all translates), tau_Z[x=j] (free box of
/// side >= box_factor r, averaged over `sources` uniform points of the
/// central r-cube) and tau_excess[x=j] = (tau_T - tau_Z) V^{2/3}, for
/// x = j e_1 with j = 0..floor(r/2). Throws std::invalid_argument when
/// box_factor < 4.
EstimateReport est_two_point(const EstimatorParams& params, const std::vector<int>& sides, int box_factor = 4,
                             int sources = 64);

/// ball_boundary[n=..]: number of x on the boundary of Q_n joined to the
/// center inside Q_n. Throws std::invalid_argument when some n < 1.
EstimateReport est_ball_boundary_sum(const EstimatorParams& params, const std::vector<int>& radii);

/// mean_cluster_size = sum |C|^2 / V per replica, and
/// mean_cluster_size_scaled = mean_cluster_size * V^{-1/3}.
EstimateReport est_mean_cluster_size(const EstimatorParams& params, const std::vector<int>& sides);

/// cluster_size_ge[m=..]: P(|C(0)| >= m).
EstimateReport est_cluster_size_tail(const EstimatorParams& params, const std::vector<int>& sides,
                                     const std::vector<std::uint64_t>& thresholds);

/// One-arm scan on the torus: for each p, one_arm[k=..] = P(the intrinsic
/// ball around 0 has a nonempty shell at radius k), one_arm_kP[k=..] = k
/// times that, and one_arm_kP_mean averaged over the k-grid.
/// params.p is ignored. Throws std::invalid_argument on an empty p or k grid.
EstimateReport calibrate_pc_scan(const EstimatorParams& params, int side, const std::vector<double>& ps,
                                 const std::vector<int>& ks);

struct BandResult {
    std::vector<std::pair<bool, std::string>> items;

    bool pass() const;
    void require(bool ok, const std::string& what) { items.emplace_back(ok, what); }
    void merge(const BandResult& other) { items.insert(items.end(), other.items.begin(), other.items.end()); }
};

/// Fitted slope of `name` within target +- tol.
BandResult check_slope(const EstimateReport& report, const std::string& name, double target, double tol);
/// All means positive with max/min <= factor.
BandResult check_ratio_band(const std::vector<const EstimateRow*>& rows, double factor);
/// Every mean strictly inside (lo, hi) and every 95% interval inside (0, 1).
BandResult check_proportion_interval(const std::vector<const EstimateRow*>& rows, double lo, double hi);
/// Every mean <= bound.
BandResult check_upper_bound(const std::vector<const EstimateRow*>& rows, double bound);
/// Means nonincreasing along the given order.
BandResult check_nonincreasing(const std::vector<const EstimateRow*>& rows);
/// discarded / (clean + discarded) < max_rate on every row.
BandResult check_discard_rate(const EstimateReport& report, double max_rate);
/// The engineering band attached to each estimator. Throws
/// std::invalid_argument for quantities without one.
BandResult check_report(const EstimateReport& report);

struct CsvOptions {
    bool header_meta = true;
    std::string meta;  // free text for the leading comment line
};

std::string to_csv(const EstimateReport& report, const CsvOptions& options = {});
std::string to_jsonl(const EstimateReport& report);

}  // namespace perco
