#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "perco/bond_config.hpp"
#include "perco/coupling.hpp"
#include "perco/critical_point.hpp"
#include "perco/estimators.hpp"
#include "perco/fixtures.hpp"
#include "perco/oracle.hpp"
#include "perco/parallel.hpp"
#include "perco/rng.hpp"
#include "perco/surgery.hpp"

using namespace perco;

namespace {

enum Exit { kOk = 0, kUsage = 1, kRuntime = 2, kCheckFailed = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::optional<int> d;
    std::vector<int> r;
    std::string model = "nn";
    int L = 1;
    std::optional<double> p;
    bool pc_ref = false;
    std::string pc_table;
    std::size_t replicas = 100;
    std::uint64_t seed = 1;
    std::uint64_t budget = kDefaultBudget;
    int threads = default_threads();
    std::string out;
    std::string format = "csv";
    bool no_header_meta = false;

    // per-quantity parameters
    std::vector<int> k{4, 8, 16, 32};
    std::vector<double> delta{0.5, 1.0, 2.0};
    std::vector<double> eps{0.5, 1.0, 2.0};
    std::vector<int> n{2, 4, 6, 8};
    std::vector<std::uint64_t> m{4};
    std::vector<double> p_grid;
    int origins = 8;
    int box_factor = 4;
    int sources = 64;
    int window_factor = 4;
    int k_max = 20;
    std::uint64_t step_budget = kDefaultStepBudget;
    std::uint64_t x = 0;
};

void error(const char* kind, const std::string& message) { std::cerr << "perco: error[" << kind << "]: " << message << "\n"; }

EdgeModel model_of(const Options& o) {
    if (o.model == "nn") return EdgeModel::nearest_neighbor();
    if (o.model == "spread-out") {
        if (o.L < 1) throw UsageError("--L must be at least 1 for the spread-out model");
        return EdgeModel::spread_out(o.L);
    }
    throw UsageError("--model must be nn or spread-out");
}

int dim_of(const Options& o) {
    if (!o.d) throw UsageError("--d is required");
    if (*o.d < 1) throw UsageError("--d must be positive");
    return *o.d;
}

const std::vector<int>& sides_of(const Options& o) {
    if (o.r.empty()) throw UsageError("--r is required");
    for (int r : o.r)
        if (r < 1) throw UsageError("--r values must be positive");
    return o.r;
}

int single_side(const Options& o) {
    const auto& r = sides_of(o);
    if (r.size() != 1) throw UsageError("this command takes a single --r");
    return r[0];
}

CriticalPointTable table_of(const Options& o) {
    return o.pc_table.empty() ? CriticalPointTable::bundled() : CriticalPointTable::load(o.pc_table);
}

double p_of(const Options& o) {
    if (o.p && o.pc_ref) throw UsageError("give either --p or --pc-ref, not both");
    if (o.pc_ref) return table_of(o).lookup(dim_of(o), model_of(o)).pc;
    if (!o.p) throw UsageError("--p or --pc-ref is required");
    if (!(*o.p >= 0.0 && *o.p <= 1.0)) throw UsageError("--p must lie in [0, 1]");
    return *o.p;
}

EstimatorParams params_of(const Options& o, bool needs_p = true) {
    EstimatorParams prm;
    prm.d = dim_of(o);
    prm.model = model_of(o);
    prm.p = needs_p ? p_of(o) : 0.0;
    if (o.replicas < 1) throw UsageError("--replicas must be positive");
    if (o.threads < 1) throw UsageError("--threads must be positive");
    prm.replicas = o.replicas;
    prm.seed = o.seed;
    prm.budget = o.budget;
    prm.threads = o.threads;
    return prm;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + o.out);
    f << text;
}

int cmd_sample(const Options& o) {
    const Torus torus(dim_of(o), single_side(o), model_of(o));
    const BondConfig cfg = BondConfig::sample(torus, p_of(o), o.seed);
    nlohmann::json j;
    j["d"] = torus.dim();
    j["r"] = torus.side();
    j["model"] = torus.model().name();
    j["L"] = torus.model().step_range();
    j["p"] = cfg.p();
    j["seed"] = cfg.seed();
    j["edge_count"] = torus.edge_count();
    j["open_edges"] = cfg.open_edges();
    emit(o, j.dump() + "\n");
    return kOk;
}

int cmd_explore(const Options& o) {
    const Torus torus(dim_of(o), single_side(o), model_of(o));
    if (o.x >= torus.vertex_count()) throw UsageError("--x is not a vertex of the torus");
    const BondConfig cfg = BondConfig::sample(torus, p_of(o), o.seed);
    const AuditedExploration run = audit_exploration(cfg, o.x, o.budget);
    nlohmann::json j = nlohmann::json::parse(exploration_json(torus, run.stage1, run.stage2));
    j["p"] = cfg.p();
    j["seed"] = cfg.seed();
    const SurgeryAudit& a = run.audit;
    j["audit"] = {{"violations", a.violations()}, {"inconclusive", a.inconclusive}, {"parent_uniqueness", a.parent_uniqueness},
                  {"surplus_ancestry", a.surplus_ancestry}, {"partition", a.partition}, {"long_cycle_in_G", a.long_cycle_in_G},
                  {"certificate", a.certificate}, {"kill_switch", a.kill_switch}, {"stage1_reads", a.stage1_reads},
                  {"stage2_reads", a.stage2_reads}};
    emit(o, j.dump() + "\n");
    return kOk;
}

int cmd_couple(const Options& o) {
    const Torus torus(dim_of(o), single_side(o), model_of(o));
    if (o.window_factor < 2) throw UsageError("--K must be at least 2");
    const CouplingSample s = coupled_sample(torus, p_of(o), o.seed, o.window_factor, o.step_budget);
    std::vector<int> ks;
    for (int k = 0; k <= o.k_max; ++k) ks.push_back(k);
    const InclusionReport inc = check_inclusion_property(s, ks);
    nlohmann::json j = nlohmann::json::parse(coupling_json(s));
    j["inclusion"] = {{"applicable", inc.applicable}, {"holds", inc.holds()}, {"k_max", o.k_max},
                      {"violations_per_k", inc.violations_per_k}};
    emit(o, j.dump() + "\n");
    return inc.applicable && !inc.holds() ? kCheckFailed : kOk;
}

const std::vector<std::string> kQuantities{"vertex-long-cycle", "LCk",       "Ydelta",         "long-cycle-tail",
                                           "two-point",         "ball-boundary", "mean-cluster-size", "cluster-size-tail",
                                           "pc-scan"};

EstimateReport run_estimate(const Options& o, const std::string& q) {
    if (q == "vertex-long-cycle") return est_vertex_long_cycle(params_of(o), sides_of(o));
    if (q == "LCk") return est_LCk(params_of(o), single_side(o), o.k, o.origins);
    if (q == "Ydelta") return est_Ydelta(params_of(o), sides_of(o), o.delta);
    if (q == "long-cycle-tail") return est_long_cycle_tail(params_of(o), sides_of(o), o.eps);
    if (q == "two-point") return est_two_point(params_of(o), sides_of(o), o.box_factor, o.sources);
    if (q == "ball-boundary") return est_ball_boundary_sum(params_of(o), o.n);
    if (q == "mean-cluster-size") return est_mean_cluster_size(params_of(o), sides_of(o));
    if (q == "cluster-size-tail") return est_cluster_size_tail(params_of(o), sides_of(o), o.m);
    if (q == "pc-scan") {
        if (o.p_grid.empty()) throw UsageError("pc-scan needs --p-grid");
        return calibrate_pc_scan(params_of(o, false), single_side(o), o.p_grid, o.k);
    }
    throw UsageError("unknown quantity " + q);
}

std::string meta_line(const Options& o, const std::string& q, const EstimatorParams& prm) {
    std::ostringstream s;
    s << "perco estimate " << q << " d=" << prm.d << " model=" << prm.model.name() << " seed=" << o.seed
      << " replicas=" << o.replicas << " budget=" << o.budget
      << " | d=7 nearest-neighbour is a finite-dimension stand-in for the high-dimension regime;"
      << " acceptance bands are engineering choices";
    return s.str();
}

int cmd_estimate(const Options& o, const std::string& q, bool check) {
    if (o.format != "csv" && o.format != "jsonl") throw UsageError("--format must be csv or jsonl");
    const EstimatorParams prm = params_of(o, q != "pc-scan");
    const EstimateReport report = run_estimate(o, q);
    emit(o, o.format == "csv" ? to_csv(report, CsvOptions{!o.no_header_meta, meta_line(o, q, prm)}) : to_jsonl(report));
    if (!check) return kOk;
    BandResult band;
    try {
        band = check_report(report);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    for (const auto& [ok, what] : band.items) std::cerr << "perco: check[" << (ok ? "pass" : "fail") << "]: " << what << "\n";
    return band.pass() ? kOk : kCheckFailed;
}

int cmd_oracle(const Options& o) {
    oracle::Agreement total;
    nlohmann::json fixtures = nlohmann::json::array();
    for (const auto& f : fixtures::hand_fixtures()) {
        const auto a = oracle::compare_with_oracle(f.torus, f.open, o.budget);
        fixtures.push_back({{"name", f.name}, {"queries", a.queries}, {"unknown", a.unknown}, {"disagreements", a.disagreements}});
        total.merge(a);
    }
    nlohmann::json j;
    j["fixtures"] = fixtures;
    if (o.d) {
        const Torus torus(dim_of(o), single_side(o), model_of(o));
        const double p = p_of(o);
        std::vector<oracle::Agreement> parts(o.replicas);
        parallel_for(o.replicas, o.threads, [&](std::size_t i) {
            const BondConfig cfg = BondConfig::sample(torus, p, derive_seed(o.seed, i));
            parts[i] = oracle::compare_with_oracle(torus, cfg.open_edges(), o.budget);
        });
        oracle::Agreement random;
        for (const auto& a : parts) random.merge(a);
        j["random"] = {{"d", torus.dim()},           {"r", torus.side()},           {"p", p},
                       {"configs", o.replicas},      {"queries", random.queries},   {"unknown", random.unknown},
                       {"unknown_rate", random.unknown_rate()}, {"disagreements", random.disagreements}};
        total.merge(random);
    }
    j["disagreements"] = total.disagreements;
    j["details"] = total.details;
    emit(o, j.dump() + "\n");
    return total.disagreements == 0 ? kOk : kCheckFailed;
}

int cmd_pc(const Options& o) {
    std::string text = "d,model,L,p_c,source\n";
    const CriticalPointTable table = table_of(o);
    for (const auto& row : table.rows()) {
        char p[32];
        std::snprintf(p, sizeof p, "%.10g", row.pc);
        text += std::to_string(row.dim) + "," + row.model.name() + "," +
                std::to_string(row.model.is_spread_out() ? row.model.range : 0) + "," + p + ",\"" + row.source + "\"\n";
    }
    emit(o, text);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical bond percolation on high-dimensional tori: sampling, explorations, couplings and estimators"};
    app.set_config("--config", "", "key=value file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--d", o.d, "dimension");
    app.add_option("--r", o.r, "torus side(s), comma separated")->delimiter(',');
    app.add_option("--model", o.model, "nn or spread-out")->capture_default_str();
    app.add_option("--L", o.L, "spread-out range")->capture_default_str();
    app.add_option("--p", o.p, "bond probability");
    app.add_flag("--pc-ref", o.pc_ref, "use the reference critical point for (d, model)");
    app.add_option("--pc-table", o.pc_table, "alternative critical point table");
    app.add_option("--replicas", o.replicas, "Monte Carlo replicas")->capture_default_str();
    app.add_option("--seed", o.seed, "master seed")->capture_default_str();
    app.add_option("--budget", o.budget, "work budget per search")->capture_default_str();
    app.add_option("--threads", o.threads, "worker threads")->capture_default_str();
    app.add_option("--out", o.out, "output file (default stdout)");
    app.add_option("--format", o.format, "csv or jsonl")->capture_default_str();
    app.add_flag("--no-header-meta", o.no_header_meta, "omit the timestamped comment line");
    app.add_option("--k", o.k, "k values (LCk schedule, pc-scan grid)")->delimiter(',')->capture_default_str();
    app.add_option("--delta", o.delta, "delta values")->delimiter(',')->capture_default_str();
    app.add_option("--eps", o.eps, "epsilon values")->delimiter(',')->capture_default_str();
    app.add_option("--n", o.n, "box radii")->delimiter(',')->capture_default_str();
    app.add_option("--m", o.m, "cluster size thresholds")->delimiter(',')->capture_default_str();
    app.add_option("--p-grid", o.p_grid, "p values for pc-scan")->delimiter(',');
    app.add_option("--origins", o.origins, "origins per replica for LCk")->capture_default_str();
    app.add_option("--box-factor", o.box_factor, "lattice box side / r for two-point")->capture_default_str();
    app.add_option("--sources", o.sources, "lattice sources per replica for two-point")->capture_default_str();
    app.add_option("--K", o.window_factor, "coupling window factor")->capture_default_str();
    app.add_option("--k-max", o.k_max, "largest k for the inclusion check")->capture_default_str();
    app.add_option("--step-budget", o.step_budget, "coupling exploration steps")->capture_default_str();
    app.add_option("--x", o.x, "exploration root vertex id")->capture_default_str();

    auto* sample = app.add_subcommand("sample", "dump one configuration as JSON");
    auto* explore = app.add_subcommand("explore", "two-stage exploration of one sample with its audit, JSON");
    auto* couple = app.add_subcommand("couple", "coupled torus/lattice sample with the inclusion report, JSON");
    auto* estimate = app.add_subcommand("estimate", "run an estimator, CSV or JSONL");
    std::string quantity;
    bool check = false;
    estimate->add_option("quantity", quantity, "quantity")->required()->check(CLI::IsMember(kQuantities));
    estimate->add_flag("--check", check, "apply the acceptance band; exit 3 on failure");
    auto* oracle_cmd = app.add_subcommand("oracle", "main path against brute force on hand fixtures (and random configs)");
    auto* pc = app.add_subcommand("pc", "list the critical point table");
    for (auto* sub : {sample, explore, couple, estimate, oracle_cmd, pc})
        sub->footer("Shared flags (--d, --r, --p, --pc-ref, --replicas, --seed, ...) are listed by perco --help.");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error("usage", e.what());
        std::cerr << app.help();
        return kUsage;
    }

    try {
        if (*sample) return cmd_sample(o);
        if (*explore) return cmd_explore(o);
        if (*couple) return cmd_couple(o);
        if (*estimate) return cmd_estimate(o, quantity, check);
        if (*oracle_cmd) return cmd_oracle(o);
        if (*pc) return cmd_pc(o);
    } catch (const UsageError& e) {
        error("usage", e.what());
        std::cerr << app.help();
        return kUsage;
    } catch (const NoReferenceValue& e) {
        error("usage", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        error("runtime", e.what());
        return kRuntime;
    }
    return kUsage;
}
