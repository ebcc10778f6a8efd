// forge: compile and verify graph-state generation schedules, and run the
// fault-tolerance studies (threshold sweeps, loss scans, percolation bounds,
// scaling-collapse fits) for the RHG cluster-state memory.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "forge/analysis.hpp"
#include "forge/decoder.hpp"
#include "forge/error_model.hpp"
#include "forge/montecarlo.hpp"
#include "forge/percolation.hpp"
#include "forge/protocol.hpp"

using namespace forge;
using nlohmann::json;

namespace {

constexpr uint64_t kDefaultSeed = 0x5eedf0f5ULL;

uint64_t seed_override(uint64_t seed) {
    if (const char* env = std::getenv("FORGE_SEED")) return std::strtoull(env, nullptr, 10);
    return seed;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Time time_from_json(const json& v, const char* what) {
    if (v.is_number_integer()) return Time(v.get<long long>());
    if (v.is_array() && v.size() == 2) return Time(v.at(0).get<long long>(), v.at(1).get<long long>());
    if (v.is_number_float()) {
        // decimal input: keep six digits of precision exactly
        long long num = std::llround(v.get<double>() * 1e6);
        return Time(num, 1000000);
    }
    throw std::invalid_argument(std::string("/") + what + ": expected integer, float, or [num, den]");
}

ProtocolSchedule compile_from_params(const std::string& protocol, const json& params) {
    Time tau1 = params.contains("tau1") ? time_from_json(params["tau1"], "tau1") : Time(1);
    Time tau2 = params.contains("tau2") ? time_from_json(params["tau2"], "tau2") : Time(2);
    auto need_n = [&]() {
        if (!params.contains("N")) throw std::invalid_argument("/N: required");
        return params["N"].get<int>();
    };
    if (protocol == "linear") return compile_linear_cluster(need_n(), tau1, tau2);
    if (protocol == "star") return compile_star(need_n(), tau1, tau2);
    if (protocol == "plus") {
        std::string method = params.value("method", "interrupt");
        PlusMethod m = PlusMethod::Interrupt;
        if (method == "star_then_measure")
            m = PlusMethod::StarThenMeasure;
        else if (method == "two_level_mzi")
            m = PlusMethod::TwoLevelMzi;
        else if (method != "interrupt")
            throw std::invalid_argument("/method: unknown plus-state method: " + method);
        return compile_plus_stream(need_n(), m, tau1, tau2);
    }
    if (protocol == "cluster") {
        if (!params.contains("dims")) throw std::invalid_argument("/dims: required");
        return compile_cluster_nd(params["dims"].get<std::vector<int>>(), tau1, tau2);
    }
    if (protocol == "rhg") {
        if (!params.contains("L")) throw std::invalid_argument("/L: required");
        std::string mode = params.value("mode", "direct");
        if (mode != "direct" && mode != "carve") throw std::invalid_argument("/mode: direct or carve");
        return compile_rhg(params["L"].get<int>(),
                           mode == "direct" ? RhgMode::Direct : RhgMode::Carve, tau1, tau2);
    }
    if (protocol == "repeater") return compile_repeater(need_n(), tau1, tau2);
    if (protocol == "tree") {
        Time tau0 = params.contains("tau1_0") ? time_from_json(params["tau1_0"], "tau1_0") : Time(1);
        return compile_tree(need_n(), tau0).first;
    }
    throw std::invalid_argument("unknown protocol: " + protocol);
}

json collapse_fit_json(const CollapseFit& fit) {
    json j;
    j["ok"] = fit.ok;
    j["p_th"] = fit.p_th;
    j["nu"] = fit.nu;
    j["p_logic_c"] = fit.p_logic_c;
    j["r_min"] = fit.r_min;
    if (fit.sigma_pth >= 0) {
        j["sigma_p_th"] = fit.sigma_pth;
        j["sigma_nu"] = fit.sigma_nu;
    }
    if (!fit.message.empty()) j["message"] = fit.message;
    return j;
}

struct ProgressPrinter {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    void operator()(const RatePoint& r, size_t done, size_t total) const {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::fprintf(stderr, "[%zu/%zu] L=%d p=%.5g p_loss=%.4g p_logic=%.5g (%.0fs)\n", done, total,
                     r.l, r.p, r.p_loss, r.p_logic, secs);
    }
};

// ---------------------------------------------------------------------------
// reproduce presets

struct ReproduceConfig {
    std::string figure, scale, out_dir;
    uint64_t seed = kDefaultSeed;
    int workers = 0;
};

json manifest_base(const ReproduceConfig& cfg) {
    json m;
    m["figure"] = cfg.figure;
    m["scale"] = cfg.scale;
    m["seed"] = cfg.seed;
    m["build"] = "forge 0.1.0";
    m["outputs"] = json::array();
    return m;
}

void write_with_manifest(const ReproduceConfig& cfg, json& manifest, const std::string& name,
                         const std::string& content) {
    std::filesystem::create_directories(cfg.out_dir);
    std::string path = cfg.out_dir + "/" + name;
    atomic_write_file(path, content);
    manifest["outputs"].push_back(name);
}

// Per-loss p grids for the phase-boundary studies; centered on the expected
// boundary with generous margins.
std::vector<double> boundary_grid(double p_loss, int points) {
    double center = 0.0053 * (1.0 - p_loss / 0.249);
    center = std::max(center, 6e-4);
    std::vector<double> g;
    for (int i = 0; i < points; ++i)
        g.push_back(center * (0.55 + 0.9 * i / (points - 1)));
    return g;
}

int reproduce_fig8(const ReproduceConfig& cfg) {
    SweepSpec spec;
    spec.master_seed = cfg.seed;
    spec.workers = cfg.workers;
    if (cfg.scale == "small") {
        spec.sizes = {6, 8, 10};
        spec.samples = 20000;
    } else if (cfg.scale == "medium") {
        spec.sizes = {6, 8, 10, 12};
        spec.samples = 25000;
    } else {
        spec.sizes = {8, 10, 12, 14, 16};
        spec.samples = 100000;
    }
    for (int i = 0; i < 11; ++i) spec.p_grid.push_back(0.003 + 0.0005 * i);
    json manifest = manifest_base(cfg);
    manifest["spec"] = json::parse(spec.to_json());
    std::filesystem::create_directories(cfg.out_dir);
    auto t0 = std::chrono::steady_clock::now();
    auto rows = run_sweep(spec, cfg.out_dir + "/threshold.csv", ProgressPrinter{});
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["outputs"].push_back("threshold.csv");
    write_with_manifest(cfg, manifest, "threshold.meta.json", rate_table_metadata(spec, rows, wall));
    CollapseFit fit = fit_threshold(CollapseData::from_points(rows));
    write_with_manifest(cfg, manifest, "collapse.json", collapse_fit_json(fit).dump(2));
    write_with_manifest(cfg, manifest, "manifest.json", manifest.dump(2));
    std::printf("p_th = %.5f +- %.5f, nu = %.3f +- %.3f\n", fit.p_th, fit.sigma_pth, fit.nu,
                fit.sigma_nu);
    return fit.ok ? 0 : 1;
}

int reproduce_phase(const ReproduceConfig& cfg, bool fit_boundary) {
    std::vector<double> losses{0.0, 0.05, 0.10, 0.15, 0.20};
    std::vector<int> sizes = cfg.scale == "small" ? std::vector<int>{6, 8, 10}
                                                  : std::vector<int>{6, 8, 10, 12};
    long long samples = cfg.scale == "small" ? 10000 : (cfg.scale == "medium" ? 20000 : 60000);
    json manifest = manifest_base(cfg);
    std::vector<std::pair<double, double>> boundary_pts;
    json fits = json::array();
    for (size_t qi = 0; qi < losses.size(); ++qi) {
        SweepSpec spec;
        spec.sizes = sizes;
        spec.loss_grid = {losses[qi]};
        spec.p_grid = boundary_grid(losses[qi], 9);
        spec.samples = samples;
        spec.master_seed = hash_combine(cfg.seed, qi);
        spec.workers = cfg.workers;
        char name[64];
        std::snprintf(name, sizeof(name), "sweep_loss_%02d.csv", static_cast<int>(losses[qi] * 100));
        auto rows = run_sweep(spec, cfg.out_dir + "/" + name, ProgressPrinter{});
        manifest["outputs"].push_back(name);
        CollapseFit fit = fit_threshold(CollapseData::from_points(rows, losses[qi]));
        json jf = collapse_fit_json(fit);
        jf["p_loss"] = losses[qi];
        fits.push_back(jf);
        if (fit.ok) boundary_pts.push_back({losses[qi], fit.p_th});
    }
    write_with_manifest(cfg, manifest, "thresholds.json", fits.dump(2));
    int rc = 0;
    if (fit_boundary) {
        if (boundary_pts.size() >= 2) {
            QuadraticBoundary q = fit_phase_boundary(boundary_pts, 0.249);
            json jq;
            jq["c2"] = q.c2;
            jq["c1"] = q.c1;
            jq["c0"] = q.c0;
            jq["alpha"] = q.alpha;
            jq["beta"] = q.beta;
            jq["max_residual"] = q.max_residual;
            jq["constrained_zero_at"] = q.x_zero;
            write_with_manifest(cfg, manifest, "boundary.json", jq.dump(2));
            std::printf("boundary: p_th(x) = %.4g x^2 + %.4g x + %.4g (residual %.2g)\n", q.c2, q.c1,
                        q.c0, q.max_residual);
        } else {
            rc = 1;
        }
    }
    write_with_manifest(cfg, manifest, "manifest.json", manifest.dump(2));
    return rc;
}

int reproduce_fig9(const ReproduceConfig& cfg) {
    std::vector<int> sizes{8, 10, 12};
    long long samples = cfg.scale == "small" ? 20000 : (cfg.scale == "medium" ? 100000 : 500000);
    std::vector<double> db_grid{1e-3, 2e-3, 2.85e-3, 4e-3, 5.7e-3, 8e-3, 1.14e-2, 1.6e-2, 2e-2};
    json manifest = manifest_base(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    auto rows = breakeven_scan(1e-3, db_grid, sizes, samples, cfg.seed, cfg.workers,
                               cfg.out_dir + "/breakeven.csv", ProgressPrinter{});
    manifest["outputs"].push_back("breakeven.csv");
    write_with_manifest(cfg, manifest, "manifest.json", manifest.dump(2));
    for (const auto& r : rows)
        std::printf("L=%d db/qubit=%.4g p_loss=%.4g p_logic=%.5g\n", r.l, r.loss_per_qubit_db,
                    r.p_loss, r.p_logic);
    return 0;
}

int reproduce_fig10(const ReproduceConfig& cfg) {
    const double alpha = -0.0213, beta = 0.0053;  // linear boundary approximation
    std::vector<int> sizes;
    for (int l = 4; l <= 20; l += 2) sizes.push_back(l);
    std::vector<double> etas;
    for (int i = 0; i <= 60; ++i) etas.push_back(std::pow(10.0, -5.0 + 2.5 * i / 60.0));
    auto rows = ansatz_curves(etas, sizes, 1e-3, alpha, beta);
    std::ostringstream csv;
    csv << "# forge ansatz curves (analytic)\n";
    csv << "eta,L,p_logic\n";
    for (const auto& r : rows) csv << r.eta << ',' << r.l << ',' << r.p_logic << '\n';
    json manifest = manifest_base(cfg);
    write_with_manifest(cfg, manifest, "ansatz.csv", csv.str());
    json params;
    params["alpha"] = alpha;
    params["beta"] = beta;
    params["p"] = 1e-3;
    write_with_manifest(cfg, manifest, "params.json", params.dump(2));
    write_with_manifest(cfg, manifest, "manifest.json", manifest.dump(2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"forge: deterministic graph-state generation and RHG fault-tolerance workbench"};
    app.require_subcommand(1);

    // ---- compile
    auto* c_compile = app.add_subcommand("compile", "compile a generation protocol to a schedule");
    std::string protocol, params_text = "{}", out_path = "schedule.json", graph_out;
    c_compile->add_option("--protocol", protocol, "linear|star|plus|cluster|rhg|repeater|tree")
        ->required();
    c_compile->add_option("--params", params_text, "protocol parameters as JSON");
    c_compile->add_option("--out", out_path, "schedule output path");
    c_compile->add_option("--graph-out", graph_out, "target graph output path (default <out>.graph.json)");

    // ---- verify
    auto* c_verify = app.add_subcommand("verify", "re-simulate a schedule and check its target");
    std::string verify_path;
    int verify_seeds = 100;
    c_verify->add_option("schedule", verify_path, "schedule JSON file")->required();
    c_verify->add_option("--seeds", verify_seeds, "number of outcome seeds");

    // ---- threshold
    auto* c_thresh = app.add_subcommand("threshold", "Monte-Carlo logical error sweep");
    std::string config_path, csv_out = "results.csv";
    c_thresh->add_option("--config", config_path, "sweep spec JSON")->required();
    c_thresh->add_option("--out", csv_out, "output CSV");

    // ---- breakeven
    auto* c_break = app.add_subcommand("breakeven", "logical error vs loss per qubit");
    std::string be_config;
    std::string be_out = "breakeven.csv";
    c_break->add_option("--config", be_config, "JSON: {p0, db_grid, sizes, samples, seed, workers}")
        ->required();
    c_break->add_option("--out", be_out, "output CSV");

    // ---- collapse
    auto* c_collapse = app.add_subcommand("collapse", "scaling-collapse threshold fit");
    std::string collapse_in, collapse_out;
    double collapse_loss = 0.0;
    c_collapse->add_option("--in", collapse_in, "rate table CSV")->required();
    c_collapse->add_option("--p-loss", collapse_loss, "loss slice to fit");
    c_collapse->add_option("--out", collapse_out, "fit report JSON path");

    // ---- phase-boundary
    auto* c_phase = app.add_subcommand("phase-boundary", "constrained quadratic through (0.249, 0)");
    std::string phase_points, phase_out;
    double phase_zero = 0.249;
    c_phase->add_option("--points", phase_points, "JSON array of [p_loss, p_th] pairs")->required();
    c_phase->add_option("--zero-at", phase_zero, "loss value pinned to zero threshold");
    c_phase->add_option("--out", phase_out, "fit JSON path");

    // ---- percolate
    auto* c_perc = app.add_subcommand("percolate", "bond-percolation critical probability");
    std::string lattice_name = "simple_cubic";
    std::vector<int> perc_sizes{16, 24, 32};
    std::vector<double> perc_grid;
    long long perc_samples = 10000;
    uint64_t perc_seed = kDefaultSeed;
    int perc_workers = 0;
    std::string perc_out;
    c_perc->add_option("--lattice", lattice_name, "simple_cubic|carve_extended|square2d");
    c_perc->add_option("--sizes", perc_sizes, "lattice sizes")->delimiter(',');
    c_perc->add_option("--grid", perc_grid, "bond probabilities")->delimiter(',');
    c_perc->add_option("--samples", perc_samples, "samples per point");
    c_perc->add_option("--seed", perc_seed, "master seed");
    c_perc->add_option("--workers", perc_workers, "worker threads (0 = auto)");
    c_perc->add_option("--out", perc_out, "report JSON path");

    // ---- optimal-l
    auto* c_opt = app.add_subcommand("optimal-l", "saddle-point optimum of the loss trade-off");
    double opt_eta = 0, opt_p = 0, opt_alpha = -0.0213, opt_beta = 0.0053;
    std::string opt_out;
    c_opt->add_option("--eta", opt_eta, "loss per qubit (natural-log units)")->required();
    c_opt->add_option("--p", opt_p, "physical error rate")->required();
    c_opt->add_option("--alpha", opt_alpha, "boundary slope");
    c_opt->add_option("--beta", opt_beta, "zero-loss threshold");
    c_opt->add_option("--out", opt_out, "report JSON path");

    // ---- reproduce
    auto* c_repro = app.add_subcommand("reproduce", "rebuild a study bundle");
    ReproduceConfig rc;
    rc.out_dir = "reproduce_out";
    c_repro->add_option("figure", rc.figure, "fig7|fig8|fig9|fig10|fig13")->required();
    c_repro->add_option("--scale", rc.scale, "small|medium|full")->default_val("small");
    c_repro->add_option("--out-dir", rc.out_dir, "output directory");
    c_repro->add_option("--seed", rc.seed, "master seed");
    c_repro->add_option("--workers", rc.workers, "worker threads (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*c_compile) {
            ProtocolSchedule s = compile_from_params(protocol, json::parse(params_text));
            atomic_write_file(out_path, s.to_json());
            std::string gpath = graph_out.empty() ? out_path + ".graph.json" : graph_out;
            atomic_write_file(gpath, s.target.to_json());
            std::printf("compiled %s: %d slots, %d events, target %d vertices / %zu edges\n",
                        s.protocol.c_str(), s.n_slots, static_cast<int>(s.events.size()), s.target.n,
                        s.target.edges.size());
            return 0;
        }
        if (*c_verify) {
            ProtocolSchedule s = ProtocolSchedule::from_json(read_file(verify_path));
            CollisionReport col = verify_collisions(s);
            if (!col.passed) {
                std::fprintf(stderr, "collision check failed: %s\n", col.message.c_str());
                return 1;
            }
            uint64_t seed0 = seed_override(kDefaultSeed);
            for (int k = 0; k < verify_seeds; ++k)
                if (!verify_protocol(s, hash_combine(seed0, k))) {
                    std::fprintf(stderr, "state verification failed at seed %d\n", k);
                    return 1;
                }
            std::printf("ok: %d collision overlaps, %d seeds verified\n",
                        static_cast<int>(col.overlaps.size()), verify_seeds);
            return 0;
        }
        if (*c_thresh) {
            SweepSpec spec = SweepSpec::from_json(read_file(config_path));
            spec.master_seed = seed_override(spec.master_seed);
            auto t0 = std::chrono::steady_clock::now();
            auto rows = run_sweep(spec, csv_out, ProgressPrinter{});
            double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            atomic_write_file(csv_out + ".meta.json", rate_table_metadata(spec, rows, wall));
            return 0;
        }
        if (*c_break) {
            json j = json::parse(read_file(be_config));
            double p0 = j.value("p0", 1e-3);
            auto grid = j.at("db_grid").get<std::vector<double>>();
            auto sizes = j.at("sizes").get<std::vector<int>>();
            long long samples = j.value("samples", 10000LL);
            uint64_t seed = seed_override(j.value("seed", kDefaultSeed));
            int workers = j.value("workers", 0);
            breakeven_scan(p0, grid, sizes, samples, seed, workers, be_out, ProgressPrinter{});
            return 0;
        }
        if (*c_collapse) {
            auto rows = parse_rate_table_csv(read_file(collapse_in));
            CollapseFit fit = fit_threshold(CollapseData::from_points(rows, collapse_loss));
            json out = collapse_fit_json(fit);
            std::printf("%s\n", out.dump(2).c_str());
            if (!collapse_out.empty()) atomic_write_file(collapse_out, out.dump(2));
            return fit.ok ? 0 : 1;
        }
        if (*c_phase) {
            json pts_json = json::parse(phase_points);
            std::vector<std::pair<double, double>> pts;
            for (const auto& p : pts_json) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            QuadraticBoundary q = fit_phase_boundary(pts, phase_zero);
            json out;
            out["c2"] = q.c2;
            out["c1"] = q.c1;
            out["c0"] = q.c0;
            out["alpha"] = q.alpha;
            out["beta"] = q.beta;
            out["max_residual"] = q.max_residual;
            std::printf("%s\n", out.dump(2).c_str());
            if (!phase_out.empty()) atomic_write_file(phase_out, out.dump(2));
            return 0;
        }
        if (*c_perc) {
            LatticeKind kind = lattice_kind_from_name(lattice_name);
            if (perc_grid.empty()) {
                double center = kind == LatticeKind::SimpleCubic ? 0.2488
                                : kind == LatticeKind::Square2d ? 0.5
                                                                 : 0.05;
                for (int i = -3; i <= 3; ++i) perc_grid.push_back(center * (1.0 + 0.08 * i));
            }
            PcEstimate est = estimate_pc(kind, perc_sizes, perc_grid, perc_samples,
                                         seed_override(perc_seed), perc_workers);
            json out;
            out["ok"] = est.ok;
            out["lattice"] = lattice_name;
            out["p_c"] = est.p_c;
            out["uncertainty"] = est.uncertainty;
            if (kind == LatticeKind::CarveExtended) out["coordination_estimate"] = coordination_estimate(24);
            json curves = json::array();
            for (const auto& c : est.curves) {
                json jc;
                jc["L"] = c.l;
                jc["p"] = c.p;
                jc["wrapping"] = c.w;
                curves.push_back(jc);
            }
            out["curves"] = curves;
            if (!est.message.empty()) out["message"] = est.message;
            std::printf("%s\n", out.dump(2).c_str());
            if (!perc_out.empty()) atomic_write_file(perc_out, out.dump(2));
            return est.ok ? 0 : 1;
        }
        if (*c_opt) {
            OptimalL r = optimal_l(opt_eta, opt_p, opt_alpha, opt_beta);
            json out;
            out["correctable"] = r.correctable;
            if (r.correctable) {
                out["x0"] = r.x0;
                out["l_opt"] = r.l_opt;
                out["p_opt"] = r.p_opt;
            }
            std::printf("%s\n", out.dump(2).c_str());
            if (!opt_out.empty()) atomic_write_file(opt_out, out.dump(2));
            return r.correctable ? 0 : 1;
        }
        if (*c_repro) {
            rc.seed = seed_override(rc.seed);
            if (rc.figure == "fig8") return reproduce_fig8(rc);
            if (rc.figure == "fig7") return reproduce_phase(rc, /*fit_boundary=*/true);
            if (rc.figure == "fig13") return reproduce_phase(rc, /*fit_boundary=*/false);
            if (rc.figure == "fig9") return reproduce_fig9(rc);
            if (rc.figure == "fig10") return reproduce_fig10(rc);
            std::fprintf(stderr, "unknown figure: %s\n", rc.figure.c_str());
            return 2;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
