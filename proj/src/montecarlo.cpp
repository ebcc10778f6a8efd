#include "forge/montecarlo.hpp"

#include <atomic>
#include <chrono>
#include <cstring>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "forge/decoder.hpp"
#include "forge/rng.hpp"

namespace forge {

uint64_t SweepSpec::config_hash() const {
    uint64_t h = splitmix64(0x5157ee9);
    for (int l : sizes) h = hash_combine(h, static_cast<uint64_t>(l));
    auto mix_double = [&](double v) {
        uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        h = hash_combine(h, bits);
    };
    for (double p : p_grid) mix_double(p);
    for (double q : loss_grid) mix_double(q);
    h = hash_combine(h, static_cast<uint64_t>(samples));
    h = hash_combine(h, master_seed);
    return h;
}

std::string SweepSpec::to_json() const {
    nlohmann::json j;
    j["sizes"] = sizes;
    j["p_grid"] = p_grid;
    j["loss_grid"] = loss_grid;
    j["samples"] = samples;
    j["seed"] = master_seed;
    j["workers"] = workers;
    return j.dump(2);
}

SweepSpec SweepSpec::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SweepSpec s;
    auto require = [&](const char* key) {
        if (!j.contains(key)) throw std::invalid_argument(std::string("/") + key + ": missing required field");
        return j.at(key);
    };
    s.sizes = require("sizes").get<std::vector<int>>();
    s.p_grid = require("p_grid").get<std::vector<double>>();
    if (j.contains("loss_grid")) s.loss_grid = j.at("loss_grid").get<std::vector<double>>();
    if (j.contains("samples")) s.samples = j.at("samples").get<long long>();
    if (j.contains("seed")) s.master_seed = j.at("seed").get<uint64_t>();
    if (j.contains("workers")) s.workers = j.at("workers").get<int>();
    if (s.sizes.empty()) throw std::invalid_argument("/sizes: must be nonempty");
    if (s.p_grid.empty()) throw std::invalid_argument("/p_grid: must be nonempty");
    if (s.samples < 1) throw std::invalid_argument("/samples: must be at least 1");
    for (int l : s.sizes)
        if (l < 2 || l % 2) throw std::invalid_argument("/sizes: lattice sizes must be even and >= 2");
    return s;
}

namespace {

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

struct Tally {
    long long fails = 0, logical = 0, percolation = 0, primal = 0, dual = 0;
    void operator+=(const Tally& o) {
        fails += o.fails;
        logical += o.logical;
        percolation += o.percolation;
        primal += o.primal;
        dual += o.dual;
    }
};

}  // namespace

RatePoint estimate_rate(int l, double p, double p_loss, long long samples, uint64_t point_seed,
                        int workers, long long stop_after_fails) {
    const int n_workers = stop_after_fails > 0 ? 1 : resolve_workers(workers);
    EffectiveRates rates = effective_rates(ErrorModelParams::uniform(p));
    std::vector<Tally> tallies(n_workers);
    std::atomic<long long> next{0};
    const long long chunk = 64;
    long long consumed = samples;

    auto work = [&](int wid) {
        TrialEngine engine(l, rates);
        Tally& t = tallies[wid];
        for (;;) {
            long long begin = next.fetch_add(chunk);
            if (begin >= samples) break;
            long long end = std::min(begin + chunk, samples);
            for (long long i = begin; i < end; ++i) {
                DecodeOutcome out = engine.run(p_loss, hash_combine(point_seed, static_cast<uint64_t>(i)));
                if (out.outcome != TrialOutcome::Success) ++t.fails;
                if (out.outcome == TrialOutcome::LogicalFailure) ++t.logical;
                if (out.outcome == TrialOutcome::PercolationFailure) ++t.percolation;
                if (out.primal.failed()) ++t.primal;
                if (out.dual.failed()) ++t.dual;
                if (stop_after_fails > 0 && t.fails >= stop_after_fails) {
                    consumed = i + 1;
                    return;
                }
            }
        }
    };
    if (n_workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    Tally total;
    for (const auto& t : tallies) total += t;

    RatePoint pt;
    pt.l = l;
    pt.p = p;
    pt.p_loss = p_loss;
    pt.n = consumed;
    pt.fails = total.fails;
    pt.p_logic = static_cast<double>(total.fails) / static_cast<double>(consumed);
    pt.stderr_ = std::sqrt(pt.p_logic * (1.0 - pt.p_logic) / static_cast<double>(consumed));
    pt.fails_logical = total.logical;
    pt.fails_percolation = total.percolation;
    pt.primal_fails = total.primal;
    pt.dual_fails = total.dual;
    return pt;
}

namespace {

std::string point_key(int l, double p, double p_loss) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d|%.12g|%.12g", l, p, p_loss);
    return buf;
}

std::string rate_row_csv(const RatePoint& r, bool breakeven) {
    char buf[256];
    if (breakeven)
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%lld,%lld,%.12g,%.12g\n", r.l, r.p,
                      r.loss_per_qubit_db, r.p_loss, r.n, r.fails, r.p_logic, r.stderr_);
    else
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%lld,%lld,%.12g,%.12g\n", r.l, r.p, r.p_loss,
                      r.n, r.fails, r.p_logic, r.stderr_);
    return buf;
}

}  // namespace

std::string rate_table_csv(const std::vector<RatePoint>& rows, uint64_t config_hash, uint64_t seed,
                           bool breakeven_columns) {
    std::ostringstream out;
    out << "# forge rate table\n";
    char meta[128];
    std::snprintf(meta, sizeof(meta), "# config_hash=%016llx seed=%llu\n",
                  static_cast<unsigned long long>(config_hash), static_cast<unsigned long long>(seed));
    out << meta;
    out << (breakeven_columns ? "L,p,loss_per_qubit_db,p_loss,n,fails,p_logic,stderr\n"
                              : "L,p,p_loss,n,fails,p_logic,stderr\n");
    for (const auto& r : rows) out << rate_row_csv(r, breakeven_columns);
    return out.str();
}

std::vector<RatePoint> parse_rate_table_csv(const std::string& text) {
    std::vector<RatePoint> rows;
    std::istringstream in(text);
    std::string line;
    bool breakeven = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("L,", 0) == 0) {
            breakeven = line.find("loss_per_qubit_db") != std::string::npos;
            continue;
        }
        RatePoint r;
        if (breakeven) {
            if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lld,%lld,%lf,%lf", &r.l, &r.p,
                            &r.loss_per_qubit_db, &r.p_loss, &r.n, &r.fails, &r.p_logic,
                            &r.stderr_) != 8)
                throw std::invalid_argument("malformed rate table row: " + line);
        } else {
            if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lld,%lld,%lf,%lf", &r.l, &r.p, &r.p_loss, &r.n,
                            &r.fails, &r.p_logic, &r.stderr_) != 7)
                throw std::invalid_argument("malformed rate table row: " + line);
        }
        rows.push_back(r);
    }
    return rows;
}

void atomic_write_file(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp);
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::vector<RatePoint> run_sweep(const SweepSpec& spec, const std::string& out_csv,
                                 ProgressFn progress, KeepGoingFn keep_going) {
    if (spec.sizes.empty() || spec.p_grid.empty() || spec.loss_grid.empty() || spec.samples < 1)
        throw std::invalid_argument("sweep spec needs sizes, grids, and samples");
    const uint64_t chash = spec.config_hash();
    const std::string partial_path = out_csv.empty() ? "" : out_csv + ".partial";

    // Resume completed points from a matching partial file.
    std::vector<std::pair<std::string, RatePoint>> done;
    if (!partial_path.empty() && std::filesystem::exists(partial_path)) {
        std::ifstream in(partial_path);
        std::stringstream ss;
        ss << in.rdbuf();
        std::string text = ss.str();
        char expect[64];
        std::snprintf(expect, sizeof(expect), "%016llx", static_cast<unsigned long long>(chash));
        if (text.find(expect) != std::string::npos)
            for (const auto& r : parse_rate_table_csv(text)) done.push_back({point_key(r.l, r.p, r.p_loss), r});
    }
    auto find_done = [&](const std::string& key) -> const RatePoint* {
        for (const auto& [k, r] : done)
            if (k == key) return &r;
        return nullptr;
    };

    std::ofstream partial;
    if (!partial_path.empty()) {
        bool fresh = done.empty();
        partial.open(partial_path, fresh ? std::ios::trunc : std::ios::app);
        if (fresh) {
            char meta[128];
            std::snprintf(meta, sizeof(meta), "# config_hash=%016llx seed=%llu\n",
                          static_cast<unsigned long long>(chash),
                          static_cast<unsigned long long>(spec.master_seed));
            partial << meta << "L,p,p_loss,n,fails,p_logic,stderr\n";
            partial.flush();
        }
    }

    std::vector<RatePoint> rows;
    const size_t total = spec.sizes.size() * spec.p_grid.size() * spec.loss_grid.size();
    size_t idx = 0;
    for (size_t li = 0; li < spec.sizes.size(); ++li) {
        for (size_t qi = 0; qi < spec.loss_grid.size(); ++qi) {
            for (size_t pi = 0; pi < spec.p_grid.size(); ++pi, ++idx) {
                int l = spec.sizes[li];
                double p = spec.p_grid[pi];
                double q = spec.loss_grid[qi];
                std::string key = point_key(l, p, q);
                if (const RatePoint* prev = find_done(key)) {
                    rows.push_back(*prev);
                    if (progress) progress(*prev, idx + 1, total);
                    continue;
                }
                if (keep_going && !keep_going()) return rows;
                uint64_t point_seed = splitmix64(spec.master_seed);
                point_seed = hash_combine(point_seed, static_cast<uint64_t>(l));
                point_seed = hash_combine(point_seed, static_cast<uint64_t>(pi));
                point_seed = hash_combine(point_seed, static_cast<uint64_t>(qi));
                RatePoint r = estimate_rate(l, p, q, spec.samples, point_seed, spec.workers);
                rows.push_back(r);
                if (partial.is_open()) {
                    partial << rate_row_csv(r, false);
                    partial.flush();
                }
                if (progress) progress(r, idx + 1, total);
            }
        }
    }
    if (!out_csv.empty()) {
        atomic_write_file(out_csv, rate_table_csv(rows, chash, spec.master_seed));
        std::error_code ec;
        std::filesystem::remove(partial_path, ec);
    }
    return rows;
}

std::vector<RatePoint> breakeven_scan(double p0, const std::vector<double>& db_per_qubit,
                                      const std::vector<int>& sizes, long long samples,
                                      uint64_t master_seed, int workers, const std::string& out_csv,
                                      ProgressFn progress) {
    std::vector<RatePoint> rows;
    const size_t total = sizes.size() * db_per_qubit.size();
    size_t idx = 0;
    for (size_t li = 0; li < sizes.size(); ++li) {
        for (size_t di = 0; di < db_per_qubit.size(); ++di, ++idx) {
            int l = sizes[li];
            double db = db_per_qubit[di];
            double p_loss = 1.0 - std::pow(10.0, -db * static_cast<double>(l) * l / 10.0);
            uint64_t point_seed = splitmix64(master_seed ^ 0xb12ea7ULL);
            point_seed = hash_combine(point_seed, static_cast<uint64_t>(l));
            point_seed = hash_combine(point_seed, static_cast<uint64_t>(di));
            RatePoint r = estimate_rate(l, p0, p_loss, samples, point_seed, workers);
            r.loss_per_qubit_db = db;
            rows.push_back(r);
            if (progress) progress(r, idx + 1, total);
        }
    }
    if (!out_csv.empty()) {
        uint64_t h = splitmix64(master_seed ^ 0xb12ea7ULL);
        atomic_write_file(out_csv, rate_table_csv(rows, h, master_seed, /*breakeven=*/true));
    }
    return rows;
}

std::string rate_table_metadata(const SweepSpec& spec, const std::vector<RatePoint>& rows,
                                double wall_seconds) {
    nlohmann::json j;
    char chash[32];
    std::snprintf(chash, sizeof(chash), "%016llx", static_cast<unsigned long long>(spec.config_hash()));
    j["config_hash"] = chash;
    j["seed"] = spec.master_seed;
    j["build"] = "forge 0.1.0";
    j["wall_seconds"] = wall_seconds;
    j["failure_definition"] = "primal OR dual sublattice; percolation counted as failure";
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json o;
        o["L"] = r.l;
        o["p"] = r.p;
        o["p_loss"] = r.p_loss;
        o["fails_logical"] = r.fails_logical;
        o["fails_percolation"] = r.fails_percolation;
        o["primal_fails"] = r.primal_fails;
        o["dual_fails"] = r.dual_fails;
        pts.push_back(std::move(o));
    }
    j["points"] = std::move(pts);
    return j.dump(2);
}

}  // namespace forge
