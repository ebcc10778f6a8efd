#include "forge/percolation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "forge/offset_union_find.hpp"

namespace forge {

LatticeKind lattice_kind_from_name(const std::string& name) {
    if (name == "simple_cubic") return LatticeKind::SimpleCubic;
    if (name == "carve_extended") return LatticeKind::CarveExtended;
    if (name == "square2d") return LatticeKind::Square2d;
    throw std::invalid_argument("unknown lattice: " + name);
}

const char* lattice_kind_name(LatticeKind k) {
    switch (k) {
        case LatticeKind::SimpleCubic: return "simple_cubic";
        case LatticeKind::CarveExtended: return "carve_extended";
        case LatticeKind::Square2d: return "square2d";
    }
    return "?";
}

BondLattice build_bond_lattice(LatticeKind kind, int l) {
    if (kind == LatticeKind::CarveExtended) return carve_adjacency(l);
    if (l < 2 || l % 2) throw std::invalid_argument("lattice size must be even and >= 2");
    BondLattice b;
    b.l = l;
    if (kind == LatticeKind::SimpleCubic) {
        b.dims = 3;
        b.n_vertices = l * l * l;
        auto vid = [&](int x, int y, int z) { return (z * l + y) * l + x; };
        for (int z = 0; z < l; ++z)
            for (int y = 0; y < l; ++y)
                for (int x = 0; x < l; ++x) {
                    b.bonds.push_back({vid(x, y, z), vid((x + 1) % l, y, z), {1, 0, 0}});
                    b.bonds.push_back({vid(x, y, z), vid(x, (y + 1) % l, z), {0, 1, 0}});
                    b.bonds.push_back({vid(x, y, z), vid(x, y, (z + 1) % l), {0, 0, 1}});
                }
    } else {
        b.dims = 2;
        b.n_vertices = l * l;
        auto vid = [&](int x, int y) { return y * l + x; };
        for (int y = 0; y < l; ++y)
            for (int x = 0; x < l; ++x) {
                b.bonds.push_back({vid(x, y), vid((x + 1) % l, y), {1, 0, 0}});
                b.bonds.push_back({vid(x, y), vid(x, (y + 1) % l), {0, 1, 0}});
            }
    }
    return b;
}

namespace {

bool sample_wraps(const BondLattice& lat, double p, Rng& rng, OffsetUnionFind& uf) {
    uf.reset(lat.n_vertices);
    bool wrapped = false;
    for (const auto& bond : lat.bonds) {
        if (!rng.bernoulli(p)) continue;
        if (wrapped) continue;  // keep consuming draws for stream stability
        std::array<int, 3> delta{bond.disp[0], bond.disp[1], bond.disp[2]};
        wrapped = uf.unite_detect_wrap(bond.u, bond.v, delta);
    }
    return wrapped;
}

}  // namespace

double wrapping_probability(const BondLattice& lat, double p, long long samples, uint64_t seed,
                            int workers) {
    if (p < 0 || p > 1) throw std::invalid_argument("bond probability outside [0,1]");
    if (workers <= 0) {
        unsigned hc = std::thread::hardware_concurrency();
        workers = hc == 0 ? 1 : static_cast<int>(hc);
    }
    std::atomic<long long> next{0};
    std::vector<long long> hits(workers, 0);
    auto work = [&](int wid) {
        OffsetUnionFind uf(lat.n_vertices);
        for (;;) {
            long long i = next.fetch_add(16);
            if (i >= samples) break;
            long long end = std::min(i + 16, samples);
            for (; i < end; ++i) {
                Rng rng = make_stream(seed, static_cast<uint64_t>(i));
                hits[wid] += sample_wraps(lat, p, rng, uf);
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    long long total = 0;
    for (long long h : hits) total += h;
    return static_cast<double>(total) / static_cast<double>(samples);
}

std::vector<uint8_t> wrapping_coupled(const BondLattice& lat, const std::vector<double>& ps, Rng& rng) {
    std::vector<double> u(lat.bonds.size());
    for (auto& x : u) x = rng.uniform();
    std::vector<uint8_t> out;
    OffsetUnionFind uf(lat.n_vertices);
    for (double p : ps) {
        uf.reset(lat.n_vertices);
        bool wrapped = false;
        for (size_t k = 0; k < lat.bonds.size() && !wrapped; ++k) {
            if (u[k] >= p) continue;
            const auto& bond = lat.bonds[k];
            wrapped = uf.unite_detect_wrap(bond.u, bond.v,
                                           {bond.disp[0], bond.disp[1], bond.disp[2]});
        }
        out.push_back(wrapped);
    }
    return out;
}

PcEstimate estimate_pc(LatticeKind kind, const std::vector<int>& sizes,
                       const std::vector<double>& p_grid, long long samples, uint64_t seed,
                       int workers) {
    PcEstimate est;
    if (sizes.size() < 2) {
        est.message = "need at least two sizes";
        return est;
    }
    std::vector<double> grid = p_grid;
    std::sort(grid.begin(), grid.end());
    for (size_t k = 0; k < sizes.size(); ++k) {
        BondLattice lat = build_bond_lattice(kind, sizes[k]);
        WrappingCurve c;
        c.l = sizes[k];
        for (size_t pi = 0; pi < grid.size(); ++pi) {
            uint64_t point_seed = hash_combine(hash_combine(splitmix64(seed), k), pi);
            c.p.push_back(grid[pi]);
            c.w.push_back(wrapping_probability(lat, grid[pi], samples, point_seed, workers));
        }
        est.curves.push_back(std::move(c));
    }
    // Crossings of larger-vs-smaller curves: below p_c the bigger lattice
    // wraps less often, above it wraps more.
    for (size_t a = 0; a < sizes.size(); ++a)
        for (size_t b = a + 1; b < sizes.size(); ++b) {
            const auto& ca = est.curves[a];
            const auto& cb = est.curves[b];
            for (size_t i = 0; i + 1 < grid.size(); ++i) {
                double d0 = cb.w[i] - ca.w[i];
                double d1 = cb.w[i + 1] - ca.w[i + 1];
                if (d0 == 0 && d1 == 0) continue;
                if ((d0 <= 0 && d1 > 0) || (d0 >= 0 && d1 < 0)) {
                    double t = d0 == d1 ? 0.5 : d0 / (d0 - d1);
                    est.pairwise_crossings.push_back(grid[i] + t * (grid[i + 1] - grid[i]));
                }
            }
        }
    if (est.pairwise_crossings.empty()) {
        est.message = "no curve crossings inside the grid";
        return est;
    }
    double sum = 0;
    for (double x : est.pairwise_crossings) sum += x;
    est.p_c = sum / static_cast<double>(est.pairwise_crossings.size());
    auto [mn, mx] = std::minmax_element(est.pairwise_crossings.begin(), est.pairwise_crossings.end());
    est.uncertainty = (*mx - *mn) / 2.0;
    if (est.pairwise_crossings.size() == 1) est.uncertainty = (grid.back() - grid.front()) / grid.size();
    est.ok = true;
    return est;
}

double coordination_estimate(int z) {
    if (z < 2) throw std::invalid_argument("coordination number must be at least 2");
    return 1.0 / (z - 1);
}

}  // namespace forge
