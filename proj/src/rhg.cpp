#include "forge/rhg.hpp"

#include "forge/offset_union_find.hpp"

#include <algorithm>
#include <stdexcept>

namespace forge {

SyndromeGraph build_syndrome_graph(int l) {
    if (l < 2 || l % 2 != 0) throw std::invalid_argument("syndrome graph needs even L >= 2");
    SyndromeGraph g;
    g.l = l;
    g.n_vertices = l * l * l;
    g.edges.resize(3 * static_cast<size_t>(g.n_vertices));
    for (int v = 0; v < g.n_vertices; ++v) {
        auto [x, y, z] = g.vertex_coords(v);
        for (int axis = 0; axis < 3; ++axis) {
            int nx = x + (axis == 0), ny = y + (axis == 1), nz = z + (axis == 2);
            bool wraps = nx == l || ny == l || nz == l;
            int u = g.vertex_id(nx % l, ny % l, nz % l);
            g.edges[g.edge_id(v, axis)] = {v, u, static_cast<int8_t>(axis), wraps};
        }
    }
    // CSR adjacency (each vertex has degree 6).
    g.adj_offset.assign(g.n_vertices + 1, 0);
    for (const auto& e : g.edges) {
        ++g.adj_offset[e.u + 1];
        ++g.adj_offset[e.v + 1];
    }
    for (int v = 0; v < g.n_vertices; ++v) g.adj_offset[v + 1] += g.adj_offset[v];
    g.adj.resize(2 * g.edges.size());
    std::vector<int> cursor(g.adj_offset.begin(), g.adj_offset.end() - 1);
    for (size_t id = 0; id < g.edges.size(); ++id) {
        const auto& e = g.edges[id];
        g.adj[cursor[e.u]++] = {e.v, static_cast<int>(id)};
        g.adj[cursor[e.v]++] = {e.u, static_cast<int>(id)};
    }
    // Correlated pairs in the protocol-generated orientations.
    static constexpr int8_t orient[4][2] = {{0, 1}, {0, 2}, {1, 2}, {2, 1}};
    for (int v = 0; v < g.n_vertices; ++v) {
        auto [x, y, z] = g.vertex_coords(v);
        for (auto [d1, d2] : orient) {
            int nx = x + (d2 == 0), ny = y + (d2 == 1), nz = z + (d2 == 2);
            int w = g.vertex_id(nx % l, ny % l, nz % l);
            g.pairs.push_back({g.edge_id(v, d1), g.edge_id(w, d1), d1, d2});
        }
    }
    return g;
}

RHGLattice build_rhg(int l) {
    RHGLattice lat;
    lat.l = l;
    lat.primal = build_syndrome_graph(l);
    lat.dual = build_syndrome_graph(l);
    return lat;
}

std::array<int, 3> RHGLattice::primal_qubit_coords(int edge_id) const {
    int v = edge_id / 3, axis = edge_id % 3;
    auto [x, y, z] = primal.vertex_coords(v);
    std::array<int, 3> c{2 * x + 1, 2 * y + 1, 2 * z + 1};  // cell center
    c[axis] = (c[axis] + 1) % (2 * l);                      // face between the two cells
    return c;
}

std::array<int, 3> RHGLattice::dual_qubit_coords(int edge_id) const {
    int v = edge_id / 3, axis = edge_id % 3;
    auto [x, y, z] = dual.vertex_coords(v);
    std::array<int, 3> c{2 * x, 2 * y, 2 * z};  // primal vertex
    c[axis] = (c[axis] + 1) % (2 * l);          // midpoint of the leaving edge
    return c;
}

BondLattice carve_adjacency(int l) {
    if (l < 4 || l % 2 != 0) throw std::invalid_argument("carve adjacency needs even L >= 4");
    BondLattice b;
    b.l = l;
    b.n_vertices = l * l * l;
    auto vid = [&](int x, int y, int z) {
        return ((z % l + l) % l * l + (y % l + l) % l) * l + (x % l + l) % l;
    };
    // Half of each displacement class per vertex so every bond appears once.
    std::vector<std::array<int8_t, 3>> disp;
    disp.push_back({1, 0, 0});
    disp.push_back({0, 1, 0});
    disp.push_back({0, 0, 1});
    for (int s : {-1, 1}) {
        disp.push_back({1, static_cast<int8_t>(s), 0});
        disp.push_back({1, 0, static_cast<int8_t>(s)});
        disp.push_back({0, 1, static_cast<int8_t>(s)});
    }
    disp.push_back({2, 0, 0});
    disp.push_back({0, 2, 0});
    disp.push_back({0, 0, 2});
    for (int z = 0; z < l; ++z)
        for (int y = 0; y < l; ++y)
            for (int x = 0; x < l; ++x)
                for (const auto& d : disp)
                    b.bonds.push_back({vid(x, y, z), vid(x + d[0], y + d[1], z + d[2]), d});
    return b;
}

// (offset union-find shared with the percolation module)

MergedGraph merge_superchecks(const SyndromeGraph& g, const std::vector<uint8_t>& lost,
                              const EffectiveRates& rates) {
    if (lost.size() != g.edges.size()) throw std::invalid_argument("loss mask size mismatch");
    MergedGraph m;
    OffsetUnionFind uf(g.n_vertices);
    for (size_t id = 0; id < g.edges.size(); ++id) {
        if (!lost[id]) continue;
        const auto& e = g.edges[id];
        std::array<int, 3> delta{0, 0, 0};
        delta[e.axis] = 1;
        if (uf.unite_detect_wrap(e.u, e.v, delta)) m.lost_wraps = true;
    }
    m.super_of.assign(g.n_vertices, -1);
    m.representative.clear();
    m.offset.assign(g.n_vertices, {0, 0, 0});
    std::vector<int> root_of(g.n_vertices);
    for (int v = 0; v < g.n_vertices; ++v) root_of[v] = uf.find(v);
    for (int v = 0; v < g.n_vertices; ++v) {
        int r = root_of[v];
        if (m.super_of[r] < 0) {
            m.super_of[r] = static_cast<int>(m.representative.size());
            m.representative.push_back(r);
        }
        m.super_of[v] = m.super_of[r];
        m.offset[v] = uf.offset(v);  // root-relative after full path compression
    }
    m.n_super = static_cast<int>(m.representative.size());

    // Group surviving edges into bundles keyed by supervertex pair.
    std::vector<std::pair<uint64_t, int>> keyed;
    keyed.reserve(g.edges.size());
    for (size_t id = 0; id < g.edges.size(); ++id) {
        if (lost[id]) continue;
        int a = m.super_of[g.edges[id].u], b = m.super_of[g.edges[id].v];
        if (a > b) std::swap(a, b);
        keyed.push_back({(static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b), static_cast<int>(id)});
    }
    std::sort(keyed.begin(), keyed.end());
    m.bundle_of_edge.assign(g.edges.size(), -1);
    for (size_t i = 0; i < keyed.size();) {
        size_t j = i;
        MergedGraph::Bundle bun;
        bun.su = static_cast<int>(keyed[i].first >> 32);
        bun.sv = static_cast<int>(keyed[i].first & 0xffffffffu);
        while (j < keyed.size() && keyed[j].first == keyed[i].first) {
            ++bun.n[g.edges[keyed[j].second].axis];
            ++j;
        }
        bun.p_eff = supercheck_rate(bun.n[0], bun.n[1], bun.n[2], rates);
        bun.weight = edge_weight(std::min(bun.p_eff, 0.5));
        int idx = static_cast<int>(m.bundles.size());
        for (size_t k = i; k < j; ++k) m.bundle_of_edge[keyed[k].second] = idx;
        m.bundles.push_back(bun);
        i = j;
    }
    return m;
}

void dump_graph_csv(std::ostream& out, const SyndromeGraph& g, const EffectiveRates& rates,
                    const std::vector<uint8_t>& lost) {
    out << "v1,v2,type,q,w,lost\n";
    const char axis_name[3] = {'x', 'y', 'z'};
    for (size_t id = 0; id < g.edges.size(); ++id) {
        const auto& e = g.edges[id];
        double q = rates.by_direction(e.axis);
        bool is_lost = id < lost.size() && lost[id];
        out << e.u << ',' << e.v << ',' << axis_name[e.axis] << ',' << q << ','
            << (is_lost ? 0.0 : edge_weight(q)) << ',' << (is_lost ? 1 : 0) << '\n';
    }
}

}  // namespace forge
