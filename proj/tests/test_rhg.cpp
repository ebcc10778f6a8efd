#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "forge/rhg.hpp"
#include "forge/rng.hpp"

using namespace forge;

TEST_CASE("syndrome graph counts and degrees") {
    SyndromeGraph g = build_syndrome_graph(4);
    CHECK(g.n_vertices == 64);
    CHECK(g.edges.size() == 192);
    int per_axis[3] = {0, 0, 0};
    for (const auto& e : g.edges) per_axis[e.axis]++;
    CHECK(per_axis[0] == 64);
    CHECK(per_axis[1] == 64);
    CHECK(per_axis[2] == 64);
    for (int v = 0; v < g.n_vertices; ++v) CHECK(g.adj_offset[v + 1] - g.adj_offset[v] == 6);
    CHECK(g.pairs.size() == 4 * 64);
    CHECK_THROWS_AS(build_syndrome_graph(3), std::invalid_argument);
}

TEST_CASE("primal and dual lattices are isomorphic under the half-cell shift") {
    RHGLattice lat = build_rhg(4);
    const int m = 2 * lat.l;
    for (size_t id = 0; id < lat.primal.edges.size(); ++id) {
        auto p = lat.primal_qubit_coords(static_cast<int>(id));
        auto d = lat.dual_qubit_coords(static_cast<int>(id));
        for (int k = 0; k < 3; ++k) CHECK(p[k] == (d[k] + 1) % m);
    }
    // Parity sanity: primal qubits sit on faces (two odd coords), dual qubits
    // on edges (one odd coord).
    for (size_t id = 0; id < lat.primal.edges.size(); ++id) {
        auto p = lat.primal_qubit_coords(static_cast<int>(id));
        auto d = lat.dual_qubit_coords(static_cast<int>(id));
        CHECK((p[0] % 2 + p[1] % 2 + p[2] % 2) == 2);
        CHECK((d[0] % 2 + d[1] % 2 + d[2] % 2) == 1);
    }
}

TEST_CASE("carve adjacency is the z = 24 extended lattice") {
    BondLattice b = carve_adjacency(4);
    CHECK(b.n_vertices == 64);
    CHECK(b.bonds.size() == 12u * 64);  // z*L^3/2
    std::vector<int> degree(b.n_vertices, 0);
    std::map<std::array<int, 3>, int> disp_count;
    for (const auto& bond : b.bonds) {
        degree[bond.u]++;
        degree[bond.v]++;
        if (bond.u == 0 || bond.v == 0) {
            // displacement away from vertex 0, in cluster units (cell = 2a)
            std::array<int, 3> d;
            for (int k = 0; k < 3; ++k) d[k] = 2 * (bond.u == 0 ? bond.disp[k] : -bond.disp[k]);
            disp_count[d]++;
        }
    }
    for (int v = 0; v < b.n_vertices; ++v) CHECK(degree[v] == 24);
    // first neighbors at distance 2, second at 2*sqrt(2), fourth at 4
    int first = 0, second = 0, fourth = 0;
    for (const auto& [d, c] : disp_count) {
        int r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        if (r2 == 4) first += c;
        if (r2 == 8) second += c;
        if (r2 == 16) fourth += c;
    }
    CHECK(first == 6);
    CHECK(second == 12);
    CHECK(fourth == 6);
}

TEST_CASE("supercheck merging") {
    EffectiveRates r = effective_rates(ErrorModelParams::uniform(5e-3));
    SyndromeGraph g = build_syndrome_graph(4);

    SUBCASE("no losses: every edge is its own unit bundle") {
        std::vector<uint8_t> lost(g.edges.size(), 0);
        MergedGraph m = merge_superchecks(g, lost, r);
        CHECK(m.n_super == g.n_vertices);
        CHECK(!m.lost_wraps);
        CHECK(m.bundles.size() == g.edges.size());
        for (size_t id = 0; id < g.edges.size(); ++id) {
            const auto& bun = m.bundles[m.bundle_of_edge[id]];
            CHECK(bun.n[g.edges[id].axis] == 1);
            CHECK(bun.n[0] + bun.n[1] + bun.n[2] == 1);
            CHECK(bun.p_eff == doctest::Approx(r.by_direction(g.edges[id].axis)));
        }
    }

    SUBCASE("two parallel lost x-edges bundle the enclosed y-edges") {
        // Lose (A, A+x) and (A+y, A+x+y): the two y-edges between the merged
        // pairs become one effective edge with p = 2 q_y (1 - q_y).
        std::vector<uint8_t> lost(g.edges.size(), 0);
        int a = g.vertex_id(1, 1, 1);
        int ay = g.vertex_id(1, 2, 1);
        lost[g.edge_id(a, 0)] = 1;
        lost[g.edge_id(ay, 0)] = 1;
        MergedGraph m = merge_superchecks(g, lost, r);
        CHECK(m.n_super == g.n_vertices - 2);
        int e1 = g.edge_id(a, 1);  // (A, A+y)
        int e2 = g.edge_id(g.vertex_id(2, 1, 1), 1);  // (A+x, A+x+y)
        CHECK(m.bundle_of_edge[e1] == m.bundle_of_edge[e2]);
        const auto& bun = m.bundles[m.bundle_of_edge[e1]];
        CHECK(bun.n[1] == 2);
        CHECK(bun.p_eff == doctest::Approx(2 * r.q_y * (1 - r.q_y)));
    }

    SUBCASE("a straight lost line around the torus is flagged") {
        std::vector<uint8_t> lost(g.edges.size(), 0);
        for (int x = 0; x < 4; ++x) lost[g.edge_id(g.vertex_id(x, 0, 0), 0)] = 1;
        MergedGraph m = merge_superchecks(g, lost, r);
        CHECK(m.lost_wraps);
    }

    SUBCASE("multiplicities are conserved and merging is deterministic") {
        Rng rng(7);
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<uint8_t> lost(g.edges.size(), 0);
            for (auto& b : lost) b = rng.bernoulli(0.15);
            MergedGraph m1 = merge_superchecks(g, lost, r);
            MergedGraph m2 = merge_superchecks(g, lost, r);
            CHECK(m1.super_of == m2.super_of);
            CHECK(m1.bundles.size() == m2.bundles.size());
            int total[3] = {0, 0, 0}, expect[3] = {0, 0, 0};
            for (const auto& bun : m1.bundles)
                for (int k = 0; k < 3; ++k) total[k] += bun.n[k];
            for (size_t id = 0; id < g.edges.size(); ++id)
                if (!lost[id]) expect[g.edges[id].axis]++;
            for (int k = 0; k < 3; ++k) CHECK(total[k] == expect[k]);
        }
    }

    SUBCASE("contraction preserves syndrome parity") {
        Rng rng(21);
        std::vector<uint8_t> lost(g.edges.size(), 0);
        for (auto& b : lost) b = rng.bernoulli(0.12);
        MergedGraph m = merge_superchecks(g, lost, r);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<uint8_t> flip(g.edges.size(), 0);
            for (size_t id = 0; id < flip.size(); ++id)
                if (!lost[id]) flip[id] = rng.bernoulli(0.05);
            // per-vertex parities, then XOR into supervertices
            std::vector<int> vert(g.n_vertices, 0), super1(m.n_super, 0), super2(m.n_super, 0);
            for (size_t id = 0; id < g.edges.size(); ++id)
                if (flip[id]) {
                    vert[g.edges[id].u] ^= 1;
                    vert[g.edges[id].v] ^= 1;
                }
            for (int v = 0; v < g.n_vertices; ++v) super1[m.super_of[v]] ^= vert[v];
            // direct supervertex parities
            for (size_t id = 0; id < g.edges.size(); ++id)
                if (flip[id]) {
                    super2[m.super_of[g.edges[id].u]] ^= 1;
                    super2[m.super_of[g.edges[id].v]] ^= 1;
                }
            CHECK(super1 == super2);
        }
    }

    SUBCASE("sub-threshold loss keeps merged components small") {
        SyndromeGraph big = build_syndrome_graph(10);
        Rng rng(5);
        std::vector<uint8_t> lost(big.edges.size(), 0);
        for (auto& b : lost) b = rng.bernoulli(0.15);
        MergedGraph m = merge_superchecks(big, lost, r);
        std::vector<int> size(m.n_super, 0);
        for (int v = 0; v < big.n_vertices; ++v) size[m.super_of[v]]++;
        CHECK(*std::max_element(size.begin(), size.end()) < big.n_vertices / 5);
    }
}

TEST_CASE("graph CSV dump") {
    SyndromeGraph g = build_syndrome_graph(2);
    EffectiveRates r = effective_rates(ErrorModelParams::uniform(1e-3));
    std::vector<uint8_t> lost(g.edges.size(), 0);
    lost[0] = 1;
    std::ostringstream out;
    dump_graph_csv(out, g, r, lost);
    std::istringstream in(out.str());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 1 + static_cast<int>(g.edges.size()));
    CHECK(out.str().substr(0, 20) == std::string("v1,v2,type,q,w,lost\n").substr(0, 20));
}
