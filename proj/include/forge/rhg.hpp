#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

#include "forge/error_model.hpp"

namespace forge {

// Parity-check graph of one RHG sublattice on the 3-torus: simple cubic with
// L^3 check vertices and 3L^3 qubit edges. Edge ids are 3*vertex + axis for
// the edge leaving `vertex` in +axis.
struct SyndromeGraph {
    int l = 0;
    int n_vertices = 0;

    struct Edge {
        int u, v;
        int8_t axis;    // 0,1,2
        bool wraps;     // crosses the periodic seam along its axis
    };
    std::vector<Edge> edges;

    // CSR adjacency: (neighbor vertex, edge id) per vertex.
    std::vector<int> adj_offset;
    std::vector<std::pair<int, int>> adj;

    // Correlated pairs: two parallel edges of direction d1 on opposite sides
    // of a face spanned by (d1, d2). Only the orientations the generation
    // protocol produces are present: (x,y), (x,z), (y,z), (z,y).
    struct CorrPair {
        int e1, e2;
        int8_t d1, d2;
    };
    std::vector<CorrPair> pairs;

    int vertex_id(int x, int y, int z) const { return (z * l + y) * l + x; }
    std::array<int, 3> vertex_coords(int v) const { return {v % l, (v / l) % l, v / (l * l)}; }
    int edge_id(int v, int axis) const { return 3 * v + axis; }

    double pair_rate(const CorrPair& p, const EffectiveRates& r) const {
        if (p.d1 == 0) return p.d2 == 1 ? r.q_xy : r.q_xz;
        if (p.d1 == 1) return r.q_yz;
        return r.q_zy;
    }
};

SyndromeGraph build_syndrome_graph(int l);

// Both decoding sublattices plus the cluster-coordinate embedding of their
// qubits (coordinates live on the doubled cell, modulo 2L).
struct RHGLattice {
    int l = 0;
    SyndromeGraph primal, dual;

    std::array<int, 3> primal_qubit_coords(int edge_id) const;  // face qubits
    std::array<int, 3> dual_qubit_coords(int edge_id) const;    // edge qubits
};

RHGLattice build_rhg(int l);

// Generic bond lattice on a periodic torus, used by the percolation module.
// Bond displacement is stored unwrapped, in lattice units.
struct BondLattice {
    int l = 0;
    int n_vertices = 0;
    int dims = 3;
    struct Bond {
        int u, v;
        std::array<int8_t, 3> disp;
    };
    std::vector<Bond> bonds;
};

// Percolation graph of the carve construction: simple cubic with first,
// second, and fourth nearest neighbors (z = 6 + 12 + 6 = 24).
BondLattice carve_adjacency(int l);

// Loss-merged decoding graph. Vertices connected by lost edges collapse into
// superchecks; surviving parallel edges between two superchecks form one
// effective bundle whose rate follows the odd-parity formula.
struct MergedGraph {
    int n_super = 0;
    bool lost_wraps = false;       // a lost cluster wraps the torus
    std::vector<int> super_of;     // vertex -> supervertex
    std::vector<int> representative;  // supervertex -> its union-find root
    // Unwrapped position of each vertex relative to its component root;
    // closes chains through lost components when classifying homology.
    std::vector<std::array<int, 3>> offset;

    struct Bundle {
        int su, sv;          // su <= sv; su == sv marks a self-bundle
        std::array<int, 3> n{0, 0, 0};
        double p_eff = 0;
        double weight = 0;
    };
    std::vector<Bundle> bundles;
    std::vector<int> bundle_of_edge;  // edge -> bundle index, -1 for lost edges
};

MergedGraph merge_superchecks(const SyndromeGraph& g, const std::vector<uint8_t>& lost,
                              const EffectiveRates& rates);

// CSV rows (v1, v2, type, q, w, lost) for external plotting.
void dump_graph_csv(std::ostream& out, const SyndromeGraph& g, const EffectiveRates& rates,
                    const std::vector<uint8_t>& lost);

}  // namespace forge
