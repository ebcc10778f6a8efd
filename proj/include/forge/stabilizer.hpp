#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "forge/rng.hpp"

namespace forge {

// Undirected simple graph on vertices 0..n-1. Edges are stored as a sorted,
// deduplicated list of (lo, hi) pairs.
struct GraphAdjacency {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    GraphAdjacency() = default;
    explicit GraphAdjacency(int n_) : n(n_) {}

    void add_edge(int a, int b);
    bool has_edge(int a, int b) const;
    void toggle_edge(int a, int b);
    std::vector<int> neighbors(int v) const;
    void normalize();  // sort + dedupe
    bool operator==(const GraphAdjacency& o) const { return n == o.n && edges == o.edges; }

    std::string to_json() const;
    static GraphAdjacency from_json(const std::string& text);
};

// Complement the edge set among the neighbors of v; everything else unchanged.
GraphAdjacency local_complement(const GraphAdjacency& g, int v);

enum class Gate : uint8_t {
    H,
    X,
    Y,
    Z,
    S,        // diag(1, i): X -> Y
    SqrtIX,   // exp(+i pi X / 4): Z -> Y
    SqrtIXd,  // exp(-i pi X / 4): Z -> -Y
    SqrtIZ,   // exp(+i pi Z / 4): X -> -Y
    SqrtIZd,  // exp(-i pi Z / 4): X -> Y
    CZ,
    CNOT,
    ScatterCZ,  // X_L CZ X_L, the time-bin scattering gate; equals CZ * Z_R
};

const char* gate_name(Gate g);

enum class Pauli : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

// Stabilizer state of n qubits as n generator rows over GF(2) with sign bits.
// Only stabilizers are stored (no destabilizers); random-outcome measurements
// do the required group manipulation directly on the rows.
class StabilizerState {
  public:
    StabilizerState() = default;
    explicit StabilizerState(int n);  // |0...0>

    int num_qubits() const { return n_; }

    bool x_bit(int row, int q) const { return bit(xs_, row, q); }
    bool z_bit(int row, int q) const { return bit(zs_, row, q); }
    bool phase_bit(int row) const { return phase_[row]; }

    void apply(Gate g, int a);
    void apply(Gate g, int a, int b);

    // Measure a single-qubit Pauli. Returns +1 or -1; the state collapses in
    // place. Deterministic outcomes leave the state untouched.
    int measure(Pauli p, int qubit, Rng& rng);

    // True if measuring `p` on `qubit` has a deterministic outcome.
    bool is_deterministic(Pauli p, int qubit) const;

    // Reduced row echelon form over GF(2), X-block columns first, with exact
    // sign tracking. Two states are equal (up to global phase) iff their
    // canonical forms are identical.
    StabilizerState canonical() const;
    bool same_state(const StabilizerState& other) const;

    // Drop qubits that are in a product |0> with the rest. Throws if a
    // dropped qubit is not exactly +Z-stabilized and disentangled.
    StabilizerState restricted_to(const std::vector<int>& keep) const;

    // Diagnostics used by property tests.
    int rank() const;
    bool rows_commute() const;

    bool operator==(const StabilizerState& o) const {
        return n_ == o.n_ && xs_ == o.xs_ && zs_ == o.zs_ && phase_ == o.phase_;
    }

  private:
    friend StabilizerState graph_state_of(const GraphAdjacency&);
    friend struct ExtractResult;
    friend std::optional<struct ExtractResult> extract_graph(const StabilizerState&);

    bool bit(const std::vector<uint64_t>& m, int row, int q) const;
    void set_bit(std::vector<uint64_t>& m, int row, int q, bool v);
    int words() const { return (n_ + 63) / 64; }
    uint64_t* xrow(int r) { return xs_.data() + static_cast<size_t>(r) * words(); }
    uint64_t* zrow(int r) { return zs_.data() + static_cast<size_t>(r) * words(); }
    const uint64_t* xrow(int r) const { return xs_.data() + static_cast<size_t>(r) * words(); }
    const uint64_t* zrow(int r) const { return zs_.data() + static_cast<size_t>(r) * words(); }

    // row[target] *= row[source], with exact sign bookkeeping.
    void row_mult(int target, int source);
    void swap_rows(int a, int b);
    bool anticommutes_with_row(int row, Pauli p, int qubit) const;

    int n_ = 0;
    std::vector<uint64_t> xs_, zs_;  // row-major bit matrices, n rows
    std::vector<uint8_t> phase_;     // sign bit per row: 0 -> +, 1 -> -
};

// |Psi_G> = prod_{(i,j) in G} CZ_{i,j} |+>^n
StabilizerState graph_state_of(const GraphAdjacency& g);

struct ExtractResult {
    GraphAdjacency graph;
    // Local Cliffords that map the input state onto graph_state_of(graph),
    // applied in order.
    std::vector<std::pair<Gate, int>> cliffords;
};

// Every valid stabilizer state is local-Clifford equivalent to a graph state
// on the same vertex labels; returns nullopt only for corrupt tableaus.
std::optional<ExtractResult> extract_graph(const StabilizerState& s);

// Apply the local-complementation circuit at v: sqrt(iX)-type gate on v and
// sqrt(iZ)-type gates on its neighbors. Maps |G> to |LC_v(G)> exactly.
void local_complement_circuit(StabilizerState& s, int v, const std::vector<int>& neighbors);

}  // namespace forge
