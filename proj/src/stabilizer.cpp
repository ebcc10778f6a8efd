#include "forge/stabilizer.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace forge {

// ---------------------------------------------------------------------------
// GraphAdjacency

void GraphAdjacency::add_edge(int a, int b) {
    if (a == b) throw std::invalid_argument("graph edge with a self-loop");
    if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("graph edge out of range");
    auto e = std::minmax(a, b);
    auto it = std::lower_bound(edges.begin(), edges.end(), std::pair<int, int>(e.first, e.second));
    if (it == edges.end() || *it != std::pair<int, int>(e.first, e.second))
        edges.insert(it, {e.first, e.second});
}

bool GraphAdjacency::has_edge(int a, int b) const {
    auto e = std::minmax(a, b);
    return std::binary_search(edges.begin(), edges.end(), std::pair<int, int>(e.first, e.second));
}

void GraphAdjacency::toggle_edge(int a, int b) {
    auto e = std::minmax(a, b);
    auto it = std::lower_bound(edges.begin(), edges.end(), std::pair<int, int>(e.first, e.second));
    if (it != edges.end() && *it == std::pair<int, int>(e.first, e.second))
        edges.erase(it);
    else
        edges.insert(it, {e.first, e.second});
}

std::vector<int> GraphAdjacency::neighbors(int v) const {
    std::vector<int> out;
    for (const auto& [a, b] : edges) {
        if (a == v) out.push_back(b);
        if (b == v) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void GraphAdjacency::normalize() {
    for (auto& [a, b] : edges)
        if (a > b) std::swap(a, b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

std::string GraphAdjacency::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : edges) j["edges"].push_back({a, b});
    return j.dump();
}

GraphAdjacency GraphAdjacency::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    GraphAdjacency g(j.at("n").get<int>());
    for (const auto& e : j.at("edges")) g.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    return g;
}

GraphAdjacency local_complement(const GraphAdjacency& g, int v) {
    if (v < 0 || v >= g.n) throw std::invalid_argument("local_complement: vertex out of range");
    GraphAdjacency out = g;
    auto nb = g.neighbors(v);
    for (size_t i = 0; i < nb.size(); ++i)
        for (size_t j = i + 1; j < nb.size(); ++j) out.toggle_edge(nb[i], nb[j]);
    out.normalize();
    return out;
}

const char* gate_name(Gate g) {
    switch (g) {
        case Gate::H: return "H";
        case Gate::X: return "X";
        case Gate::Y: return "Y";
        case Gate::Z: return "Z";
        case Gate::S: return "S";
        case Gate::SqrtIX: return "SqrtIX";
        case Gate::SqrtIXd: return "SqrtIXd";
        case Gate::SqrtIZ: return "SqrtIZ";
        case Gate::SqrtIZd: return "SqrtIZd";
        case Gate::CZ: return "CZ";
        case Gate::CNOT: return "CNOT";
        case Gate::ScatterCZ: return "ScatterCZ";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// StabilizerState

StabilizerState::StabilizerState(int n) : n_(n) {
    if (n <= 0) throw std::invalid_argument("qubit count must be positive");
    xs_.assign(static_cast<size_t>(n) * words(), 0);
    zs_.assign(static_cast<size_t>(n) * words(), 0);
    phase_.assign(n, 0);
    for (int i = 0; i < n; ++i) set_bit(zs_, i, i, true);  // +Z_i stabilizes |0...0>
}

bool StabilizerState::bit(const std::vector<uint64_t>& m, int row, int q) const {
    return (m[static_cast<size_t>(row) * words() + static_cast<size_t>(q) / 64] >> (q % 64)) & 1;
}

void StabilizerState::set_bit(std::vector<uint64_t>& m, int row, int q, bool v) {
    size_t idx = static_cast<size_t>(row) * words() + static_cast<size_t>(q) / 64;
    uint64_t mask = 1ULL << (q % 64);
    if (v)
        m[idx] |= mask;
    else
        m[idx] &= ~mask;
}

void StabilizerState::row_mult(int target, int source) {
    // Phase tracking follows the CHP convention: a row with bits (x, z)
    // denotes the Hermitian Pauli with Y wherever x = z = 1, times (-1)^phase.
    int isum = 2 * (phase_[target] + phase_[source]);
    const uint64_t* sx = xrow(source);
    const uint64_t* sz = zrow(source);
    uint64_t* tx = xrow(target);
    uint64_t* tz = zrow(target);
    for (int q = 0; q < n_; ++q) {
        int w = q / 64, b = q % 64;
        int x1 = (sx[w] >> b) & 1, z1 = (sz[w] >> b) & 1;
        int x2 = (tx[w] >> b) & 1, z2 = (tz[w] >> b) & 1;
        if (x1 == 0 && z1 == 0) continue;
        if (x1 == 1 && z1 == 1)
            isum += z2 - x2;
        else if (x1 == 1)
            isum += z2 * (2 * x2 - 1);
        else
            isum += x2 * (1 - 2 * z2);
    }
    isum &= 3;
    assert(isum == 0 || isum == 2);
    phase_[target] = static_cast<uint8_t>(isum >> 1);
    for (int w = 0; w < words(); ++w) {
        tx[w] ^= sx[w];
        tz[w] ^= sz[w];
    }
}

void StabilizerState::swap_rows(int a, int b) {
    if (a == b) return;
    for (int w = 0; w < words(); ++w) {
        std::swap(xrow(a)[w], xrow(b)[w]);
        std::swap(zrow(a)[w], zrow(b)[w]);
    }
    std::swap(phase_[a], phase_[b]);
}

void StabilizerState::apply(Gate g, int a) {
    if (a < 0 || a >= n_) throw std::invalid_argument("gate target out of range");
    int w = a / 64;
    uint64_t mask = 1ULL << (a % 64);
    for (int r = 0; r < n_; ++r) {
        uint64_t& x = xrow(r)[w];
        uint64_t& z = zrow(r)[w];
        bool xb = x & mask, zb = z & mask;
        switch (g) {
            case Gate::H:
                if (xb && zb) phase_[r] ^= 1;
                x ^= (xb != zb) ? mask : 0;
                z ^= (xb != zb) ? mask : 0;
                break;
            case Gate::X:
                if (zb) phase_[r] ^= 1;
                break;
            case Gate::Y:
                if (xb != zb) phase_[r] ^= 1;
                break;
            case Gate::Z:
                if (xb) phase_[r] ^= 1;
                break;
            case Gate::S:
            case Gate::SqrtIZd:
                if (xb && zb) phase_[r] ^= 1;
                if (xb) z ^= mask;
                break;
            case Gate::SqrtIZ:
                if (xb && !zb) phase_[r] ^= 1;
                if (xb) z ^= mask;
                break;
            case Gate::SqrtIX:
                if (xb && zb) phase_[r] ^= 1;
                if (zb) x ^= mask;
                break;
            case Gate::SqrtIXd:
                if (!xb && zb) phase_[r] ^= 1;
                if (zb) x ^= mask;
                break;
            default:
                throw std::invalid_argument("two-qubit gate applied with one target");
        }
    }
}

void StabilizerState::apply(Gate g, int a, int b) {
    if (a < 0 || a >= n_ || b < 0 || b >= n_) throw std::invalid_argument("gate target out of range");
    if (a == b) throw std::invalid_argument("two-qubit gate with identical targets");
    int wa = a / 64, wb = b / 64;
    uint64_t ma = 1ULL << (a % 64), mb = 1ULL << (b % 64);
    for (int r = 0; r < n_; ++r) {
        uint64_t* x = xrow(r);
        uint64_t* z = zrow(r);
        bool xa = x[wa] & ma, za = z[wa] & ma;
        bool xb = x[wb] & mb, zb = z[wb] & mb;
        switch (g) {
            case Gate::CZ:
                if (xa && xb && (za != zb)) phase_[r] ^= 1;
                if (xb) z[wa] ^= ma;
                if (xa) z[wb] ^= mb;
                break;
            case Gate::ScatterCZ:
                // X_L CZ X_L = CZ * Z_R with L = a, R = b.
                if (xa && xb && (za != zb)) phase_[r] ^= 1;
                if (xb) phase_[r] ^= 1;
                if (xb) z[wa] ^= ma;
                if (xa) z[wb] ^= mb;
                break;
            case Gate::CNOT:
                // a = control, b = target
                if (xa && zb && (xb == za)) phase_[r] ^= 1;
                if (xa) x[wb] ^= mb;
                if (zb) z[wa] ^= ma;
                break;
            default:
                throw std::invalid_argument("single-qubit gate applied with two targets");
        }
    }
}

bool StabilizerState::anticommutes_with_row(int row, Pauli p, int qubit) const {
    bool x = x_bit(row, qubit), z = z_bit(row, qubit);
    switch (p) {
        case Pauli::X: return z;
        case Pauli::Y: return x != z;
        case Pauli::Z: return x;
        default: return false;
    }
}

bool StabilizerState::is_deterministic(Pauli p, int qubit) const {
    for (int r = 0; r < n_; ++r)
        if (anticommutes_with_row(r, p, qubit)) return false;
    return true;
}

int StabilizerState::measure(Pauli p, int qubit, Rng& rng) {
    if (qubit < 0 || qubit >= n_) throw std::invalid_argument("measured qubit out of range");
    if (p == Pauli::I) throw std::invalid_argument("cannot measure identity");

    int pivot = -1;
    for (int r = 0; r < n_; ++r) {
        if (anticommutes_with_row(r, p, qubit)) {
            pivot = r;
            break;
        }
    }

    if (pivot >= 0) {
        // Random outcome: fold the other anticommuting rows into the pivot,
        // then replace the pivot with the signed measurement operator.
        for (int r = pivot + 1; r < n_; ++r)
            if (anticommutes_with_row(r, p, qubit)) row_mult(r, pivot);
        bool minus = rng.bernoulli(0.5);
        for (int w = 0; w < words(); ++w) {
            xrow(pivot)[w] = 0;
            zrow(pivot)[w] = 0;
        }
        if (p != Pauli::Z) set_bit(xs_, pivot, qubit, true);
        if (p != Pauli::X) set_bit(zs_, pivot, qubit, true);
        phase_[pivot] = minus ? 1 : 0;
        return minus ? -1 : +1;
    }

    // Deterministic outcome: express the measured operator over the canonical
    // generators and read off the accumulated sign.
    StabilizerState c = canonical();
    std::vector<uint64_t> ax(words(), 0), az(words(), 0);  // accumulator Pauli
    int acc_phase = 0;                                     // exponent of i, mod 4
    std::vector<uint64_t> rx(words(), 0), rz(words(), 0);  // residual bits of M
    if (p != Pauli::Z) rx[qubit / 64] |= 1ULL << (qubit % 64);
    if (p != Pauli::X) rz[qubit / 64] |= 1ULL << (qubit % 64);

    for (int r = 0; r < n_; ++r) {
        // Leading column of canonical row r (X block first, then Z block).
        int lead = -1;
        bool lead_is_x = true;
        for (int q = 0; q < n_ && lead < 0; ++q)
            if (c.x_bit(r, q)) { lead = q; lead_is_x = true; }
        for (int q = 0; q < n_ && lead < 0; ++q)
            if (c.z_bit(r, q)) { lead = q; lead_is_x = false; }
        if (lead < 0) continue;
        bool res_bit = lead_is_x ? ((rx[lead / 64] >> (lead % 64)) & 1) : ((rz[lead / 64] >> (lead % 64)) & 1);
        if (!res_bit) continue;
        // accumulator *= row r (row r on the left); residual ^= row r
        acc_phase += 2 * c.phase_[r];
        for (int q = 0; q < n_; ++q) {
            int x1 = c.x_bit(r, q), z1 = c.z_bit(r, q);
            int x2 = (ax[q / 64] >> (q % 64)) & 1, z2 = (az[q / 64] >> (q % 64)) & 1;
            if (x1 == 0 && z1 == 0) continue;
            if (x1 == 1 && z1 == 1)
                acc_phase += z2 - x2;
            else if (x1 == 1)
                acc_phase += z2 * (2 * x2 - 1);
            else
                acc_phase += x2 * (1 - 2 * z2);
        }
        for (int w = 0; w < words(); ++w) {
            ax[w] ^= c.xrow(r)[w];
            az[w] ^= c.zrow(r)[w];
            rx[w] ^= c.xrow(r)[w];
            rz[w] ^= c.zrow(r)[w];
        }
    }
    for (int w = 0; w < words(); ++w)
        if (rx[w] || rz[w]) throw std::logic_error("measured operator not in the stabilizer span");
    acc_phase &= 3;
    if (acc_phase != 0 && acc_phase != 2) throw std::logic_error("non-Hermitian sign in measurement solve");
    return acc_phase ? -1 : +1;
}

StabilizerState StabilizerState::canonical() const {
    StabilizerState c = *this;
    int rank_rows = 0;
    auto column_bit = [&](int row, int col) {
        return col < c.n_ ? c.x_bit(row, col) : c.z_bit(row, col - c.n_);
    };
    for (int col = 0; col < 2 * c.n_ && rank_rows < c.n_; ++col) {
        int pivot = -1;
        for (int r = rank_rows; r < c.n_; ++r)
            if (column_bit(r, col)) { pivot = r; break; }
        if (pivot < 0) continue;
        c.swap_rows(rank_rows, pivot);
        for (int r = 0; r < c.n_; ++r)
            if (r != rank_rows && column_bit(r, col)) c.row_mult(r, rank_rows);
        ++rank_rows;
    }
    return c;
}

bool StabilizerState::same_state(const StabilizerState& other) const {
    if (n_ != other.n_) return false;
    return canonical() == other.canonical();
}

int StabilizerState::rank() const {
    StabilizerState c = canonical();
    int r = 0;
    for (int row = 0; row < n_; ++row) {
        bool nonzero = false;
        for (int w = 0; w < c.words(); ++w)
            if (c.xrow(row)[w] | c.zrow(row)[w]) { nonzero = true; break; }
        if (nonzero) ++r;
    }
    return r;
}

bool StabilizerState::rows_commute() const {
    for (int a = 0; a < n_; ++a) {
        for (int b = a + 1; b < n_; ++b) {
            int sym = 0;
            for (int w = 0; w < words(); ++w) {
                uint64_t v = (xrow(a)[w] & zrow(b)[w]) ^ (zrow(a)[w] & xrow(b)[w]);
                sym ^= __builtin_parityll(v);
            }
            if (sym) return false;
        }
    }
    return true;
}

StabilizerState StabilizerState::restricted_to(const std::vector<int>& keep) const {
    std::vector<bool> kept(n_, false);
    for (int q : keep) {
        if (q < 0 || q >= n_) throw std::invalid_argument("restricted_to: qubit out of range");
        kept[q] = true;
    }
    StabilizerState c = canonical();

    // Rows that are a bare +Z on a dropped qubit get removed; everything else
    // must not touch dropped qubits at all.
    std::vector<int> kept_rows;
    std::vector<bool> row_used(n_, false);
    for (int q = 0; q < n_; ++q) {
        if (kept[q]) continue;
        int found = -1;
        for (int r = 0; r < n_; ++r) {
            if (row_used[r]) continue;
            bool pure = c.z_bit(r, q) && !c.phase_bit(r);
            if (!pure) continue;
            for (int t = 0; t < n_ && pure; ++t) {
                if (c.x_bit(r, t)) pure = false;
                if (t != q && c.z_bit(r, t)) pure = false;
            }
            if (pure) { found = r; break; }
        }
        if (found < 0) throw std::invalid_argument("restricted_to: dropped qubit is not a +Z product factor");
        row_used[found] = true;
    }
    for (int r = 0; r < n_; ++r)
        if (!row_used[r]) kept_rows.push_back(r);
    if (static_cast<int>(kept_rows.size()) != static_cast<int>(keep.size()))
        throw std::invalid_argument("restricted_to: row/qubit count mismatch");

    std::vector<int> sorted_keep = keep;
    std::sort(sorted_keep.begin(), sorted_keep.end());
    StabilizerState out(static_cast<int>(sorted_keep.size()));
    for (size_t i = 0; i < kept_rows.size(); ++i) {
        int r = kept_rows[i];
        for (size_t j = 0; j < sorted_keep.size(); ++j) {
            int q = sorted_keep[j];
            if (!kept[q]) continue;
            out.set_bit(out.xs_, static_cast<int>(i), static_cast<int>(j), c.x_bit(r, q));
            out.set_bit(out.zs_, static_cast<int>(i), static_cast<int>(j), c.z_bit(r, q));
        }
        // Safety: the row must not touch any dropped qubit.
        for (int q = 0; q < n_; ++q)
            if (!kept[q] && (c.x_bit(r, q) || c.z_bit(r, q)))
                throw std::invalid_argument("restricted_to: dropped qubit still entangled");
        out.phase_[i] = c.phase_[r];
    }
    return out;
}

StabilizerState graph_state_of(const GraphAdjacency& g) {
    StabilizerState s(g.n);
    for (int i = 0; i < g.n; ++i) s.apply(Gate::H, i);
    for (const auto& [a, b] : g.edges) s.apply(Gate::CZ, a, b);
    return s;
}

std::optional<ExtractResult> extract_graph(const StabilizerState& input) {
    const int n = input.num_qubits();
    StabilizerState c = input.canonical();
    ExtractResult res;
    res.graph = GraphAdjacency(n);

    auto x_rank = [&](StabilizerState& s) {
        // Row-reduce over the X block only; returns rank and leaves s reduced.
        int rr = 0;
        for (int col = 0; col < n && rr < n; ++col) {
            int pivot = -1;
            for (int r = rr; r < n; ++r)
                if (s.x_bit(r, col)) { pivot = r; break; }
            if (pivot < 0) continue;
            s.swap_rows(rr, pivot);
            for (int r = 0; r < n; ++r)
                if (r != rr && s.x_bit(r, col)) s.row_mult(r, rr);
            ++rr;
        }
        return rr;
    };

    for (int guard = 0; guard <= n; ++guard) {
        int r = x_rank(c);
        if (r == n) break;
        if (guard == n) return std::nullopt;
        // Rows below the X-rank have empty X parts; Hadamard the leading Z
        // column of the first such row to grow the X block.
        int q = -1;
        for (int col = 0; col < n && q < 0; ++col)
            if (c.z_bit(r, col)) q = col;
        if (q < 0) return std::nullopt;  // zero row: corrupt tableau
        c.apply(Gate::H, q);
        res.cliffords.push_back({Gate::H, q});
    }

    // X block is now the identity (full-rank RREF); the Z block must be the
    // adjacency matrix plus a diagonal we are free to clear with S gates.
    for (int q = 0; q < n; ++q) {
        if (c.z_bit(q, q)) {
            c.apply(Gate::S, q);
            res.cliffords.push_back({Gate::S, q});
        }
    }
    for (int r = 0; r < n; ++r) {
        if (c.phase_bit(r)) {
            c.apply(Gate::Z, r);
            res.cliffords.push_back({Gate::Z, r});
        }
    }
    for (int r = 0; r < n; ++r)
        for (int q = r + 1; q < n; ++q) {
            if (c.z_bit(r, q) != c.z_bit(q, r)) return std::nullopt;  // not symmetric: corrupt
            if (c.z_bit(r, q)) res.graph.add_edge(r, q);
        }

    if (!c.same_state(graph_state_of(res.graph))) return std::nullopt;
    return res;
}

void local_complement_circuit(StabilizerState& s, int v, const std::vector<int>& neighbors) {
    s.apply(Gate::SqrtIXd, v);
    for (int w : neighbors) s.apply(Gate::SqrtIZ, w);
}

}  // namespace forge
