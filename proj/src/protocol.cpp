#include "forge/protocol.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace forge {

double to_ns(const Time& t) {
    return static_cast<double>(t.numerator()) / static_cast<double>(t.denominator());
}

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::PiO: return "PiO";
        case EventKind::PiR: return "PiR";
        case EventKind::HalfPiR: return "HalfPiR";
        case EventKind::EmitterMeasure: return "EmitterMeasure";
        case EventKind::PhotonGate: return "PhotonGate";
        case EventKind::SwitchSet: return "SwitchSet";
    }
    return "?";
}

int ProtocolSchedule::pulse_count() const {
    int c = 0;
    for (const auto& e : events)
        if (e.kind == EventKind::PiO || e.kind == EventKind::PiR || e.kind == EventKind::HalfPiR) ++c;
    return c;
}

namespace {

void check_taus(const Time& tau1, const Time& tau2) {
    if (tau1 <= 0 || tau2 <= 0) throw std::invalid_argument("time bins must be positive");
}

struct Builder {
    ProtocolSchedule s;

    explicit Builder(std::string name, int slots, Time tau1, Time tau2, bool emitter = true) {
        s.protocol = std::move(name);
        s.n_slots = slots;
        s.has_emitter = emitter;
        s.tau1 = tau1;
        s.tau2 = tau2;
        s.emission_time.assign(slots, Time(0));
        s.slot_tau1.assign(slots, tau1);
        s.exists.assign(slots, 1);
    }

    Time tau() const { return s.tau1 + s.tau2; }
    int em() const { return s.emitter_index(); }

    void pulse(Time t, EventKind k) { s.events.push_back({t, k, "", {}, ""}); }
    void photon_gate(Time t, const std::string& op, std::vector<int> qs) {
        s.events.push_back({t, EventKind::PhotonGate, op, std::move(qs), ""});
    }
    void switch_set(Time t, const std::string& pos) {
        s.events.push_back({t, EventKind::SwitchSet, "", {}, pos});
    }
    void gate(Gate g, int a, int b = -1) { s.ops.push_back({CircuitOp::Kind::ApplyGate, g, a, b, 0, {}}); }
    void measure_emitter(Time t, std::vector<std::pair<Gate, int>> on_minus) {
        s.events.push_back({t, EventKind::EmitterMeasure, "", {}, ""});
        s.ops.push_back({CircuitOp::Kind::MeasureEmitter, Gate::H, em(), -1, 0, std::move(on_minus)});
    }

    // Four-pulse emission block: CNOT(emitter -> slot) followed by H on the
    // emitter when `trailing_h`, as in the merged four-step sequence.
    void emission_block(int slot, bool trailing_h) {
        Time t = s.emission_time[slot];
        Time t1 = s.slot_tau1[slot];
        pulse(t, EventKind::PiO);
        pulse(t + t1 / 2, EventKind::PiR);
        pulse(t + t1, EventKind::PiO);
        pulse(t + t1 + t1 / 2, trailing_h ? EventKind::HalfPiR : EventKind::PiR);
        gate(Gate::CNOT, em(), slot);
        if (trailing_h) gate(Gate::H, em());
    }

    // H_q then [CNOT, H_q] per slot, then the emitter readout that hands the
    // chain end to the last photon.
    void linear_row(const std::vector<int>& slots) {
        pulse(s.emission_time[slots.front()], EventKind::HalfPiR);
        gate(Gate::H, em());
        for (int k : slots) emission_block(k, true);
        int last = slots.back();
        measure_emitter(s.emission_time[last] + s.slot_tau1[last] + s.tau2, {{Gate::Z, last}});
    }

    // Single |+/-> photon via the interrupted sequence: one emitter readout
    // per photon.
    void interrupt_block(int slot) {
        Time t = s.emission_time[slot];
        Time t1 = s.slot_tau1[slot];
        pulse(t, EventKind::HalfPiR);
        gate(Gate::H, em());
        emission_block(slot, true);
        measure_emitter(t + t1 + s.tau2 / 2, {{Gate::Z, slot}});
    }

    void scatter(int module, int late_q, int early_q, Time t) {
        photon_gate(t, "ScatterCZ", {late_q, early_q});
        s.ops.push_back({CircuitOp::Kind::Scatter, Gate::ScatterCZ, late_q, early_q, module, {}});
        s.scatter_edges.push_back({module, late_q, early_q});
    }

    ProtocolSchedule finish(GraphAdjacency target, std::vector<int> kept) {
        s.target = std::move(target);
        s.kept = std::move(kept);
        std::stable_sort(s.events.begin(), s.events.end(),
                         [](const PulseEvent& a, const PulseEvent& b) { return a.t < b.t; });
        return std::move(s);
    }

    std::vector<int> all_slots() const {
        std::vector<int> v(s.n_slots);
        for (int i = 0; i < s.n_slots; ++i) v[i] = i;
        return v;
    }
};

}  // namespace

ProtocolSchedule compile_linear_cluster(int n, Time tau1, Time tau2) {
    if (n < 1) throw std::invalid_argument("linear cluster needs at least one photon");
    check_taus(tau1, tau2);
    Builder b("linear", n, tau1, tau2);
    for (int k = 0; k < n; ++k) b.s.emission_time[k] = k * b.tau();
    b.linear_row(b.all_slots());
    GraphAdjacency path(n);
    for (int i = 0; i + 1 < n; ++i) path.add_edge(i, i + 1);
    return b.finish(std::move(path), b.all_slots());
}

ProtocolSchedule compile_star(int n, Time tau1, Time tau2) {
    if (n < 1) throw std::invalid_argument("star graph needs at least one photon");
    check_taus(tau1, tau2);
    Builder b("star", n, tau1, tau2);
    for (int k = 0; k < n; ++k) b.s.emission_time[k] = k * b.tau();
    b.pulse(Time(0), EventKind::HalfPiR);
    b.gate(Gate::H, b.em());
    for (int k = 0; k < n; ++k) b.emission_block(k, false);
    for (int k = 0; k < n; ++k) {
        b.photon_gate(b.s.emission_time[k] + tau1, "H", {k});
        b.gate(Gate::H, k);
    }
    GraphAdjacency star(n + 1);
    for (int k = 0; k < n; ++k) star.add_edge(k, n);
    std::vector<int> kept = b.all_slots();
    kept.push_back(b.em());  // the emitter is the star center
    return b.finish(std::move(star), std::move(kept));
}

ProtocolSchedule compile_plus_stream(int n, PlusMethod method, Time tau1, Time tau2) {
    if (n < 1) throw std::invalid_argument("plus stream needs at least one photon");
    check_taus(tau1, tau2);
    switch (method) {
        case PlusMethod::Interrupt: {
            Builder b("plus_interrupt", n, tau1, tau2);
            for (int k = 0; k < n; ++k) b.s.emission_time[k] = k * b.tau();
            for (int k = 0; k < n; ++k) b.interrupt_block(k);
            return b.finish(GraphAdjacency(n), b.all_slots());
        }
        case PlusMethod::StarThenMeasure: {
            ProtocolSchedule s = compile_star(n, tau1, tau2);
            s.protocol = "plus_star";
            std::vector<std::pair<Gate, int>> corr;
            for (int k = 0; k < n; ++k) corr.push_back({Gate::Z, k});
            s.events.push_back({(n - 1) * (tau1 + tau2) + tau1 + tau2, EventKind::EmitterMeasure, "", {}, ""});
            s.ops.push_back({CircuitOp::Kind::MeasureEmitter, Gate::H, s.emitter_index(), -1, 0, std::move(corr)});
            s.kept.clear();
            for (int k = 0; k < n; ++k) s.kept.push_back(k);
            s.target = GraphAdjacency(n);
            std::stable_sort(s.events.begin(), s.events.end(),
                             [](const PulseEvent& a, const PulseEvent& b) { return a.t < b.t; });
            return s;
        }
        case PlusMethod::TwoLevelMzi: {
            Builder b("plus_mzi", n, tau1, tau2, /*emitter=*/false);
            for (int k = 0; k < n; ++k) {
                Time t = k * b.tau();
                b.s.emission_time[k] = t;
                b.pulse(t, EventKind::PiO);
                b.switch_set(t + tau1, "pi");  // close the MZI cycle for this qubit
                b.gate(Gate::H, k);
            }
            return b.finish(GraphAdjacency(n), b.all_slots());
        }
    }
    throw std::invalid_argument("unknown plus-state method");
}

namespace {

struct LatticeIndex {
    std::vector<int> dims;
    std::vector<long long> prefix;  // prefix[m] = prod_{i<m} dims[i]

    explicit LatticeIndex(const std::vector<int>& d) : dims(d) {
        prefix.assign(d.size() + 1, 1);
        for (size_t i = 0; i < d.size(); ++i) prefix[i + 1] = prefix[i] * d[i];
    }
    long long size() const { return prefix.back(); }
    int coord(long long j, size_t m) const { return static_cast<int>((j / prefix[m]) % dims[m]); }
};

// Shared lattice compiler: emission rows along dimension 0, one delay-line
// module per extra dimension. `exists` marks occupied slots; rows that are
// not fully occupied are generated as interrupted |+> sequences.
ProtocolSchedule compile_lattice(const std::string& name, const std::vector<int>& dims, Time tau1,
                                 Time tau2, const std::vector<uint8_t>& exists, bool triangular) {
    LatticeIndex ix(dims);
    const int n = static_cast<int>(ix.size());
    const size_t d = dims.size();
    Builder b(name, n, tau1, tau2);
    b.s.exists = exists;
    for (int j = 0; j < n; ++j) b.s.emission_time[j] = j * b.tau();
    for (size_t m = 1; m < d; ++m) b.s.delays.push_back(ix.prefix[m] * b.tau() + tau1);

    // Emission, row by row.
    const int row_len = dims[0];
    for (int row = 0; row * row_len < n; ++row) {
        std::vector<int> occupied;
        for (int x = 0; x < row_len; ++x)
            if (exists[row * row_len + x]) occupied.push_back(row * row_len + x);
        if (occupied.empty()) continue;
        if (static_cast<int>(occupied.size()) == row_len)
            b.linear_row(occupied);
        else
            for (int slot : occupied) b.interrupt_block(slot);
    }

    // Scattering gates per module; module m couples dimension m.
    for (size_t m = 1; m < d; ++m) {
        Time offset(0);
        for (size_t i = 1; i < m; ++i) offset += b.s.delays[i - 1];
        long long step = ix.prefix[m];
        for (int j = 0; j < n; ++j) {
            if (ix.coord(j, m) >= dims[m] - 1) continue;
            int j2 = static_cast<int>(j + step);
            if (!exists[j] || !exists[j2]) continue;
            // fresh j2 contributes its late bin, delayed j its early bin
            b.scatter(static_cast<int>(m), j2, j, b.s.emission_time[j2] + tau1 + offset);
        }
    }
    if (triangular) {
        // tau1 == tau2 also brings each delayed late bin onto the early bin
        // of the photon Lx+1 slots later; the diagonal runs through the whole
        // stream, shearing across row ends.
        for (int j = 0; j + dims[0] + 1 < n; ++j) {
            int j2 = j + dims[0] + 1;
            if (!exists[j] || !exists[j2]) continue;
            // delayed j contributes its late bin, fresh j2 its early bin
            b.scatter(1, j, j2, b.s.emission_time[j2]);
        }
    }

    // Target: induced lattice graph on occupied slots, labels compacted in
    // emission order.
    std::vector<int> kept;
    std::vector<int> label(n, -1);
    for (int j = 0; j < n; ++j)
        if (exists[j]) {
            label[j] = static_cast<int>(kept.size());
            kept.push_back(j);
        }
    GraphAdjacency target(static_cast<int>(kept.size()));
    for (int j = 0; j < n; ++j) {
        if (!exists[j]) continue;
        for (size_t m = 0; m < d; ++m) {
            if (ix.coord(j, m) >= dims[m] - 1) continue;
            int j2 = static_cast<int>(j + ix.prefix[m]);
            if (exists[j2]) target.add_edge(label[j], label[j2]);
        }
        if (triangular && j + dims[0] + 1 < n) {
            int j2 = j + dims[0] + 1;
            if (exists[j2]) target.add_edge(label[j], label[j2]);
        }
    }
    return b.finish(std::move(target), std::move(kept));
}

}  // namespace

namespace {

// Middle dimensions get one ghost row of idle slots so that a module's
// stride never carries a delayed photon across a higher-dimensional
// boundary into a fresh one. Without the idle row the gapless stream
// collides plane ends with the next plane's start.
std::vector<int> padded_dims(const std::vector<int>& dims) {
    std::vector<int> v = dims;
    for (size_t m = 1; m + 1 < v.size(); ++m) v[m] += 1;
    return v;
}

std::vector<uint8_t> real_slots(const std::vector<int>& dims, const std::vector<int>& vdims) {
    LatticeIndex ix(vdims);
    std::vector<uint8_t> exists(static_cast<size_t>(ix.size()), 1);
    for (long long j = 0; j < ix.size(); ++j)
        for (size_t m = 0; m < dims.size(); ++m)
            if (ix.coord(j, m) >= dims[m]) exists[j] = 0;
    return exists;
}

}  // namespace

ProtocolSchedule compile_cluster_nd(const std::vector<int>& dims, Time tau1, Time tau2) {
    if (dims.empty()) throw std::invalid_argument("cluster needs at least one dimension");
    for (int l : dims)
        if (l < 2) throw std::invalid_argument("cluster extent must be at least 2");
    check_taus(tau1, tau2);
    bool triangular = false;
    if (tau1 > tau2) throw std::invalid_argument("scheduling error: tau1 >= tau2 makes time bins collide");
    if (tau1 == tau2) {
        if (dims.size() != 2)
            throw std::invalid_argument("scheduling error: tau1 == tau2 is only admissible for the 2d triangular lattice");
        triangular = true;
    }
    std::vector<int> vdims = padded_dims(dims);
    return compile_lattice(triangular ? "triangular" : "cluster", vdims, tau1, tau2,
                           real_slots(dims, vdims), triangular);
}

ProtocolSchedule compile_rhg(int l, RhgMode mode, Time tau1, Time tau2) {
    if (l < 2) throw std::invalid_argument("RHG block size must be at least 2");
    check_taus(tau1, tau2);
    if (tau1 >= tau2) throw std::invalid_argument("scheduling error: tau1 >= tau2 makes time bins collide");
    const int side = 2 * l - 1;
    std::vector<int> dims{side, side, side};
    std::vector<int> vdims = padded_dims(dims);
    LatticeIndex ix(vdims);
    const int n = static_cast<int>(ix.size());
    std::vector<uint8_t> real = real_slots(dims, vdims);

    auto odd_count = [&](int j) {
        return (ix.coord(j, 0) & 1) + (ix.coord(j, 1) & 1) + (ix.coord(j, 2) & 1);
    };
    auto is_rhg = [&](int j) {
        if (!real[j]) return false;
        int c = odd_count(j);
        return c == 1 || c == 2;
    };

    if (mode == RhgMode::Direct) {
        std::vector<uint8_t> exists(n, 0);
        for (int j = 0; j < n; ++j) exists[j] = is_rhg(j) ? 1 : 0;
        return compile_lattice("rhg_direct", vdims, tau1, tau2, exists, false);
    }

    // Carve: emit the full cubic cluster, then measure out cell centers and
    // corners of the doubled unit cell in the Z basis.
    ProtocolSchedule s = compile_lattice("rhg_carve", vdims, tau1, tau2, real, false);

    Time detector_time = (n - 1) * (tau1 + tau2) + tau1;
    for (const Time& dmod : s.delays) detector_time += dmod;
    std::vector<int> kept;
    std::vector<int> label(n, -1);
    for (int j = 0; j < n; ++j)
        if (is_rhg(j)) {
            label[j] = static_cast<int>(kept.size());
            kept.push_back(j);
        }
    for (int j = 0; j < n; ++j) {
        if (!real[j] || is_rhg(j)) continue;
        std::vector<std::pair<Gate, int>> corr;
        for (size_t m = 0; m < 3; ++m) {
            int c = ix.coord(j, m);
            if (c > 0 && is_rhg(static_cast<int>(j - ix.prefix[m])))
                corr.push_back({Gate::Z, static_cast<int>(j - ix.prefix[m])});
            if (c < dims[m] - 1 && is_rhg(static_cast<int>(j + ix.prefix[m])))
                corr.push_back({Gate::Z, static_cast<int>(j + ix.prefix[m])});
        }
        s.events.push_back({detector_time, EventKind::PhotonGate, "MZ", {j}, ""});
        s.ops.push_back({CircuitOp::Kind::MeasurePhotonZ, Gate::H, j, -1, 0, std::move(corr)});
        detector_time += tau1 / 4;
    }

    GraphAdjacency target(static_cast<int>(kept.size()));
    for (int j = 0; j < n; ++j) {
        if (!is_rhg(j)) continue;
        for (size_t m = 0; m < 3; ++m) {
            if (ix.coord(j, m) >= dims[m] - 1) continue;
            int j2 = static_cast<int>(j + ix.prefix[m]);
            if (is_rhg(j2)) target.add_edge(label[j], label[j2]);
        }
    }
    s.target = std::move(target);
    s.kept = std::move(kept);
    std::stable_sort(s.events.begin(), s.events.end(),
                     [](const PulseEvent& a, const PulseEvent& b) { return a.t < b.t; });
    return s;
}

ProtocolSchedule compile_repeater(int n_half, Time tau1, Time tau2) {
    if (n_half < 2) throw std::invalid_argument("repeater needs at least two outer qubits");
    check_taus(tau1, tau2);
    if (tau1 >= tau2) throw std::invalid_argument("scheduling error: tau1 >= tau2 makes time bins collide");
    const int n = 2 * n_half;
    Builder b("repeater", n, tau1, tau2);
    for (int k = 0; k < n; ++k) b.s.emission_time[k] = k * b.tau();
    b.s.delays.push_back(n_half * b.tau() + tau1);

    // Outer qubits: star graph, then emitter readout -> |+/-> products.
    b.switch_set(Time(0), "outer");
    b.pulse(Time(0), EventKind::HalfPiR);
    b.gate(Gate::H, b.em());
    std::vector<std::pair<Gate, int>> outer_corr;
    for (int k = 0; k < n_half; ++k) {
        b.emission_block(k, false);
        outer_corr.push_back({Gate::Z, k});
    }
    for (int k = 0; k < n_half; ++k) {
        b.photon_gate(b.s.emission_time[k] + tau1, "H", {k});
        b.gate(Gate::H, k);
    }
    b.measure_emitter(b.s.emission_time[n_half - 1] + tau1 + tau2 / 2, std::move(outer_corr));

    // Inner qubits: star graph, local complementation at the emitter, then a
    // Z readout of the emitter leaves the all-to-all block.
    b.switch_set(n_half * b.tau(), "lc_gate");
    b.pulse(b.s.emission_time[n_half], EventKind::HalfPiR);
    b.gate(Gate::H, b.em());
    std::vector<std::pair<Gate, int>> inner_corr;
    for (int k = n_half; k < n; ++k) {
        b.emission_block(k, false);
        inner_corr.push_back({Gate::Z, k});
    }
    for (int k = n_half; k < n; ++k) {
        b.photon_gate(b.s.emission_time[k] + tau1, "H", {k});
        b.gate(Gate::H, k);
    }
    for (int k = n_half; k < n; ++k) {
        b.photon_gate(b.s.emission_time[k] + tau1, "SqrtIZ", {k});
        b.gate(Gate::SqrtIZ, k);
    }
    b.pulse(b.s.emission_time[n - 1] + tau1 + tau2 / 4, EventKind::HalfPiR);
    b.gate(Gate::SqrtIXd, b.em());
    b.measure_emitter(b.s.emission_time[n - 1] + tau1 + tau2 / 2, std::move(inner_corr));

    // Stitch: delayed outer k meets fresh inner n_half + k.
    for (int k = 0; k < n_half; ++k)
        b.scatter(1, n_half + k, k, b.s.emission_time[n_half + k] + tau1);

    GraphAdjacency target(n);
    for (int a = n_half; a < n; ++a)
        for (int c = a + 1; c < n; ++c) target.add_edge(a, c);
    for (int k = 0; k < n_half; ++k) target.add_edge(k, n_half + k);
    return b.finish(std::move(target), b.all_slots());
}

TreeTiming tree_timing(int depth, Time tau1_0) {
    if (depth < 1) throw std::invalid_argument("tree depth must be at least 1");
    if (tau1_0 <= 0) throw std::invalid_argument("tau1_0 must be positive");
    TreeTiming tt;
    tt.tau1_0 = tau1_0;
    tt.delta = ((1LL << depth) + 1) * tau1_0;
    for (int layer = 0; layer < depth; ++layer) {
        long long sgn = (layer % 2 == 0) ? 1 : -1;
        tt.tau1.push_back(tau1_0 / 3 * ((1LL << (layer + 1)) + sgn));
        tt.tau2.push_back(tau1_0 / 3 * ((1LL << (layer + 2)) - sgn));
        tt.t_init.push_back(layer * tt.delta +
                            tau1_0 / 6 * (4 * ((1LL << layer) - 1) + 1 - sgn));
    }
    return tt;
}

std::pair<ProtocolSchedule, TreeTiming> compile_tree(int depth, Time tau1_0) {
    const int n = (1 << depth) - 1;
    TreeTiming tt = tree_timing(depth, tau1_0);

    Builder b("tree", n, tau1_0, tau1_0);
    b.s.delays.push_back(tt.delta);
    std::vector<int> layer_offset(depth + 1, 0);
    for (int layer = 0; layer < depth; ++layer)
        layer_offset[layer + 1] = layer_offset[layer] + (1 << (depth - 1 - layer));
    for (int layer = 0; layer < depth; ++layer) {
        int count = 1 << (depth - 1 - layer);
        for (int k = 0; k < count; ++k) {
            int slot = layer_offset[layer] + k;
            b.s.emission_time[slot] = tt.t_init[layer] + k * (tt.tau1[layer] + tt.tau2[layer]);
            b.s.slot_tau1[slot] = tt.tau1[layer];
        }
    }
    // Emission order is by slot index (layers are emitted bottom-up).
    for (int slot = 0; slot < n; ++slot) b.interrupt_block(slot);

    GraphAdjacency target(n);
    for (int layer = 0; layer + 1 < depth; ++layer) {
        int parents = 1 << (depth - 2 - layer);
        for (int k = 0; k < parents; ++k) {
            int parent = layer_offset[layer + 1] + k;
            int c0 = layer_offset[layer] + 2 * k;
            int c1 = c0 + 1;
            // late bin of the first child meets the parent's early bin, and
            // the parent's late bin meets the second child's early bin
            b.scatter(1, c0, parent, b.s.emission_time[parent]);
            b.scatter(1, parent, c1, b.s.emission_time[parent] + b.s.slot_tau1[parent]);
            target.add_edge(parent, c0);
            target.add_edge(parent, c1);
        }
    }
    ProtocolSchedule sched = b.finish(std::move(target), b.all_slots());
    return {std::move(sched), std::move(tt)};
}

CollisionReport verify_collisions(const ProtocolSchedule& s) {
    CollisionReport report;
    struct Pass {
        Time t;
        int slot;
        bool late;
    };
    std::vector<std::pair<std::pair<int, int>, int>> intended;  // ((late, early), seen count)
    for (const auto& e : s.scatter_edges) intended.push_back({{e.late_q, e.early_q}, 0});

    bool ok = true;
    Time offset(0);
    for (size_t m = 0; m < s.delays.size(); ++m) {
        std::vector<Pass> passes;
        for (int j = 0; j < s.n_slots; ++j) {
            if (!s.exists[j]) continue;
            for (int delayed = 0; delayed <= 1; ++delayed) {
                Time base = s.emission_time[j] + offset + (delayed ? s.delays[m] : Time(0));
                passes.push_back({base, j, false});
                passes.push_back({base + s.slot_tau1[j], j, true});
            }
        }
        std::sort(passes.begin(), passes.end(), [](const Pass& a, const Pass& b) {
            return a.t < b.t || (a.t == b.t && a.slot < b.slot);
        });
        size_t i = 0;
        while (i < passes.size()) {
            size_t jx = i;
            while (jx + 1 < passes.size() && passes[jx + 1].t == passes[i].t) ++jx;
            size_t count = jx - i + 1;
            if (count >= 2) {
                CollisionReport::Overlap ov;
                ov.module = static_cast<int>(m + 1);
                ov.t = passes[i].t;
                ov.late_q = ov.early_q = -1;
                for (size_t k = i; k <= jx; ++k) ov.involved.push_back(passes[k].slot);
                ov.intended = false;
                if (count == 2 && passes[i].late != passes[jx].late && passes[i].slot != passes[jx].slot) {
                    const Pass& late = passes[i].late ? passes[i] : passes[jx];
                    const Pass& early = passes[i].late ? passes[jx] : passes[i];
                    ov.late_q = late.slot;
                    ov.early_q = early.slot;
                    for (auto& [edge, seen] : intended) {
                        if (edge.first == ov.late_q && edge.second == ov.early_q) {
                            ++seen;
                            ov.intended = (seen == 1);
                            break;
                        }
                    }
                }
                if (!ov.intended) ok = false;
                report.overlaps.push_back(std::move(ov));
            }
            i = jx + 1;
        }
        offset += s.delays[m];
    }
    for (const auto& [edge, seen] : intended) {
        if (seen != 1) {
            ok = false;
            report.message += "edge (" + std::to_string(edge.first) + "," + std::to_string(edge.second) +
                              ") matched " + std::to_string(seen) + " overlaps; ";
        }
    }
    for (const auto& ov : report.overlaps)
        if (!ov.intended) {
            report.message += "unintended overlap at module " + std::to_string(ov.module) + "; ";
            break;
        }
    report.passed = ok;
    return report;
}

StabilizerState run_schedule(const ProtocolSchedule& s, uint64_t seed) {
    Rng rng(splitmix64(seed ^ 0xa5a5a5a5deadbeefULL));
    const int nq = s.circuit_qubits();
    StabilizerState state(std::max(nq, 1));
    for (const auto& op : s.ops) {
        switch (op.kind) {
            case CircuitOp::Kind::ApplyGate:
                if (op.b < 0)
                    state.apply(op.gate, op.a);
                else
                    state.apply(op.gate, op.a, op.b);
                break;
            case CircuitOp::Kind::Scatter:
                state.apply(Gate::ScatterCZ, op.a, op.b);
                state.apply(Gate::Z, op.b);  // known byproduct on the early-bin qubit
                break;
            case CircuitOp::Kind::MeasureEmitter:
            case CircuitOp::Kind::MeasurePhotonZ: {
                int outcome = state.measure(Pauli::Z, op.a, rng);
                if (outcome == -1) {
                    for (auto [g, q] : op.on_minus) state.apply(g, q);
                    state.apply(Gate::X, op.a);  // reset to |0>
                }
                break;
            }
        }
    }
    if (s.kept.empty()) return StabilizerState(1);
    return state.restricted_to(s.kept);
}

bool verify_protocol(const ProtocolSchedule& s, uint64_t seed) {
    if (s.kept.empty()) return s.target.n == 0;
    StabilizerState out = run_schedule(s, seed);
    if (out.num_qubits() != s.target.n) return false;
    return out.same_state(graph_state_of(s.target));
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json time_json(const Time& t) {
    return nlohmann::json{t.numerator(), t.denominator()};
}

Time time_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Time(j.get<long long>());
    return Time(j.at(0).get<long long>(), j.at(1).get<long long>());
}

Gate gate_from_name(const std::string& name) {
    for (Gate g : {Gate::H, Gate::X, Gate::Y, Gate::Z, Gate::S, Gate::SqrtIX, Gate::SqrtIXd,
                   Gate::SqrtIZ, Gate::SqrtIZd, Gate::CZ, Gate::CNOT, Gate::ScatterCZ})
        if (name == gate_name(g)) return g;
    throw std::invalid_argument("unknown gate name: " + name);
}

}  // namespace

std::string ProtocolSchedule::to_json() const {
    nlohmann::json j;
    j["protocol"] = protocol;
    j["n_slots"] = n_slots;
    j["has_emitter"] = has_emitter;
    j["tau1"] = time_json(tau1);
    j["tau2"] = time_json(tau2);
    j["delays"] = nlohmann::json::array();
    for (const auto& d : delays) j["delays"].push_back(time_json(d));
    j["delays_ns"] = nlohmann::json::array();
    for (const auto& d : delays) j["delays_ns"].push_back(to_ns(d));
    j["emission_time"] = nlohmann::json::array();
    for (const auto& t : emission_time) j["emission_time"].push_back(time_json(t));
    j["slot_tau1"] = nlohmann::json::array();
    for (const auto& t : slot_tau1) j["slot_tau1"].push_back(time_json(t));
    j["exists"] = exists;
    j["events"] = nlohmann::json::array();
    for (const auto& e : events) {
        nlohmann::json ev;
        ev["t_ns"] = to_ns(e.t);
        ev["t"] = time_json(e.t);
        ev["kind"] = event_kind_name(e.kind);
        if (!e.op.empty()) ev["op"] = e.op;
        if (!e.qubits.empty()) ev["qubits"] = e.qubits;
        if (!e.position.empty()) ev["position"] = e.position;
        j["events"].push_back(std::move(ev));
    }
    j["ops"] = nlohmann::json::array();
    for (const auto& op : ops) {
        nlohmann::json o;
        switch (op.kind) {
            case CircuitOp::Kind::ApplyGate: o["kind"] = "gate"; break;
            case CircuitOp::Kind::MeasureEmitter: o["kind"] = "measure_emitter"; break;
            case CircuitOp::Kind::MeasurePhotonZ: o["kind"] = "measure_photon_z"; break;
            case CircuitOp::Kind::Scatter: o["kind"] = "scatter"; break;
        }
        o["gate"] = gate_name(op.gate);
        o["a"] = op.a;
        o["b"] = op.b;
        o["module"] = op.module;
        o["on_minus"] = nlohmann::json::array();
        for (auto [g, q] : op.on_minus) o["on_minus"].push_back({gate_name(g), q});
        j["ops"].push_back(std::move(o));
    }
    j["kept"] = kept;
    j["target"] = nlohmann::json::parse(target.to_json());
    j["scatter_edges"] = nlohmann::json::array();
    for (const auto& e : scatter_edges) j["scatter_edges"].push_back({e.module, e.late_q, e.early_q});
    return j.dump(2);
}

ProtocolSchedule ProtocolSchedule::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ProtocolSchedule s;
    s.protocol = j.at("protocol").get<std::string>();
    s.n_slots = j.at("n_slots").get<int>();
    s.has_emitter = j.at("has_emitter").get<bool>();
    s.tau1 = time_from_json(j.at("tau1"));
    s.tau2 = time_from_json(j.at("tau2"));
    for (const auto& d : j.at("delays")) s.delays.push_back(time_from_json(d));
    for (const auto& t : j.at("emission_time")) s.emission_time.push_back(time_from_json(t));
    for (const auto& t : j.at("slot_tau1")) s.slot_tau1.push_back(time_from_json(t));
    s.exists = j.at("exists").get<std::vector<uint8_t>>();
    for (const auto& ev : j.at("events")) {
        PulseEvent e;
        e.t = time_from_json(ev.at("t"));
        std::string kind = ev.at("kind").get<std::string>();
        bool found = false;
        for (EventKind k : {EventKind::PiO, EventKind::PiR, EventKind::HalfPiR,
                            EventKind::EmitterMeasure, EventKind::PhotonGate, EventKind::SwitchSet})
            if (kind == event_kind_name(k)) {
                e.kind = k;
                found = true;
            }
        if (!found) throw std::invalid_argument("unknown event kind: " + kind);
        if (ev.contains("op")) e.op = ev.at("op").get<std::string>();
        if (ev.contains("qubits")) e.qubits = ev.at("qubits").get<std::vector<int>>();
        if (ev.contains("position")) e.position = ev.at("position").get<std::string>();
        s.events.push_back(std::move(e));
    }
    for (const auto& o : j.at("ops")) {
        CircuitOp op;
        std::string kind = o.at("kind").get<std::string>();
        if (kind == "gate")
            op.kind = CircuitOp::Kind::ApplyGate;
        else if (kind == "measure_emitter")
            op.kind = CircuitOp::Kind::MeasureEmitter;
        else if (kind == "measure_photon_z")
            op.kind = CircuitOp::Kind::MeasurePhotonZ;
        else if (kind == "scatter")
            op.kind = CircuitOp::Kind::Scatter;
        else
            throw std::invalid_argument("unknown op kind: " + kind);
        op.gate = gate_from_name(o.at("gate").get<std::string>());
        op.a = o.at("a").get<int>();
        op.b = o.at("b").get<int>();
        op.module = o.at("module").get<int>();
        for (const auto& c : o.at("on_minus"))
            op.on_minus.push_back({gate_from_name(c.at(0).get<std::string>()), c.at(1).get<int>()});
        s.ops.push_back(std::move(op));
    }
    s.kept = j.at("kept").get<std::vector<int>>();
    s.target = GraphAdjacency::from_json(j.at("target").dump());
    for (const auto& e : j.at("scatter_edges"))
        s.scatter_edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>()});
    return s;
}

}  // namespace forge
