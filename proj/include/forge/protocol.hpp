#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "forge/stabilizer.hpp"

namespace forge {

// Exact event times. The unit is tau1 for lattice protocols and tau1^(0) for
// trees; conversion to nanoseconds happens only at serialization.
using Time = boost::rational<long long>;

double to_ns(const Time& t);

enum class EventKind : uint8_t { PiO, PiR, HalfPiR, EmitterMeasure, PhotonGate, SwitchSet };

const char* event_kind_name(EventKind k);

struct PulseEvent {
    Time t;
    EventKind kind;
    std::string op;          // PhotonGate: gate name ("H", "SqrtIZ", "ScatterCZ", "MZ")
    std::vector<int> qubits; // PhotonGate targets (emission-order slots)
    std::string position;    // SwitchSet position label
};

// One step of the effective Clifford circuit a schedule compiles to.
struct CircuitOp {
    enum class Kind : uint8_t { ApplyGate, MeasureEmitter, MeasurePhotonZ, Scatter };
    Kind kind;
    Gate gate = Gate::H;  // ApplyGate
    int a = -1, b = -1;   // targets; Scatter: a = late-bin qubit (L), b = early-bin qubit (R)
    int module = 0;       // Scatter: which delay-line module produced it
    // Pauli byproducts applied when a measurement returns -1.
    std::vector<std::pair<Gate, int>> on_minus;
};

struct TreeTiming {
    Time tau1_0;
    Time delta;                       // delay-line duration
    std::vector<Time> tau1, tau2;     // per layer
    std::vector<Time> t_init;        // emission time of each layer's first qubit
};

struct ProtocolSchedule {
    std::string protocol;
    int n_slots = 0;        // photon emission slots (some may be empty)
    bool has_emitter = true;
    Time tau1{1}, tau2{2};
    std::vector<Time> delays;         // per passive module, in emission order
    std::vector<Time> emission_time;  // early-bin time per slot
    std::vector<Time> slot_tau1;      // early/late separation per slot
    std::vector<uint8_t> exists;      // slot occupied by a photon
    std::vector<PulseEvent> events;
    std::vector<CircuitOp> ops;
    std::vector<int> kept;            // circuit qubits forming the target, ascending
    GraphAdjacency target;            // on kept labels (position in `kept`)

    struct IntendedEdge {
        int module;
        int late_q, early_q;  // emission slots
    };
    std::vector<IntendedEdge> scatter_edges;

    int emitter_index() const { return n_slots; }
    int circuit_qubits() const { return n_slots + (has_emitter ? 1 : 0); }
    int pulse_count() const;

    std::string to_json() const;
    static ProtocolSchedule from_json(const std::string& text);
};

ProtocolSchedule compile_linear_cluster(int n, Time tau1, Time tau2);
ProtocolSchedule compile_star(int n, Time tau1, Time tau2);

enum class PlusMethod : uint8_t { Interrupt, StarThenMeasure, TwoLevelMzi };
ProtocolSchedule compile_plus_stream(int n, PlusMethod method, Time tau1, Time tau2);

ProtocolSchedule compile_cluster_nd(const std::vector<int>& dims, Time tau1, Time tau2);

enum class RhgMode : uint8_t { Direct, Carve };
ProtocolSchedule compile_rhg(int l, RhgMode mode, Time tau1, Time tau2);

// 2N qubits total: N outer leaves, N all-to-all inner qubits.
ProtocolSchedule compile_repeater(int n_half, Time tau1, Time tau2);

// Per-layer time bins and start times for the binary-tree protocol.
TreeTiming tree_timing(int depth, Time tau1_0);

std::pair<ProtocolSchedule, TreeTiming> compile_tree(int depth, Time tau1_0);

struct CollisionReport {
    struct Overlap {
        int module;
        Time t;
        int late_q, early_q;  // emission slots; -1 when the overlap is not (late, early)
        std::vector<int> involved;
        bool intended;
    };
    bool passed = false;
    std::vector<Overlap> overlaps;
    std::string message;
};

// Recompute every bin arrival time at every scattering block and check the
// overlap pattern matches the schedule's intended edges exactly.
CollisionReport verify_collisions(const ProtocolSchedule& s);

// Simulate the effective circuit with outcome byproducts applied; true iff the
// final state equals the target graph state exactly.
bool verify_protocol(const ProtocolSchedule& s, uint64_t seed);

// Runs the schedule and returns the final corrected state restricted to the
// target qubits (exposed for tests that inspect intermediate targets).
StabilizerState run_schedule(const ProtocolSchedule& s, uint64_t seed);

}  // namespace forge
