#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "forge/error_model.hpp"
#include "forge/matching.hpp"
#include "forge/rhg.hpp"
#include "forge/rng.hpp"

namespace forge {

enum class TrialOutcome : uint8_t { Success, LogicalFailure, PercolationFailure };

struct TrialBreakdown {
    bool percolated = false;
    bool logical = false;
    bool failed() const { return percolated || logical; }
};

struct DecodeOutcome {
    TrialOutcome outcome = TrialOutcome::Success;
    TrialBreakdown primal, dual;
};

// Decoder for one sublattice with reusable buffers. A trial runs:
// sample loss -> merge superchecks -> sample flips -> defects -> distances
// (closed-form taxicab when nothing is lost, Dijkstra otherwise) -> exact
// MWPM -> homology of error + recovery on the 3-torus.
class SublatticeDecoder {
  public:
    explicit SublatticeDecoder(const SyndromeGraph& g, const EffectiveRates& rates);

    TrialBreakdown run(double p_loss, Rng& rng);

    // Stage-level entry points used by tests and by run().
    void sample_loss(double p_loss, Rng& rng);
    void set_loss(const std::vector<uint8_t>& lost);
    bool merge();  // false when a lost cluster wraps (decoding fails)
    void sample_flips(Rng& rng);
    void set_flips(const std::vector<uint8_t>& flips);
    void compute_defects();
    void compute_distances();
    // Matches defects and folds recovery paths into the winding parities;
    // returns true on logical failure.
    bool match_and_classify();

    // Inspection for tests and the matching oracle.
    const std::vector<uint8_t>& lost() const { return lost_; }
    const std::vector<uint8_t>& flips() const { return flip_; }
    const MergedGraph& merged() const { return merged_; }
    const std::vector<int>& defects() const { return defect_supers_; }
    const std::vector<long long>& cost_matrix() const { return cost_; }
    long long matching_cost() const { return matching_cost_; }
    std::array<int, 3> winding() const { return winding_; }

    // Test hooks: force the Dijkstra path even without losses, cross-check
    // each matching against brute force (defect count <= limit), and record
    // the combined chain as an edge bitmap.
    void force_dijkstra(bool on) { force_dijkstra_ = on; }
    void enable_matching_oracle(bool on) { oracle_ = on; }
    void collect_chain(bool on) { collect_chain_ = on; }
    const std::vector<uint8_t>& chain() const { return chain_; }

    static constexpr long long kCostScale = 1 << 20;

  private:
    void dijkstra_from(int source_idx);
    void add_path_winding(int from_idx, int to_idx);
    void toggle_vertex_parity(int v);
    void add_closure_winding();

    const SyndromeGraph& g_;
    EffectiveRates rates_;
    MergedGraph identity_merge_;  // reused whenever no edge is lost

    std::vector<uint8_t> lost_, flip_;
    bool any_lost_ = false;
    MergedGraph merged_;
    std::vector<double> edge_weight_;
    std::vector<int8_t> parity_;
    std::vector<int> defect_supers_, defect_reps_;
    std::vector<int> is_defect_rep_;
    std::vector<long long> cost_;
    std::vector<double> dist_;
    std::vector<int> pred_;  // per-source predecessor edge rows
    std::vector<int> heap_;
    std::vector<double> dist_buf_;
    std::vector<int> pred_buf_;
    std::vector<uint32_t> visit_stamp_;
    uint32_t stamp_ = 0;
    std::vector<uint8_t> settled_mask_;
    uint8_t settled_epoch_ = 0;
    std::vector<uint32_t> vparity_stamp_;
    std::vector<uint8_t> vparity_;
    std::vector<int> vtouched_;
    uint32_t vparity_epoch_ = 0;
    MwpmSolver solver_;
    MatchResult match_;
    long long matching_cost_ = 0;
    std::array<int, 3> winding_{0, 0, 0};
    bool force_dijkstra_ = false, oracle_ = false, collect_chain_ = false;
    bool used_dijkstra_ = false;
    std::vector<uint8_t> chain_;
};

// Full trial over both sublattices; deterministic in (seed).
DecodeOutcome decode_trial(const RHGLattice& lat, const EffectiveRates& rates, double p_loss,
                           uint64_t seed, bool matching_oracle = false);

// Convenience wrapper holding decoders for both sublattices.
class TrialEngine {
  public:
    TrialEngine(int l, const EffectiveRates& rates)
        : lat_(build_rhg(l)), primal_(lat_.primal, rates), dual_(lat_.dual, rates) {}

    DecodeOutcome run(double p_loss, uint64_t seed, bool oracle = false);

    SublatticeDecoder& primal() { return primal_; }
    SublatticeDecoder& dual() { return dual_; }

  private:
    RHGLattice lat_;
    SublatticeDecoder primal_, dual_;
};

}  // namespace forge
