#include "forge/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forge {

SublatticeDecoder::SublatticeDecoder(const SyndromeGraph& g, const EffectiveRates& rates)
    : g_(g), rates_(rates) {
    std::vector<uint8_t> none(g.edges.size(), 0);
    identity_merge_ = merge_superchecks(g, none, rates);
    lost_.assign(g.edges.size(), 0);
    flip_.assign(g.edges.size(), 0);
    edge_weight_.assign(g.edges.size(), 0.0);
    visit_stamp_.assign(g.n_vertices, 0);
    dist_buf_.assign(g.n_vertices, 0.0);
    pred_buf_.assign(g.n_vertices, -1);
}

void SublatticeDecoder::sample_loss(double p_loss, Rng& rng) {
    any_lost_ = false;
    if (p_loss <= 0) {
        std::fill(lost_.begin(), lost_.end(), 0);
        return;
    }
    for (auto& b : lost_) {
        b = rng.bernoulli(p_loss);
        any_lost_ |= b;
    }
}

void SublatticeDecoder::set_loss(const std::vector<uint8_t>& lost) {
    if (lost.size() != lost_.size()) throw std::invalid_argument("loss mask size mismatch");
    lost_ = lost;
    any_lost_ = std::find(lost_.begin(), lost_.end(), uint8_t(1)) != lost_.end();
}

bool SublatticeDecoder::merge() {
    if (!any_lost_) {
        merged_ = identity_merge_;
    } else {
        merged_ = merge_superchecks(g_, lost_, rates_);
        if (merged_.lost_wraps) return false;
    }
    for (size_t id = 0; id < g_.edges.size(); ++id) {
        if (lost_[id])
            edge_weight_[id] = 0.0;
        else
            edge_weight_[id] = merged_.bundles[merged_.bundle_of_edge[id]].weight;
    }
    return true;
}

void SublatticeDecoder::sample_flips(Rng& rng) {
    for (size_t id = 0; id < flip_.size(); ++id)
        flip_[id] = !lost_[id] && rng.bernoulli(rates_.by_direction(g_.edges[id].axis));
    for (const auto& pr : g_.pairs) {
        if (lost_[pr.e1] || lost_[pr.e2]) continue;
        if (rng.bernoulli(g_.pair_rate(pr, rates_))) {
            flip_[pr.e1] ^= 1;
            flip_[pr.e2] ^= 1;
        }
    }
}

void SublatticeDecoder::set_flips(const std::vector<uint8_t>& flips) {
    if (flips.size() != flip_.size()) throw std::invalid_argument("flip mask size mismatch");
    flip_ = flips;
}

void SublatticeDecoder::compute_defects() {
    parity_.assign(merged_.n_super, 0);
    for (size_t id = 0; id < g_.edges.size(); ++id) {
        if (!flip_[id] || lost_[id]) continue;
        parity_[merged_.super_of[g_.edges[id].u]] ^= 1;
        parity_[merged_.super_of[g_.edges[id].v]] ^= 1;
    }
    defect_supers_.clear();
    defect_reps_.clear();
    for (int s = 0; s < merged_.n_super; ++s)
        if (parity_[s]) {
            defect_supers_.push_back(s);
            defect_reps_.push_back(merged_.representative[s]);
        }
    if (defect_supers_.size() % 2 != 0) throw std::logic_error("odd defect count on a torus");
}

void SublatticeDecoder::dijkstra_from(int source_idx) {
    ++stamp_;
    const int source = defect_reps_[source_idx];
    const size_t d = defect_reps_.size();
    heap_.clear();
    dist_buf_[source] = 0.0;
    pred_buf_[source] = -1;
    visit_stamp_[source] = stamp_;
    // stamped lazy-deletion heap over (dist, vertex) packed comparisons
    auto cmp = [&](int a, int b) { return dist_buf_[a] > dist_buf_[b] || (dist_buf_[a] == dist_buf_[b] && a > b); };
    heap_.push_back(source);
    // Only defects with index >= source_idx are required from this tree; the
    // lower triangle comes from earlier rows. Paths to settled targets only
    // traverse settled vertices, so the search stops early.
    size_t need = d - static_cast<size_t>(source_idx);
    size_t found = 0;
    std::vector<uint8_t>& settled = settled_mask_;
    while (!heap_.empty()) {
        std::pop_heap(heap_.begin(), heap_.end(), cmp);
        int v = heap_.back();
        heap_.pop_back();
        if (settled[v] == settled_epoch_) continue;
        settled[v] = settled_epoch_;
        int rep_idx = is_defect_rep_[v] - 1;
        if (rep_idx >= source_idx && ++found == need) break;
        for (int k = g_.adj_offset[v]; k < g_.adj_offset[v + 1]; ++k) {
            auto [u, eid] = g_.adj[k];
            double nd = dist_buf_[v] + edge_weight_[eid];
            if (visit_stamp_[u] != stamp_ || nd < dist_buf_[u]) {
                visit_stamp_[u] = stamp_;
                dist_buf_[u] = nd;
                pred_buf_[u] = eid;
                heap_.push_back(u);
                std::push_heap(heap_.begin(), heap_.end(), cmp);
            }
        }
    }
    // export the upper-triangle row; the mirror happens in compute_distances
    for (size_t j = static_cast<size_t>(source_idx); j < d; ++j)
        dist_[source_idx * d + j] = dist_buf_[defect_reps_[j]];
    std::copy(pred_buf_.begin(), pred_buf_.end(), pred_.begin() + static_cast<size_t>(source_idx) * g_.n_vertices);
}

void SublatticeDecoder::compute_distances() {
    const size_t d = defect_reps_.size();
    dist_.assign(d * d, 0.0);
    cost_.assign(d * d, 0);
    used_dijkstra_ = any_lost_ || force_dijkstra_;
    if (!used_dijkstra_) {
        // Closed form: per-axis weighted taxicab with torus wraparound.
        const int l = g_.l;
        const double w[3] = {edge_weight(rates_.q_x), edge_weight(rates_.q_y), edge_weight(rates_.q_z)};
        for (size_t i = 0; i < d; ++i) {
            auto ci = g_.vertex_coords(defect_reps_[i]);
            for (size_t j = i + 1; j < d; ++j) {
                auto cj = g_.vertex_coords(defect_reps_[j]);
                double total = 0;
                for (int a = 0; a < 3; ++a) {
                    int fwd = ((cj[a] - ci[a]) % l + l) % l;
                    total += std::min(fwd, l - fwd) * w[a];
                }
                dist_[i * d + j] = dist_[j * d + i] = total;
            }
        }
    } else {
        if (is_defect_rep_.size() != static_cast<size_t>(g_.n_vertices))
            is_defect_rep_.assign(g_.n_vertices, 0);
        std::fill(is_defect_rep_.begin(), is_defect_rep_.end(), 0);
        for (size_t i = 0; i < d; ++i) is_defect_rep_[defect_reps_[i]] = static_cast<int>(i + 1);
        pred_.assign(d * static_cast<size_t>(g_.n_vertices), -1);
        if (settled_mask_.size() != static_cast<size_t>(g_.n_vertices)) settled_mask_.assign(g_.n_vertices, 0);
        for (size_t i = 0; i < d; ++i) {
            if (++settled_epoch_ == 0) {
                std::fill(settled_mask_.begin(), settled_mask_.end(), 0);
                settled_epoch_ = 1;
            }
            dijkstra_from(static_cast<int>(i));
        }
        for (size_t i = 0; i < d; ++i)
            for (size_t j = 0; j < i; ++j) dist_[i * d + j] = dist_[j * d + i];
    }
    for (size_t k = 0; k < d * d; ++k) cost_[k] = llround(dist_[k] * static_cast<double>(kCostScale));
}

void SublatticeDecoder::add_path_winding(int from_idx, int to_idx) {
    if (!used_dijkstra_) {
        const int l = g_.l;
        auto ca = g_.vertex_coords(defect_reps_[from_idx]);
        auto cb = g_.vertex_coords(defect_reps_[to_idx]);
        for (int a = 0; a < 3; ++a) {
            int fwd = ((cb[a] - ca[a]) % l + l) % l;
            bool go_forward = fwd <= l - fwd;  // ties break toward +axis
            if (fwd == 0) continue;
            if (go_forward) {
                if (cb[a] < ca[a]) winding_[a] ^= 1;  // crossed the seam upward
            } else {
                if (cb[a] > ca[a]) winding_[a] ^= 1;  // crossed the seam downward
            }
            if (collect_chain_) {
                // materialize the taxicab path for chain inspection
                int steps = go_forward ? fwd : l - fwd;
                int sgn = go_forward ? 1 : -1;
                auto cur = ca;
                for (int t = 0; t < steps; ++t) {
                    auto base = cur;
                    if (sgn < 0) base[a] = (base[a] - 1 + l) % l;
                    chain_[g_.edge_id(g_.vertex_id(base[0], base[1], base[2]), a)] ^= 1;
                    cur[a] = (cur[a] + sgn + l) % l;
                }
            }
            ca[a] = cb[a];
        }
    } else {
        const int* pred_row = pred_.data() + static_cast<size_t>(from_idx) * g_.n_vertices;
        int v = defect_reps_[to_idx];
        const int source = defect_reps_[from_idx];
        while (v != source) {
            int eid = pred_row[v];
            if (eid < 0) throw std::logic_error("broken shortest-path tree");
            const auto& e = g_.edges[eid];
            if (e.wraps) winding_[e.axis] ^= 1;
            if (collect_chain_) chain_[eid] ^= 1;
            v = (e.u == v) ? e.v : e.u;
        }
    }
}

void SublatticeDecoder::toggle_vertex_parity(int v) {
    if (vparity_stamp_[v] != vparity_epoch_) {
        vparity_stamp_[v] = vparity_epoch_;
        vparity_[v] = 0;
        vtouched_.push_back(v);
    }
    vparity_[v] ^= 1;
}

// With losses the chain of flips and recovery paths is a cycle only after
// closing it inside each lost component: every odd-degree vertex connects to
// its component root through lost edges. The union-find offsets give the
// seam-crossing parity of any such connecting path directly.
void SublatticeDecoder::add_closure_winding() {
    const int l = g_.l;
    for (int v : vtouched_) {
        if (!vparity_[v]) continue;
        int rep = merged_.representative[merged_.super_of[v]];
        if (rep == v) continue;
        auto cv = g_.vertex_coords(v);
        auto cr = g_.vertex_coords(rep);
        const auto& off = merged_.offset[v];
        for (int a = 0; a < 3; ++a) {
            int wraps = (-off[a] - (cr[a] - cv[a])) / l;
            if (wraps & 1) winding_[a] ^= 1;
        }
        if (collect_chain_) {
            // materialize a lost-edge path from v to its root (test support)
            std::vector<int> parent_edge(g_.n_vertices, -1), seen(g_.n_vertices, 0);
            std::vector<int> bfs{rep};
            seen[rep] = 1;
            for (size_t head = 0; head < bfs.size(); ++head) {
                int x = bfs[head];
                if (x == v) break;
                for (int k = g_.adj_offset[x]; k < g_.adj_offset[x + 1]; ++k) {
                    auto [u, eid] = g_.adj[k];
                    if (!lost_[eid] || seen[u]) continue;
                    seen[u] = 1;
                    parent_edge[u] = eid;
                    bfs.push_back(u);
                }
            }
            int x = v;
            while (x != rep) {
                int eid = parent_edge[x];
                chain_[eid] ^= 1;
                x = (g_.edges[eid].u == x) ? g_.edges[eid].v : g_.edges[eid].u;
            }
        }
    }
}

bool SublatticeDecoder::match_and_classify() {
    winding_ = {0, 0, 0};
    if (collect_chain_) chain_.assign(g_.edges.size(), 0);
    if (vparity_stamp_.size() != static_cast<size_t>(g_.n_vertices))
        vparity_stamp_.assign(g_.n_vertices, 0);
    if (vparity_.size() != static_cast<size_t>(g_.n_vertices)) vparity_.assign(g_.n_vertices, 0);
    ++vparity_epoch_;
    if (vparity_epoch_ == 0) {
        std::fill(vparity_stamp_.begin(), vparity_stamp_.end(), 0);
        vparity_epoch_ = 1;
    }
    vtouched_.clear();

    for (size_t id = 0; id < g_.edges.size(); ++id)
        if (flip_[id] && !lost_[id]) {
            if (g_.edges[id].wraps) winding_[g_.edges[id].axis] ^= 1;
            if (collect_chain_) chain_[id] ^= 1;
            if (any_lost_) {
                toggle_vertex_parity(g_.edges[id].u);
                toggle_vertex_parity(g_.edges[id].v);
            }
        }
    const int d = static_cast<int>(defect_reps_.size());
    matching_cost_ = 0;
    if (d > 0) {
        match_ = solver_.solve(d, cost_);
        matching_cost_ = match_.total_cost;
        if (oracle_ && d <= 10) {
            long long brute = brute_force_mwpm(d, cost_);
            if (brute != match_.total_cost) throw std::logic_error("matching disagrees with brute force");
        }
        for (int i = 0; i < d; ++i) {
            if (match_.mate[i] > i) {
                add_path_winding(i, match_.mate[i]);
                if (any_lost_) {
                    toggle_vertex_parity(defect_reps_[i]);
                    toggle_vertex_parity(defect_reps_[match_.mate[i]]);
                }
            }
        }
    }
    if (any_lost_) add_closure_winding();
    return winding_[0] || winding_[1] || winding_[2];
}

TrialBreakdown SublatticeDecoder::run(double p_loss, Rng& rng) {
    TrialBreakdown out;
    sample_loss(p_loss, rng);
    if (!merge()) {
        out.percolated = true;
        return out;
    }
    sample_flips(rng);
    compute_defects();
    compute_distances();
    out.logical = match_and_classify();
    return out;
}

DecodeOutcome TrialEngine::run(double p_loss, uint64_t seed, bool oracle) {
    Rng rng(splitmix64(seed ^ 0x51a9c3f7b624d08bULL));
    primal_.enable_matching_oracle(oracle);
    dual_.enable_matching_oracle(oracle);
    DecodeOutcome out;
    out.primal = primal_.run(p_loss, rng);
    out.dual = dual_.run(p_loss, rng);
    if (out.primal.percolated || out.dual.percolated)
        out.outcome = TrialOutcome::PercolationFailure;
    else if (out.primal.logical || out.dual.logical)
        out.outcome = TrialOutcome::LogicalFailure;
    else
        out.outcome = TrialOutcome::Success;
    return out;
}

DecodeOutcome decode_trial(const RHGLattice& lat, const EffectiveRates& rates, double p_loss,
                           uint64_t seed, bool matching_oracle) {
    SublatticeDecoder primal(lat.primal, rates), dual(lat.dual, rates);
    Rng rng(splitmix64(seed ^ 0x51a9c3f7b624d08bULL));
    primal.enable_matching_oracle(matching_oracle);
    dual.enable_matching_oracle(matching_oracle);
    DecodeOutcome out;
    out.primal = primal.run(p_loss, rng);
    out.dual = dual.run(p_loss, rng);
    if (out.primal.percolated || out.dual.percolated)
        out.outcome = TrialOutcome::PercolationFailure;
    else if (out.primal.logical || out.dual.logical)
        out.outcome = TrialOutcome::LogicalFailure;
    else
        out.outcome = TrialOutcome::Success;
    return out;
}

}  // namespace forge
