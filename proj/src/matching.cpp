#include "forge/matching.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace forge {

namespace {
constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
}

long long MwpmSolver::edge_slack(const Edge& e) const {
    return lab_[e.u] + lab_[e.v] - g(e.u, e.v).w * 2;
}

void MwpmSolver::update_slack(int u, int x) {
    if (!slack_[x] || edge_slack(g(u, x)) < edge_slack(g(slack_[x], x))) slack_[x] = u;
}

void MwpmSolver::set_slack(int x) {
    slack_[x] = 0;
    for (int u = 1; u <= n_; ++u)
        if (g(u, x).w > 0 && st_[u] != x && S_[st_[u]] == 0) update_slack(u, x);
}

void MwpmSolver::queue_push(int x) {
    if (x <= n_) {
        queue_.push_back(x);
    } else {
        for (int t : flower_[x]) queue_push(t);
    }
}

void MwpmSolver::set_st(int x, int b) {
    st_[x] = b;
    if (x > n_)
        for (int t : flower_[x]) set_st(t, b);
}

int MwpmSolver::path_rotation(int b, int xr) {
    int pr = static_cast<int>(std::find(flower_[b].begin(), flower_[b].end(), xr) - flower_[b].begin());
    if (pr % 2 == 1) {
        std::reverse(flower_[b].begin() + 1, flower_[b].end());
        return static_cast<int>(flower_[b].size()) - pr;
    }
    return pr;
}

void MwpmSolver::set_match(int u, int v) {
    match_[u] = g(u, v).v;
    if (u <= n_) return;
    Edge e = g(u, v);
    int xr = from(u, e.u);
    int pr = path_rotation(u, xr);
    for (int i = 0; i < pr; ++i) set_match(flower_[u][i], flower_[u][i ^ 1]);
    set_match(xr, v);
    std::rotate(flower_[u].begin(), flower_[u].begin() + pr, flower_[u].end());
}

void MwpmSolver::augment(int u, int v) {
    for (;;) {
        int xnv = st_[match_[u]];
        set_match(u, v);
        if (!xnv) return;
        set_match(xnv, st_[pa_[xnv]]);
        u = st_[pa_[xnv]];
        v = xnv;
    }
}

int MwpmSolver::find_lca(int u, int v) {
    for (++lca_stamp_; u || v; std::swap(u, v)) {
        if (u == 0) continue;
        if (vis_[u] == lca_stamp_) return u;
        vis_[u] = lca_stamp_;
        u = st_[match_[u]];
        if (u) u = st_[pa_[u]];
    }
    return 0;
}

void MwpmSolver::add_blossom(int u, int lca, int v) {
    int b = n_ + 1;
    while (b <= n_x_ && st_[b]) ++b;
    if (b > n_x_) ++n_x_;
    lab_[b] = 0;
    S_[b] = 0;
    match_[b] = match_[lca];
    flower_[b].clear();
    flower_[b].push_back(lca);
    for (int x = u, y; x != lca; x = st_[pa_[y]]) {
        flower_[b].push_back(x);
        y = st_[match_[x]];
        flower_[b].push_back(y);
        queue_push(y);
    }
    std::reverse(flower_[b].begin() + 1, flower_[b].end());
    for (int x = v, y; x != lca; x = st_[pa_[y]]) {
        flower_[b].push_back(x);
        y = st_[match_[x]];
        flower_[b].push_back(y);
        queue_push(y);
    }
    set_st(b, b);
    for (int x = 1; x <= n_x_; ++x) {
        g(b, x).w = 0;
        g(x, b).w = 0;
    }
    for (int x = 1; x <= n_; ++x) from(b, x) = 0;
    for (int xs : flower_[b]) {
        for (int x = 1; x <= n_x_; ++x)
            if (g(b, x).w == 0 || edge_slack(g(xs, x)) < edge_slack(g(b, x))) {
                g(b, x) = g(xs, x);
                g(x, b) = g(x, xs);
            }
        for (int x = 1; x <= n_; ++x)
            if (from(xs, x)) from(b, x) = xs;
    }
    set_slack(b);
}

void MwpmSolver::expand_blossom(int b) {
    for (int t : flower_[b]) set_st(t, t);
    int xr = from(b, g(b, pa_[b]).u);
    int pr = path_rotation(b, xr);
    for (int i = 0; i < pr; i += 2) {
        int xs = flower_[b][i], xns = flower_[b][i + 1];
        pa_[xs] = g(xns, xs).u;
        S_[xs] = 1;
        S_[xns] = 0;
        slack_[xs] = 0;
        set_slack(xns);
        queue_push(xns);
    }
    S_[xr] = 1;
    pa_[xr] = pa_[b];
    for (size_t i = pr + 1; i < flower_[b].size(); ++i) {
        int xs = flower_[b][i];
        S_[xs] = -1;
        set_slack(xs);
    }
    st_[b] = 0;
    flower_[b].clear();
}

bool MwpmSolver::on_found_edge(const Edge& e) {
    int u = st_[e.u], v = st_[e.v];
    if (S_[v] == -1) {
        pa_[v] = e.u;
        S_[v] = 1;
        int nu = st_[match_[v]];
        slack_[v] = 0;
        slack_[nu] = 0;
        S_[nu] = 0;
        queue_push(nu);
    } else if (S_[v] == 0) {
        int lca = find_lca(u, v);
        if (!lca) {
            augment(u, v);
            augment(v, u);
            return true;
        }
        add_blossom(u, lca, v);
    }
    return false;
}

bool MwpmSolver::grow_trees() {
    std::fill(S_.begin(), S_.begin() + n_x_ + 1, -1);
    std::fill(slack_.begin(), slack_.begin() + n_x_ + 1, 0);
    queue_.clear();
    queue_head_ = 0;
    for (int x = 1; x <= n_x_; ++x)
        if (st_[x] == x && !match_[x]) {
            pa_[x] = 0;
            S_[x] = 0;
            queue_push(x);
        }
    if (queue_.size() == queue_head_) return false;
    long long round_guard = 0;
    for (;;) {
        if (++round_guard > 200000) throw std::logic_error("matching made no progress");
        while (queue_head_ < queue_.size()) {
            int u = queue_[queue_head_++];
            if (S_[st_[u]] == 1) continue;
            for (int v = 1; v <= n_; ++v)
                if (g(u, v).w > 0 && st_[u] != st_[v]) {
                    if (edge_slack(g(u, v)) == 0) {
                        if (on_found_edge(g(u, v))) return true;
                    } else {
                        update_slack(u, st_[v]);
                    }
                }
        }
        long long d = kInf;
        for (int b = n_ + 1; b <= n_x_; ++b)
            if (st_[b] == b && S_[b] == 1) d = std::min(d, lab_[b] / 2);
        for (int x = 1; x <= n_x_; ++x)
            if (st_[x] == x && slack_[x]) {
                if (S_[x] == -1)
                    d = std::min(d, edge_slack(g(slack_[x], x)));
                else if (S_[x] == 0)
                    d = std::min(d, edge_slack(g(slack_[x], x)) / 2);
            }
        for (int u = 1; u <= n_; ++u) {
            if (S_[st_[u]] == 0) {
                if (lab_[u] <= d) return false;
                lab_[u] -= d;
            } else if (S_[st_[u]] == 1) {
                lab_[u] += d;
            }
        }
        for (int b = n_ + 1; b <= n_x_; ++b)
            if (st_[b] == b) {
                if (S_[b] == 0)
                    lab_[b] += d * 2;
                else if (S_[b] == 1)
                    lab_[b] -= d * 2;
            }
        queue_.clear();
        queue_head_ = 0;
        for (int x = 1; x <= n_x_; ++x)
            if (st_[x] == x && slack_[x] && st_[slack_[x]] != x && edge_slack(g(slack_[x], x)) == 0)
                if (on_found_edge(g(slack_[x], x))) return true;
        for (int b = n_ + 1; b <= n_x_; ++b)
            if (st_[b] == b && S_[b] == 1 && lab_[b] == 0) expand_blossom(b);
    }
}

MatchResult MwpmSolver::solve(int n, const std::vector<long long>& cost) {
    if (n < 0 || n % 2 != 0) throw std::invalid_argument("matching needs an even node count");
    MatchResult res;
    if (n == 0) return res;
    if (cost.size() != static_cast<size_t>(n) * n) throw std::invalid_argument("cost matrix size mismatch");

    const int cap = 2 * n + 1;
    if (stride_ < cap) {
        stride_ = cap;
        g_.assign(static_cast<size_t>(cap) * cap, Edge{});
        for (int u = 0; u < cap; ++u)
            for (int v = 0; v < cap; ++v) {
                g_[static_cast<size_t>(u) * cap + v].u = u;
                g_[static_cast<size_t>(u) * cap + v].v = v;
            }
        from_.assign(static_cast<size_t>(cap) * cap, 0);
        lab_.assign(cap, 0);
        match_.assign(cap, 0);
        slack_.assign(cap, 0);
        st_.assign(cap, 0);
        pa_.assign(cap, 0);
        S_.assign(cap, -1);
        vis_.assign(cap, 0);
        flower_.assign(cap, {});
        lca_stamp_ = 0;
    }
    n_ = n;
    n_x_ = n;

    // Transform to maximum weight: w = (max cost - cost) + 1 keeps every edge
    // positive, so the maximum-weight matching is perfect and minimizes cost.
    long long cmax = 0;
    for (long long c : cost) {
        if (c < 0) throw std::invalid_argument("matching costs must be nonnegative");
        cmax = std::max(cmax, c);
    }
    long long wmax = 0;
    // Only the leaf block needs per-solve weight resets; blossom rows are
    // zeroed on creation and the (u, v) endpoints are fixed at resize time.
    for (int u = 1; u <= 2 * n; ++u) {
        match_[u] = 0;
        st_[u] = u <= n ? u : 0;
        flower_[u].clear();
    }
    // Endpoints must be restored together with the weights: a slot that was
    // a blossom in a previous solve holds inherited endpoint fields.
    for (int u = 1; u <= n; ++u) {
        from(u, u) = u;
        for (int v = 1; v <= n; ++v) {
            if (u == v) {
                g(u, v) = Edge{u, v, 0};
                continue;
            }
            from(u, v) = 0;
            long long w = cmax - cost[static_cast<size_t>(u - 1) * n + (v - 1)] + 1;
            g(u, v) = Edge{u, v, w};
            wmax = std::max(wmax, w);
        }
    }
    std::fill(vis_.begin(), vis_.end(), 0);
    lca_stamp_ = 0;
    for (int u = 1; u <= n; ++u) lab_[u] = wmax;
    for (int u = n + 1; u <= 2 * n; ++u) lab_[u] = 0;

    int rounds = 0;
    while (grow_trees()) ++rounds;
    if (rounds != n / 2) throw std::logic_error("matching failed to become perfect");

    res.mate.assign(n, -1);
    for (int u = 1; u <= n; ++u) {
        res.mate[u - 1] = match_[u] - 1;
        if (match_[u] > u)
            res.total_cost += cost[static_cast<size_t>(u - 1) * n + (match_[u] - 1)];
    }
    for (int u = 0; u < n; ++u)
        if (res.mate[u] < 0 || res.mate[res.mate[u]] != u) throw std::logic_error("matching is not an involution");
    return res;
}

long long brute_force_mwpm(int n, const std::vector<long long>& cost, std::vector<int>* mate_out) {
    if (n % 2 != 0) throw std::invalid_argument("even node count required");
    std::vector<int> mate(n, -1), best_mate(n, -1);
    long long best = std::numeric_limits<long long>::max();
    auto rec = [&](auto&& self, long long acc) -> void {
        int u = -1;
        for (int i = 0; i < n; ++i)
            if (mate[i] < 0) {
                u = i;
                break;
            }
        if (u < 0) {
            if (acc < best) {
                best = acc;
                best_mate = mate;
            }
            return;
        }
        for (int v = u + 1; v < n; ++v) {
            if (mate[v] >= 0) continue;
            mate[u] = v;
            mate[v] = u;
            self(self, acc + cost[static_cast<size_t>(u) * n + v]);
            mate[u] = mate[v] = -1;
        }
    };
    rec(rec, 0);
    if (mate_out) *mate_out = best_mate;
    return best;
}

}  // namespace forge
