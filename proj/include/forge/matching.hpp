#pragma once

#include <cstdint>
#include <vector>

namespace forge {

struct MatchResult {
    std::vector<int> mate;    // mate[i] = partner of i
    long long total_cost = 0;
};

// Exact minimum-weight perfect matching on a complete graph with integer
// costs (Edmonds' blossom algorithm, dense O(n^3) primal-dual form).
// Deterministic; buffers grow with the largest instance seen.
class MwpmSolver {
  public:
    // cost is a dense n*n symmetric matrix; n must be even.
    MatchResult solve(int n, const std::vector<long long>& cost);

  private:
    struct Edge {
        int u = 0, v = 0;
        long long w = 0;
    };

    long long edge_slack(const Edge& e) const;
    void update_slack(int u, int x);
    void set_slack(int x);
    void queue_push(int x);
    void set_st(int x, int b);
    int path_rotation(int b, int xr);
    void set_match(int u, int v);
    void augment(int u, int v);
    int find_lca(int u, int v);
    void add_blossom(int u, int lca, int v);
    void expand_blossom(int b);
    bool on_found_edge(const Edge& e);
    bool grow_trees();

    Edge& g(int u, int v) { return g_[static_cast<size_t>(u) * stride_ + v]; }
    const Edge& g(int u, int v) const { return g_[static_cast<size_t>(u) * stride_ + v]; }
    int& from(int b, int x) { return from_[static_cast<size_t>(b) * stride_ + x]; }

    int n_ = 0, n_x_ = 0, stride_ = 0;
    int lca_stamp_ = 0;
    std::vector<Edge> g_;
    std::vector<long long> lab_;
    std::vector<int> match_, slack_, st_, pa_, S_, vis_, from_;
    std::vector<std::vector<int>> flower_;
    std::vector<int> queue_;
    size_t queue_head_ = 0;
};

// Exhaustive pairing enumeration; n <= ~12.
long long brute_force_mwpm(int n, const std::vector<long long>& cost,
                           std::vector<int>* mate_out = nullptr);

}  // namespace forge
