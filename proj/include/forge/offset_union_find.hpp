#pragma once

#include <array>
#include <vector>

namespace forge {

// Union-find with unwrapped displacement tracking on a periodic lattice; a
// bond closing a cycle of nonzero total displacement wraps the torus.
class OffsetUnionFind {
  public:
    explicit OffsetUnionFind(int n) { reset(n); }

    void reset(int n) {
        parent_.resize(n);
        rank_.assign(n, 0);
        off_.assign(n, {0, 0, 0});
        for (int i = 0; i < n; ++i) parent_[i] = i;
    }

    int find(int v) {
        if (parent_[v] == v) return v;
        int root = find(parent_[v]);
        if (parent_[v] != root) {
            for (int d = 0; d < 3; ++d) off_[v][d] += off_[parent_[v]][d];
            parent_[v] = root;
        }
        return root;
    }

    // Returns true when u and v were already connected and the bond closes a
    // wrapping cycle. `delta` is the unwrapped displacement from u to v.
    bool unite_detect_wrap(int u, int v, const std::array<int, 3>& delta) {
        int ru = find(u), rv = find(v);
        if (ru == rv) {
            for (int d = 0; d < 3; ++d)
                if (off_[u][d] + delta[d] != off_[v][d]) return true;
            return false;
        }
        if (rank_[ru] < rank_[rv]) {
            for (int d = 0; d < 3; ++d) off_[ru][d] = off_[v][d] - delta[d] - off_[u][d];
            parent_[ru] = rv;
        } else {
            for (int d = 0; d < 3; ++d) off_[rv][d] = off_[u][d] + delta[d] - off_[v][d];
            parent_[rv] = ru;
            if (rank_[ru] == rank_[rv]) ++rank_[ru];
        }
        return false;
    }

    const std::array<int, 3>& offset(int v) const { return off_[v]; }

  private:
    std::vector<int> parent_, rank_;
    std::vector<std::array<int, 3>> off_;
};

}  // namespace forge
