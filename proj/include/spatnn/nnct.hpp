#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "spatnn/geometry.hpp"

namespace spatnn {

/// NN digraph summary: who is whose nearest neighbor plus the join-count
/// quantities entering the RL moments.
///
/// Q counts ordered pairs of points sharing a NN, Q = sum_k k(k-1) Q_k where
/// Q_k is the number of points serving as NN exactly k times; planar euclidean
/// patterns have k <= 6 but the general term covers toroidal or degenerate
/// inputs. R is twice the number of reflexive (mutual-NN) pairs.
struct NNGraph {
    std::vector<int> nn_id;
    std::vector<double> nn_dist;
    std::vector<int> indegree;
    std::vector<int> qk;  // qk[k] = #points with indegree k, k = 0..max observed
    long long Q = 0;
    int R = 0;

    int n() const { return static_cast<int>(nn_id.size()); }
};

inline NNGraph build_nngraph(const PointSet& ps, const Metric& m,
                             SearchPolicy policy = SearchPolicy::automatic) {
    const auto nn = nn_index(ps, m, policy);
    NNGraph g;
    const int n = ps.n();
    g.nn_id.resize(static_cast<std::size_t>(n));
    g.nn_dist.resize(static_cast<std::size_t>(n));
    g.indegree.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        g.nn_id[static_cast<std::size_t>(i)] = nn[static_cast<std::size_t>(i)].nn_id;
        g.nn_dist[static_cast<std::size_t>(i)] = nn[static_cast<std::size_t>(i)].dist;
        ++g.indegree[static_cast<std::size_t>(nn[static_cast<std::size_t>(i)].nn_id)];
    }
    int kmax = 0;
    for (int d : g.indegree) kmax = std::max(kmax, d);
    g.qk.assign(static_cast<std::size_t>(kmax) + 1, 0);
    for (int d : g.indegree) ++g.qk[static_cast<std::size_t>(d)];
    for (int k = 2; k <= kmax; ++k)
        g.Q += static_cast<long long>(k) * (k - 1) * g.qk[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i)
        if (g.nn_id[static_cast<std::size_t>(g.nn_id[static_cast<std::size_t>(i)])] == i) ++g.R;
    return g;
}

/// q x q nearest-neighbor contingency table: rows are base classes, columns
/// are NN classes.
class Nnct {
public:
    Nnct(int q, std::vector<long long> counts) : q_(q), counts_(std::move(counts)) {
        if (q_ < 1 || counts_.size() != static_cast<std::size_t>(q_) * static_cast<std::size_t>(q_))
            throw invalid_input("Nnct: counts must be a q x q matrix");
        for (long long c : counts_)
            if (c < 0) throw invalid_input("Nnct: negative cell count");
        row_sums_.assign(static_cast<std::size_t>(q_), 0);
        col_sums_.assign(static_cast<std::size_t>(q_), 0);
        for (int i = 0; i < q_; ++i)
            for (int j = 0; j < q_; ++j) {
                row_sums_[static_cast<std::size_t>(i)] += count(i, j);
                col_sums_[static_cast<std::size_t>(j)] += count(i, j);
                n_ += count(i, j);
            }
    }

    int q() const { return q_; }
    long long n() const { return n_; }
    long long count(int i, int j) const {
        return counts_[static_cast<std::size_t>(i) * static_cast<std::size_t>(q_) +
                       static_cast<std::size_t>(j)];
    }
    long long row_sum(int i) const { return row_sums_[static_cast<std::size_t>(i)]; }
    long long col_sum(int j) const { return col_sums_[static_cast<std::size_t>(j)]; }
    const std::vector<long long>& counts() const { return counts_; }
    const std::vector<long long>& row_sums() const { return row_sums_; }
    const std::vector<long long>& col_sums() const { return col_sums_; }

private:
    int q_;
    std::vector<long long> counts_;  // row-major
    std::vector<long long> row_sums_, col_sums_;
    long long n_ = 0;
};

/// Counts (base label, NN label) pairs. With a base mask, only marked points
/// act as bases; their NNs are still found among all points.
inline Nnct build_nnct(const PointSet& ps, const NNGraph& g,
                       const std::vector<bool>* base_mask = nullptr) {
    if (g.n() != ps.n()) throw invalid_input("build_nnct: graph does not match point set");
    if (base_mask && base_mask->size() != static_cast<std::size_t>(ps.n()))
        throw invalid_input("build_nnct: mask does not match point set");
    const int q = ps.num_classes();
    std::vector<long long> counts(static_cast<std::size_t>(q) * static_cast<std::size_t>(q), 0);
    for (int i = 0; i < ps.n(); ++i) {
        if (base_mask && !(*base_mask)[static_cast<std::size_t>(i)]) continue;
        const int bi = ps.label(i);
        const int bj = ps.label(g.nn_id[static_cast<std::size_t>(i)]);
        ++counts[static_cast<std::size_t>(bi) * static_cast<std::size_t>(q) +
                 static_cast<std::size_t>(bj)];
    }
    Nnct t(q, std::move(counts));
    for (int i = 0; i < q; ++i)
        if (t.row_sum(i) == 0)
            throw degenerate_table("build_nnct: class " + std::to_string(i) +
                                   " has no base points; NNCT tests are undefined");
    return t;
}

/// Rebuilds only the cell counts for a relabeling of the same fixed positions.
/// The NN graph is label-free, so permutation nulls reuse it as-is.
inline std::vector<long long> nnct_counts(const std::vector<int>& labels, int q,
                                          const NNGraph& g) {
    std::vector<long long> counts(static_cast<std::size_t>(q) * static_cast<std::size_t>(q), 0);
    for (std::size_t i = 0; i < labels.size(); ++i)
        ++counts[static_cast<std::size_t>(labels[i]) * static_cast<std::size_t>(q) +
                 static_cast<std::size_t>(labels[static_cast<std::size_t>(g.nn_id[i])])];
    return counts;
}

} // namespace spatnn
