#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "spatnn/nnct.hpp"
#include "spatnn/numerics.hpp"
#include "spatnn/parallel.hpp"
#include "spatnn/rng.hpp"

namespace spatnn {

/// Probability that a randomly picked tuple of distinct points carries the
/// given class multiset under random labeling: a ratio of falling factorials
/// of the class sizes over falling factorials of n. Evaluated in class order
/// so that equal multisets give bitwise-equal results whatever the tuple
/// order (the covariance formulas rely on exact symmetry).
inline double class_tuple_prob(const std::vector<long long>& sizes,
                               std::initializer_list<int> classes) {
    long long n = 0;
    for (long long s : sizes) n += s;
    std::vector<int> mult(sizes.size(), 0);
    for (int c : classes) ++mult[static_cast<std::size_t>(c)];
    double p = 1.0;
    long long taken = 0;
    for (std::size_t c = 0; c < sizes.size(); ++c)
        for (int t = 0; t < mult[c]; ++t) {
            p *= static_cast<double>(sizes[c] - t) / static_cast<double>(n - taken);
            ++taken;
        }
    return p;
}

/// The pair/triplet/quartet probabilities entering the RL moments for one
/// ordered class pair (i, j).
struct PairProbabilities {
    double p_ii, p_jj, p_ij;
    double p_iii, p_iij;
    double p_iijj, p_iiii;

    static PairProbabilities compute(const std::vector<long long>& sizes, int i, int j) {
        PairProbabilities p{};
        p.p_ii = class_tuple_prob(sizes, {i, i});
        p.p_jj = class_tuple_prob(sizes, {j, j});
        p.p_ij = class_tuple_prob(sizes, {i, j});
        p.p_iii = class_tuple_prob(sizes, {i, i, i});
        p.p_iij = class_tuple_prob(sizes, {i, i, j});
        p.p_iijj = class_tuple_prob(sizes, {i, i, j, j});
        p.p_iiii = class_tuple_prob(sizes, {i, i, i, i});
        return p;
    }
};

/// E[N_ij] under RL: n_i(n_i-1)/(n-1) on the diagonal, n_i n_j/(n-1) off it.
inline Matrix expected_counts(const std::vector<long long>& sizes) {
    long long n = 0;
    for (long long s : sizes) {
        if (s < 1) throw invalid_input("expected_counts: every class size must be >= 1");
        n += s;
    }
    if (n < 2) throw invalid_input("expected_counts: needs n >= 2");
    const std::size_t q = sizes.size();
    Matrix e(q, q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            const double ni = static_cast<double>(sizes[i]);
            const double nj = static_cast<double>(sizes[j]);
            e(i, j) = (i == j ? ni * (ni - 1.0) : ni * nj) / static_cast<double>(n - 1);
        }
    return e;
}

namespace detail {

inline void require_quartets(long long n, const char* who) {
    if (n < 4)
        throw moments_unavailable(std::string(who) +
                                  ": analytic moments need n >= 4 (quartet probabilities); "
                                  "use the permutation fallback");
}

} // namespace detail

/// Var[N_ij] under RL, conditional on Q and R.
inline Matrix cell_variance(const std::vector<long long>& sizes, long long Q, long long R) {
    long long n = 0;
    for (long long s : sizes) n += s;
    detail::require_quartets(n, "cell_variance");
    if (Q < 0 || R < 0 || R % 2 != 0)
        throw invalid_input("cell_variance: Q must be >= 0 and R a nonnegative even count");
    const std::size_t q = sizes.size();
    const double nd = static_cast<double>(n);
    const double quartets = nd * nd - 3.0 * nd - static_cast<double>(Q) + static_cast<double>(R);
    Matrix v(q, q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            const auto p = PairProbabilities::compute(sizes, static_cast<int>(i),
                                                      static_cast<int>(j));
            if (i == j)
                v(i, j) = (nd + R) * p.p_ii + (2.0 * nd - 2.0 * R + Q) * p.p_iii +
                          quartets * p.p_iiii - (nd * p.p_ii) * (nd * p.p_ii);
            else
                v(i, j) = nd * p.p_ij + Q * p.p_iij + quartets * p.p_iijj -
                          (nd * p.p_ij) * (nd * p.p_ij);
        }
    return v;
}

/// Cov[N_ii, N_jj] under RL for distinct classes i, j.
inline double diag_cell_covariance(const std::vector<long long>& sizes, long long Q, long long R,
                                   int i, int j) {
    if (i == j) throw invalid_input("diag_cell_covariance: classes must differ");
    long long n = 0;
    for (long long s : sizes) n += s;
    detail::require_quartets(n, "diag_cell_covariance");
    const double nd = static_cast<double>(n);
    const auto p = PairProbabilities::compute(sizes, i, j);
    return (nd * nd - 3.0 * nd - Q + R) * p.p_iijj - nd * nd * p.p_ii * p.p_jj;
}

/// Full covariance of the cell-count vector (row-major cells 11,12,21,22) in
/// the two-class case. The paper supplies Var[N_ij] and Cov[N_11,N_22]; the
/// remaining entries are forced by the fixed row sums N_i1 + N_i2 = n_i.
inline Matrix full_cov_2class(const std::vector<long long>& sizes, long long Q, long long R) {
    if (sizes.size() != 2) throw invalid_input("full_cov_2class: supports q = 2 only");
    const Matrix v = cell_variance(sizes, Q, R);
    const double v1 = v(0, 0), v2 = v(1, 1);
    const double c = diag_cell_covariance(sizes, Q, R, 0, 1);
    Matrix s(4, 4);
    const double m[4][4] = {{v1, -v1, -c, c}, {-v1, v1, c, -c}, {-c, c, v2, -v2}, {c, -c, -v2, v2}};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) s(i, j) = m[i][j];
    return s;
}

enum class MomentSource { analytic2class, permutation };

/// RL moments of the NNCT cells: expectations, variances, and the full
/// q^2 x q^2 covariance over row-major cell order.
struct CellMoments {
    int q = 0;
    Matrix expected;  // q x q
    Matrix var;       // q x q
    Matrix cov;       // q^2 x q^2
    MomentSource source = MomentSource::analytic2class;
    int nperm = 0;

    std::size_t cell(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(q) +
               static_cast<std::size_t>(j);
    }
};

inline CellMoments analytic_moments_2class(const std::vector<long long>& sizes, long long Q,
                                           long long R) {
    CellMoments cm;
    cm.q = 2;
    cm.expected = expected_counts(sizes);
    cm.var = cell_variance(sizes, Q, R);
    cm.cov = full_cov_2class(sizes, Q, R);
    cm.source = MomentSource::analytic2class;
    return cm;
}

/// Sample moments of the cell counts over random relabelings of the fixed
/// locations. Deterministic for a fixed seed regardless of the worker count:
/// replicate r draws from stream (seed, r) and partial sums are combined in
/// chunk order.
inline CellMoments permutation_cov(const PointSet& ps, const NNGraph& g, int nperm,
                                   std::uint64_t seed) {
    if (nperm < 100) throw invalid_input("permutation_cov: needs nperm >= 100");
    const int q = ps.num_classes();
    const std::size_t d = static_cast<std::size_t>(q) * static_cast<std::size_t>(q);

    struct Acc {
        std::vector<double> sum;
        std::vector<double> cross;  // d x d row-major
    };
    const std::size_t workers = std::min<std::size_t>(thread_count(), static_cast<std::size_t>(nperm));
    std::vector<Acc> acc(std::max<std::size_t>(workers, 1));
    for (auto& a : acc) {
        a.sum.assign(d, 0.0);
        a.cross.assign(d * d, 0.0);
    }

    parallel_chunks(static_cast<std::size_t>(nperm), [&](std::size_t chunk, std::size_t b, std::size_t e) {
        auto& a = acc[chunk];
        std::vector<int> labels = ps.labels();
        for (std::size_t r = b; r < e; ++r) {
            RngStream rng(seed, r);
            labels = ps.labels();
            rng.shuffle(labels);
            const auto counts = nnct_counts(labels, q, g);
            for (std::size_t u = 0; u < d; ++u) {
                const double cu = static_cast<double>(counts[u]);
                a.sum[u] += cu;
                for (std::size_t v = u; v < d; ++v)
                    a.cross[u * d + v] += cu * static_cast<double>(counts[v]);
            }
        }
    });

    std::vector<double> sum(d, 0.0), cross(d * d, 0.0);
    for (const auto& a : acc) {
        for (std::size_t u = 0; u < d; ++u) sum[u] += a.sum[u];
        for (std::size_t t = 0; t < d * d; ++t) cross[t] += a.cross[t];
    }

    CellMoments cm;
    cm.q = q;
    cm.source = MomentSource::permutation;
    cm.nperm = nperm;
    cm.expected = Matrix(static_cast<std::size_t>(q), static_cast<std::size_t>(q));
    cm.var = Matrix(static_cast<std::size_t>(q), static_cast<std::size_t>(q));
    cm.cov = Matrix(d, d);
    const double np = static_cast<double>(nperm);
    for (std::size_t u = 0; u < d; ++u)
        for (std::size_t v = u; v < d; ++v) {
            const double cuv = (cross[u * d + v] - sum[u] * sum[v] / np) / (np - 1.0);
            cm.cov(u, v) = cuv;
            cm.cov(v, u) = cuv;
        }
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
            const std::size_t u = cm.cell(i, j);
            cm.expected(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = sum[u] / np;
            cm.var(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = cm.cov(u, u);
        }
    return cm;
}

/// Covariances involving the (random) column sums, derived by summing cell
/// covariances: Cov[N_ij, C_k] = sum_m Cov[N_ij, N_mk] and
/// Cov[C_j, C_l] = sum_m sum_r Cov[N_mj, N_rl].
struct ColumnSumCov {
    Matrix cell_col;  // q^2 x q, rows in row-major cell order
    Matrix col_col;   // q x q
};

inline ColumnSumCov column_sum_cov(const CellMoments& cm) {
    const int q = cm.q;
    const std::size_t d = static_cast<std::size_t>(q) * static_cast<std::size_t>(q);
    ColumnSumCov out;
    out.cell_col = Matrix(d, static_cast<std::size_t>(q));
    out.col_col = Matrix(static_cast<std::size_t>(q), static_cast<std::size_t>(q));
    for (std::size_t u = 0; u < d; ++u)
        for (int k = 0; k < q; ++k) {
            double s = 0.0;
            for (int m = 0; m < q; ++m) s += cm.cov(u, cm.cell(m, k));
            out.cell_col(u, static_cast<std::size_t>(k)) = s;
        }
    for (int j = 0; j < q; ++j)
        for (int l = 0; l < q; ++l) {
            double s = 0.0;
            for (int m = 0; m < q; ++m) s += out.cell_col(cm.cell(m, j), static_cast<std::size_t>(l));
            out.col_col(static_cast<std::size_t>(j), static_cast<std::size_t>(l)) = s;
        }
    return out;
}

} // namespace spatnn
