#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "spatnn/geometry.hpp"
#include "spatnn/nnct_tests.hpp"
#include "spatnn/numerics.hpp"
#include "spatnn/permutation.hpp"

namespace spatnn {

/// Case/control reading of a labeled point set: one class plays the cases,
/// every other class is a control. The roles are not symmetric; run both
/// orderings when that matters.
struct CaseControlView {
    const PointSet& ps;
    int case_class;

    CaseControlView(const PointSet& ps_, int case_class_) : ps(ps_), case_class(case_class_) {
        if (case_class < 0 || case_class >= ps.num_classes())
            throw invalid_input("CaseControlView: case class out of range");
        if (ps.class_size(case_class) < 1 || ps.class_size(case_class) >= ps.n())
            throw invalid_input("CaseControlView: needs at least one case and one control");
    }

    int n_cases() const { return ps.class_size(case_class); }
};

/// Restriction to two classes for pairwise case/control runs on multi-class
/// data; the first class becomes class 0 (the cases).
inline PointSet subset_two_classes(const PointSet& ps, int a, int b) {
    if (a == b || a < 0 || b < 0 || a >= ps.num_classes() || b >= ps.num_classes())
        throw invalid_input("subset_two_classes: needs two distinct valid classes");
    std::vector<Point> pts;
    std::vector<int> labels;
    for (int i = 0; i < ps.n(); ++i) {
        if (ps.label(i) == a || ps.label(i) == b) {
            pts.push_back(ps.point(i));
            labels.push_back(ps.label(i) == a ? 0 : 1);
        }
    }
    return PointSet(std::move(pts), std::move(labels), ps.region());
}

namespace detail {

inline long long ce_count(const std::vector<int>& labels, int case_class,
                          const std::vector<std::vector<int>>& knn, int k) {
    long long tk = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != case_class) continue;
        const auto& lst = knn[i];
        for (int s = 0; s < k; ++s)
            if (labels[static_cast<std::size_t>(lst[static_cast<std::size_t>(s)])] == case_class)
                ++tk;
    }
    return tk;
}

} // namespace detail

struct CeOptions {
    int nperm = 999;
    std::uint64_t seed = 1;
    long long exhaustive_cap = 0;  // enumerate all labelings when fewer than this
};

/// Cuzick-Edwards T_k: the number of (case, case) pairs among the k nearest
/// neighbors of the cases. One-sided: large T_k means case clustering.
/// E[T_k] = k n0 (n0-1)/(n-1) under RL is reported as a diagnostic.
inline TestResult ce_tk(const CaseControlView& view, int k, const Metric& m,
                        const CeOptions& opt = CeOptions()) {
    const PointSet& ps = view.ps;
    if (k < 1 || k > ps.n() - 1) throw invalid_input("ce_tk: requires 1 <= k <= n-1");
    const auto knn = knn_index(ps, k, m);
    const long long observed = detail::ce_count(ps.labels(), view.case_class, knn, k);

    TestResult r;
    r.method = Method::ce_tk;
    r.k = k;
    r.statistic = static_cast<double>(observed);
    const double n0 = static_cast<double>(view.n_cases());
    r.diagnostics["expected_tk"] =
        static_cast<double>(k) * n0 * (n0 - 1.0) / static_cast<double>(ps.n() - 1);

    auto stat = [&](const std::vector<int>& labels) {
        return static_cast<double>(detail::ce_count(labels, view.case_class, knn, k));
    };
    PermutationResult perm;
    if (opt.exhaustive_cap > 0 &&
        distinct_labelings(ps.labels(), opt.exhaustive_cap) < opt.exhaustive_cap)
        perm = exhaustive_permutation_pvalue(ps.labels(), r.statistic, stat);
    else
        perm = permutation_pvalue(ps.labels(), r.statistic, stat, opt.nperm, opt.seed);
    r.p_permutation = perm.pvalue;
    r.diagnostics["perm_mean"] = perm.stat_mean;
    r.diagnostics["perm_sd"] = perm.stat_sd;
    r.diagnostics["perm_replicates"] = static_cast<double>(perm.replicates);
    r.diagnostics["perm_exhaustive"] = perm.exhaustive ? 1.0 : 0.0;
    if (perm.stat_sd > 0.0)
        r.p_asymptotic = clamp_pvalue(normal_sf((r.statistic - perm.stat_mean) / perm.stat_sd));
    return r;
}

/// Combined test over a set of k values: 1' Sigma^{-1/2} (T - mean), with the
/// mean and Sigma estimated from the permutation replicates and the statistic
/// standardized to unit variance on the range of Sigma. Eq-form leaves the
/// centering implicit; replicate-mean centering is used (and required for the
/// statistic to be location invariant).
inline TestResult ce_combined(const CaseControlView& view, const std::vector<int>& ks,
                              const Metric& m, const CeOptions& opt = CeOptions()) {
    const PointSet& ps = view.ps;
    if (ks.empty()) throw invalid_input("ce_combined: empty k set");
    int kmax = 0;
    for (int k : ks) {
        if (k < 1 || k > ps.n() - 1) throw invalid_input("ce_combined: k out of range");
        kmax = std::max(kmax, k);
    }
    const auto knn = knn_index(ps, kmax, m);
    const std::size_t mdim = ks.size();

    auto tvec = [&](const std::vector<int>& labels) {
        std::vector<double> t(mdim, 0.0);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] != view.case_class) continue;
            const auto& lst = knn[i];
            int cases_so_far = 0, pos = 0;
            for (std::size_t s = 0; s < mdim; ++s) {
                for (; pos < ks[s]; ++pos)
                    if (labels[static_cast<std::size_t>(lst[static_cast<std::size_t>(pos)])] ==
                        view.case_class)
                        ++cases_so_far;
                t[s] += cases_so_far;
            }
        }
        return t;
    };
    // ks must be increasing for the prefix walk
    for (std::size_t s = 1; s < mdim; ++s)
        if (ks[s] <= ks[s - 1]) throw invalid_input("ce_combined: k set must be increasing");

    const std::vector<double> observed_t = tvec(ps.labels());

    // Replicate T vectors: exhaustive when small, sampled otherwise.
    std::vector<std::vector<double>> reps;
    bool exhaustive = false;
    if (opt.exhaustive_cap > 0 &&
        distinct_labelings(ps.labels(), opt.exhaustive_cap) < opt.exhaustive_cap) {
        exhaustive = true;
        std::vector<int> labels = ps.labels();
        std::sort(labels.begin(), labels.end());
        do reps.push_back(tvec(labels));
        while (std::next_permutation(labels.begin(), labels.end()));
    } else {
        if (opt.nperm < 99) throw invalid_input("ce_combined: needs nperm >= 99");
        reps.assign(static_cast<std::size_t>(opt.nperm), {});
        parallel_chunks(static_cast<std::size_t>(opt.nperm),
                        [&](std::size_t, std::size_t b, std::size_t e) {
                            std::vector<int> labels;
                            for (std::size_t r = b; r < e; ++r) {
                                RngStream rng(opt.seed, r);
                                labels = ps.labels();
                                rng.shuffle(labels);
                                reps[r] = tvec(labels);
                            }
                        });
    }

    const double nrep = static_cast<double>(reps.size());
    std::vector<double> mean(mdim, 0.0);
    for (const auto& t : reps)
        for (std::size_t s = 0; s < mdim; ++s) mean[s] += t[s];
    for (auto& v : mean) v /= nrep;
    Matrix sigma(mdim, mdim);
    for (const auto& t : reps)
        for (std::size_t a = 0; a < mdim; ++a)
            for (std::size_t b = 0; b < mdim; ++b)
                sigma(a, b) += (t[a] - mean[a]) * (t[b] - mean[b]);
    for (std::size_t a = 0; a < mdim; ++a)
        for (std::size_t b = 0; b < mdim; ++b) sigma(a, b) /= (nrep - 1.0);

    const Matrix w = matrix_inv_sqrt(sigma);
    // Unit variance on the range of Sigma: Var[1'W(T-mean)] = 1'P1, P = W Sigma W.
    const Matrix proj = w * sigma * w;
    double denom2 = 0.0;
    for (std::size_t a = 0; a < mdim; ++a)
        for (std::size_t b = 0; b < mdim; ++b) denom2 += proj(a, b);
    const double denom = denom2 > 0.0 ? std::sqrt(denom2) : 1.0;

    auto functional = [&](const std::vector<double>& t) {
        double s = 0.0;
        for (std::size_t a = 0; a < mdim; ++a) {
            double row = 0.0;
            for (std::size_t b = 0; b < mdim; ++b) row += w(a, b) * (t[b] - mean[b]);
            s += row;
        }
        return s / denom;
    };

    TestResult r;
    r.method = Method::ce_comb;
    r.k = kmax;
    r.statistic = functional(observed_t);
    r.p_asymptotic = clamp_pvalue(normal_sf(r.statistic));
    long long ge = 0;
    for (const auto& t : reps)
        if (functional(t) >= r.statistic) ++ge;
    r.p_permutation = exhaustive
                          ? static_cast<double>(ge) / nrep
                          : static_cast<double>(1 + ge) / (nrep + 1.0);
    const auto rank = pseudo_inverse(sigma).rank;
    r.diagnostics["cov_rank"] = static_cast<double>(rank);
    r.diagnostics["perm_replicates"] = nrep;
    r.diagnostics["perm_exhaustive"] = exhaustive ? 1.0 : 0.0;
    for (std::size_t s = 0; s < mdim; ++s)
        r.diagnostics["T" + std::to_string(ks[s])] = observed_t[s];
    return r;
}

} // namespace spatnn
