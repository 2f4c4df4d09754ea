#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "spatnn/geometry.hpp"
#include "spatnn/parallel.hpp"
#include "spatnn/rng.hpp"

namespace spatnn {

/// Evaluation distances for the second-order functions. Strictly increasing
/// and positive; estimators additionally require t_max at most half the
/// shorter region side so the edge correction stays a two-adjacent-edge case.
struct DistanceGrid {
    std::vector<double> t;

    explicit DistanceGrid(std::vector<double> tv) : t(std::move(tv)) {
        if (t.empty()) throw invalid_input("DistanceGrid: empty grid");
        double prev = 0.0;
        for (double x : t) {
            if (!(x > prev)) throw invalid_input("DistanceGrid: must be strictly increasing and positive");
            prev = x;
        }
    }

    static DistanceGrid uniform(double tmax, int n) {
        if (n < 1 || !(tmax > 0.0)) throw invalid_input("DistanceGrid: bad uniform grid");
        std::vector<double> tv(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            tv[static_cast<std::size_t>(i)] = tmax * static_cast<double>(i + 1) / n;
        return DistanceGrid(std::move(tv));
    }

    std::size_t size() const { return t.size(); }
    double tmax() const { return t.back(); }
};

struct FunctionEstimate {
    std::vector<double> t;
    std::vector<double> values;
    std::vector<double> lower, upper;  // empty unless an envelope was attached
    int nsim = 0;
    double band = 0.0;
    double min_reliable_t = 0.0;  // pair correlation only
};

namespace detail {

inline void check_grid(const DistanceGrid& grid, const Rect& region) {
    if (grid.tmax() > 0.5 * region.min_side() + 1e-12)
        throw invalid_input("grid: t_max must be at most half the shorter region side");
}

// Fraction of the circle of radius r centered at c lying inside the
// rectangle. Valid for r <= min(width, height)/2, where at most the nearest
// vertical and nearest horizontal edge can be crossed.
inline double circle_fraction_inside(Point c, double r, const Rect& rect) {
    if (r <= 0.0) return 1.0;
    const double d1 = std::min(c.x - rect.xmin, rect.xmax - c.x);
    const double d2 = std::min(c.y - rect.ymin, rect.ymax - c.y);
    double outside = 0.0;
    if (d1 < r && d2 < r && d1 * d1 + d2 * d2 < r * r)
        outside = 0.5 * std::numbers::pi + std::acos(d1 / r) + std::acos(d2 / r);
    else {
        if (d1 < r) outside += 2.0 * std::acos(d1 / r);
        if (d2 < r) outside += 2.0 * std::acos(d2 / r);
    }
    return 1.0 - outside / (2.0 * std::numbers::pi);
}

inline double edge_weight(Point c, double r, const Rect& rect) {
    return 1.0 / circle_fraction_inside(c, r, rect);
}

// Ordered (weight, distance) contributions, sorted by distance, turned into
// cumulative sums for step evaluation over the grid.
struct PairLedger {
    std::vector<std::pair<double, double>> dw;  // (distance, weight)

    void sort() { std::sort(dw.begin(), dw.end()); }

    // sum of weights with distance < t (strict, per the indicator I(d < t))
    double cum_below(double t) const {
        double s = 0.0;
        for (const auto& [d, w] : dw) {
            if (d >= t) break;
            s += w;
        }
        return s;
    }
};

inline std::vector<double> cumulative_on_grid(PairLedger& ledger, const DistanceGrid& grid,
                                              double scale) {
    ledger.sort();
    std::vector<double> out(grid.size(), 0.0);
    double s = 0.0;
    std::size_t pos = 0;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        while (pos < ledger.dw.size() && ledger.dw[pos].first < grid.t[gi])
            s += ledger.dw[pos++].second;
        out[gi] = s * scale;
    }
    return out;
}

} // namespace detail

/// Ripley's univariate K for one class: A/N^2 * sum over ordered pairs of the
/// reciprocal circumference-fraction weight, cumulated in distance.
inline FunctionEstimate ripley_k_uni(const PointSet& ps, int cls, const DistanceGrid& grid) {
    detail::check_grid(grid, ps.region());
    const auto idx = ps.indices_of_class(cls);
    if (idx.size() < 2) throw invalid_input("ripley_k_uni: class needs at least 2 points");
    const Rect& rect = ps.region();
    detail::PairLedger ledger;
    ledger.dw.reserve(idx.size() * (idx.size() - 1));
    const double tmax = grid.tmax();
    for (int a : idx)
        for (int b : idx) {
            if (a == b) continue;
            const double d = std::hypot(ps.point(a).x - ps.point(b).x,
                                        ps.point(a).y - ps.point(b).y);
            if (d >= tmax) continue;
            ledger.dw.emplace_back(d, detail::edge_weight(ps.point(a), d, rect));
        }
    const double n = static_cast<double>(idx.size());
    FunctionEstimate est;
    est.t = grid.t;
    est.values = detail::cumulative_on_grid(ledger, grid, rect.area() / (n * n));
    return est;
}

/// Ripley's bivariate K: A/(n_i n_j) * sum over (class i, class j) pairs,
/// weights centered at the class-i point (slightly asymmetric in i, j).
inline FunctionEstimate ripley_k_biv(const PointSet& ps, int cls_i, int cls_j,
                                     const DistanceGrid& grid) {
    detail::check_grid(grid, ps.region());
    const auto ia = ps.indices_of_class(cls_i);
    const auto ib = ps.indices_of_class(cls_j);
    if (ia.empty() || ib.empty()) throw invalid_input("ripley_k_biv: both classes must be nonempty");
    const Rect& rect = ps.region();
    detail::PairLedger ledger;
    const double tmax = grid.tmax();
    for (int a : ia)
        for (int b : ib) {
            if (a == b) continue;
            const double d = std::hypot(ps.point(a).x - ps.point(b).x,
                                        ps.point(a).y - ps.point(b).y);
            if (d >= tmax) continue;
            ledger.dw.emplace_back(d, detail::edge_weight(ps.point(a), d, rect));
        }
    FunctionEstimate est;
    est.t = grid.t;
    est.values = detail::cumulative_on_grid(
        ledger, grid,
        rect.area() / (static_cast<double>(ia.size()) * static_cast<double>(ib.size())));
    return est;
}

inline FunctionEstimate l_from_k(FunctionEstimate k) {
    for (auto& v : k.values) v = std::sqrt(v / std::numbers::pi);
    return k;
}

inline FunctionEstimate ripley_l_uni(const PointSet& ps, int cls, const DistanceGrid& grid) {
    return l_from_k(ripley_k_uni(ps, cls, grid));
}

inline FunctionEstimate ripley_l_biv(const PointSet& ps, int cls_i, int cls_j,
                                     const DistanceGrid& grid) {
    return l_from_k(ripley_k_biv(ps, cls_i, cls_j, grid));
}

/// Default pair-correlation bandwidth, 0.15/sqrt(intensity).
inline double default_pcf_bandwidth(const PointSet& ps) {
    const double lambda = static_cast<double>(ps.n()) / ps.region().area();
    return 0.15 / std::sqrt(lambda);
}

/// Kernel estimate of the pair correlation function g(t) = K'(t)/(2 pi t):
/// Epanechnikov-smoothed pair-distance density with the same edge weights.
/// g = 1 under CSR. Estimates below the bandwidth or the average NN distance
/// are unreliable; min_reliable_t records the threshold.
///
/// cls_i = -1 uses all points (univariate over the superposition); a single
/// class gives the univariate class version; two classes the bivariate one.
inline FunctionEstimate pair_correlation(const PointSet& ps, const DistanceGrid& grid,
                                         double bandwidth, int cls_i = -1, int cls_j = -1) {
    detail::check_grid(grid, ps.region());
    if (!(bandwidth > 0.0)) throw invalid_input("pair_correlation: bandwidth must be > 0");
    std::vector<int> ia, ib;
    if (cls_i < 0) {
        ia.resize(static_cast<std::size_t>(ps.n()));
        for (int i = 0; i < ps.n(); ++i) ia[static_cast<std::size_t>(i)] = i;
        ib = ia;
    } else {
        ia = ps.indices_of_class(cls_i);
        ib = (cls_j < 0) ? ia : ps.indices_of_class(cls_j);
    }
    if (ia.empty() || ib.empty()) throw invalid_input("pair_correlation: empty class");
    const Rect& rect = ps.region();
    const double h = bandwidth;
    const double tmax = grid.tmax();

    std::vector<std::pair<double, double>> dw;
    for (int a : ia)
        for (int b : ib) {
            if (a == b) continue;
            const double d = std::hypot(ps.point(a).x - ps.point(b).x,
                                        ps.point(a).y - ps.point(b).y);
            if (d >= tmax + h) continue;
            dw.emplace_back(d, detail::edge_weight(ps.point(a), d, rect));
        }

    const double denom = static_cast<double>(ia.size()) * static_cast<double>(ib.size());
    FunctionEstimate est;
    est.t = grid.t;
    est.values.assign(grid.size(), 0.0);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const double t = grid.t[gi];
        double s = 0.0;
        for (const auto& [d, w] : dw) {
            const double u = (t - d) / h;
            if (u <= -1.0 || u >= 1.0) continue;
            s += w * 0.75 * (1.0 - u * u) / h;  // Epanechnikov
        }
        est.values[gi] = s * rect.area() / (2.0 * std::numbers::pi * t * denom);
    }
    const Metric m = Metric::euclidean();
    est.min_reliable_t = std::max(h, ps.n() >= 2 ? mean_nn_distance(ps, m) : h);
    return est;
}

struct Envelope {
    std::vector<double> lower, upper;
    int nsim = 0;
    double band = 0.0;
};

/// Pointwise envelope over nsim null curves: rank r = max(1, floor((1-band)/2
/// * (nsim+1))) smallest/largest per grid point, so band = 1 gives min/max and
/// 39 replicates give the classic 95% rule. Replicate r draws from stream
/// (seed, r); extending nsim with the same seed reuses the earlier curves.
template <typename CurveFn>
Envelope pointwise_envelope(std::size_t len, int nsim, double band, std::uint64_t seed,
                            CurveFn&& fn) {
    if (nsim < 2) throw invalid_input("pointwise_envelope: needs nsim >= 2");
    if (!(band > 0.0) || band > 1.0) throw invalid_input("pointwise_envelope: band in (0,1]");
    std::vector<std::vector<double>> curves(static_cast<std::size_t>(nsim));
    parallel_chunks(static_cast<std::size_t>(nsim), [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r) {
            RngStream rng(seed, r);
            curves[r] = fn(rng, r);
            if (curves[r].size() != len)
                throw invalid_input("pointwise_envelope: curve length mismatch");
        }
    });
    const int r_ext = std::max(1, static_cast<int>(std::floor(0.5 * (1.0 - band) * (nsim + 1))));
    Envelope env;
    env.nsim = nsim;
    env.band = band;
    env.lower.resize(len);
    env.upper.resize(len);
    std::vector<double> col(static_cast<std::size_t>(nsim));
    for (std::size_t g = 0; g < len; ++g) {
        for (int s = 0; s < nsim; ++s) col[static_cast<std::size_t>(s)] = curves[static_cast<std::size_t>(s)][g];
        std::sort(col.begin(), col.end());
        env.lower[g] = col[static_cast<std::size_t>(r_ext - 1)];
        env.upper[g] = col[static_cast<std::size_t>(nsim - r_ext)];
    }
    return env;
}

/// Uniform positions with the same class sizes and region (the CSR
/// independence null for the second-order functions).
inline PointSet csr_replicate(const PointSet& ps, RngStream& rng) {
    std::vector<Point> pts(static_cast<std::size_t>(ps.n()));
    const Rect& r = ps.region();
    for (auto& p : pts) {
        p.x = rng.uniform(r.xmin, r.xmax);
        p.y = rng.uniform(r.ymin, r.ymax);
    }
    return PointSet(std::move(pts), ps.labels(), r);
}

/// Random relabeling of the fixed positions (the RL null).
inline PointSet rl_replicate(const PointSet& ps, RngStream& rng) {
    std::vector<int> labels = ps.labels();
    rng.shuffle(labels);
    return ps.relabeled(std::move(labels));
}

/// Diggle's D(t) = K_case(t) - K_control(t); zero under RL. The envelope is
/// plus/minus two pointwise standard deviations of D over nsim relabelings.
inline FunctionEstimate diggle_d(const PointSet& ps, int case_cls, int control_cls,
                                 const DistanceGrid& grid, int nsim, std::uint64_t seed) {
    auto d_curve = [&](const PointSet& p) {
        const auto k1 = ripley_k_uni(p, case_cls, grid);
        const auto k2 = ripley_k_uni(p, control_cls, grid);
        std::vector<double> d(grid.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = k1.values[i] - k2.values[i];
        return d;
    };
    FunctionEstimate est;
    est.t = grid.t;
    est.values = d_curve(ps);
    if (nsim > 0) {
        std::vector<std::vector<double>> curves(static_cast<std::size_t>(nsim));
        parallel_chunks(static_cast<std::size_t>(nsim),
                        [&](std::size_t, std::size_t b, std::size_t e) {
                            for (std::size_t r = b; r < e; ++r) {
                                RngStream rng(seed, r);
                                curves[r] = d_curve(rl_replicate(ps, rng));
                            }
                        });
        est.nsim = nsim;
        est.band = 0.0;  // +/- 2 SE bands, not quantile bands
        est.lower.resize(grid.size());
        est.upper.resize(grid.size());
        for (std::size_t g = 0; g < grid.size(); ++g) {
            double s = 0.0, s2 = 0.0;
            for (const auto& c : curves) {
                s += c[g];
                s2 += c[g] * c[g];
            }
            const double mean = s / nsim;
            const double var = std::max(0.0, (s2 - s * mean) / std::max(1, nsim - 1));
            const double sd = std::sqrt(var);
            est.lower[g] = -2.0 * sd;
            est.upper[g] = 2.0 * sd;
        }
    }
    return est;
}

} // namespace spatnn
