#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spatnn/moments.hpp"
#include "spatnn/nnct.hpp"
#include "spatnn/nnct_tests.hpp"
#include "spatnn/parallel.hpp"
#include "spatnn/rng.hpp"

namespace spatnn {

enum class PatternKind {
    csr_independence,
    rl_case1,  // uniform positions on the unit square, labels random
    rl_case2,  // two overlapping uniform clusters, labels random
    rl_case3,  // two disjoint clusters, labels random
    segregation,  // X on (0,1-s)^2, Y on (s,1)^2
    association   // Y = random X + polar offset with radius U(0,r)
};

struct PatternSpec {
    PatternKind kind = PatternKind::csr_independence;
    int n1 = 0, n2 = 0;
    double param = 0.0;  // s for segregation, r for association

    static PatternSpec csr(int n1, int n2) { return {PatternKind::csr_independence, n1, n2, 0.0}; }
    static PatternSpec rl1(int n1, int n2) { return {PatternKind::rl_case1, n1, n2, 0.0}; }
    static PatternSpec rl2(int n1, int n2) { return {PatternKind::rl_case2, n1, n2, 0.0}; }
    static PatternSpec rl3(int n1, int n2) { return {PatternKind::rl_case3, n1, n2, 0.0}; }
    static PatternSpec seg(double s, int n1, int n2) {
        if (!(s > 0.0 && s < 1.0)) throw invalid_input("segregation: s must lie in (0,1)");
        return {PatternKind::segregation, n1, n2, s};
    }
    static PatternSpec assoc(double r, int n1, int n2) {
        if (!(r > 0.0 && r < 1.0)) throw invalid_input("association: r must lie in (0,1)");
        return {PatternKind::association, n1, n2, r};
    }

    bool is_null() const {
        return kind == PatternKind::csr_independence || kind == PatternKind::rl_case1 ||
               kind == PatternKind::rl_case2 || kind == PatternKind::rl_case3;
    }

    std::string name() const {
        switch (kind) {
            case PatternKind::csr_independence: return "csr";
            case PatternKind::rl_case1: return "rl1";
            case PatternKind::rl_case2: return "rl2";
            case PatternKind::rl_case3: return "rl3";
            case PatternKind::segregation: return "seg:" + std::to_string(param);
            case PatternKind::association: return "assoc:" + std::to_string(param);
        }
        return "?";
    }
};

namespace detail {

// RL cases fix the locations once per (spec, seed) and only relabel across
// replicates; the location stream id is reserved out of the replicate range.
inline constexpr std::uint64_t kLocationStream = 0x8000000000000000ULL;

inline std::vector<Point> uniform_points(int n, const Rect& r, RngStream& rng) {
    std::vector<Point> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) {
        p.x = rng.uniform(r.xmin, r.xmax);
        p.y = rng.uniform(r.ymin, r.ymax);
    }
    return pts;
}

} // namespace detail

/// Realizes the pattern. For RL cases the positions depend only on (spec,
/// seed) while labels are re-randomized per replicate; everything else is
/// drawn afresh from stream (seed, replicate).
inline PointSet generate(const PatternSpec& spec, std::uint64_t seed, std::uint64_t replicate = 0) {
    if (spec.n1 < 1 || spec.n2 < 1) throw invalid_input("generate: class sizes must be >= 1");
    const int n = spec.n1 + spec.n2;
    const Rect unit = Rect::unit_square();
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i < spec.n1 ? 0 : 1;

    switch (spec.kind) {
        case PatternKind::csr_independence: {
            RngStream rng(seed, replicate);
            return PointSet(detail::uniform_points(n, unit, rng), std::move(labels), unit);
        }
        case PatternKind::rl_case1:
        case PatternKind::rl_case2:
        case PatternKind::rl_case3: {
            RngStream loc(seed, detail::kLocationStream + static_cast<std::uint64_t>(spec.kind));
            std::vector<Point> pts;
            Rect region = unit;
            if (spec.kind == PatternKind::rl_case1) {
                pts = detail::uniform_points(n, unit, loc);
            } else if (spec.kind == PatternKind::rl_case2) {
                pts = detail::uniform_points(spec.n1, Rect(0.0, 0.0, 2.0 / 3.0, 2.0 / 3.0), loc);
                const auto more =
                    detail::uniform_points(spec.n2, Rect(1.0 / 3.0, 1.0 / 3.0, 1.0, 1.0), loc);
                pts.insert(pts.end(), more.begin(), more.end());
            } else {
                pts = detail::uniform_points(spec.n1, unit, loc);
                const auto more = detail::uniform_points(spec.n2, Rect(2.0, 0.0, 3.0, 1.0), loc);
                pts.insert(pts.end(), more.begin(), more.end());
                region = Rect(0.0, 0.0, 3.0, 1.0);
            }
            RngStream rng(seed, replicate);
            rng.shuffle(labels);
            return PointSet(std::move(pts), std::move(labels), region);
        }
        case PatternKind::segregation: {
            RngStream rng(seed, replicate);
            const double s = spec.param;
            auto pts = detail::uniform_points(spec.n1, Rect(0.0, 0.0, 1.0 - s, 1.0 - s), rng);
            const auto ypts = detail::uniform_points(spec.n2, Rect(s, s, 1.0, 1.0), rng);
            pts.insert(pts.end(), ypts.begin(), ypts.end());
            return PointSet(std::move(pts), std::move(labels), unit);
        }
        case PatternKind::association: {
            RngStream rng(seed, replicate);
            auto pts = detail::uniform_points(spec.n1, unit, rng);
            pts.reserve(static_cast<std::size_t>(n));
            for (int j = 0; j < spec.n2; ++j) {
                const auto& anchor = pts[rng.below(static_cast<std::uint64_t>(spec.n1))];
                // resample the polar offset until Y lands inside the unit square
                Point y{};
                do {
                    const double rad = rng.uniform(0.0, spec.param);
                    const double th = rng.angle();
                    y = {anchor.x + rad * std::cos(th), anchor.y + rad * std::sin(th)};
                } while (!unit.contains(y));
                pts.push_back(y);
            }
            return PointSet(std::move(pts), std::move(labels), unit);
        }
    }
    throw invalid_input("generate: unknown pattern kind");
}

struct TestRate {
    std::string name;
    long long rejections = 0;
    double rate = 0.0;
    double se = 0.0;
    int flag = 0;  // -1 conservative, 0 about right, +1 liberal; null patterns only
};

struct SizePowerReport {
    PatternSpec spec;
    int nmc = 0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::vector<TestRate> tests;
};

/// Core rejection-rate loop. `per_replicate` maps a realized pattern to one
/// asymptotic p-value per named test; replicate r uses stream (seed, r) for
/// generation and gets an auxiliary stream (seed, r + 2^62) for stub tests.
template <typename PFn>
SizePowerReport empirical_rates_custom(const PatternSpec& spec,
                                       const std::vector<std::string>& names, PFn&& per_replicate,
                                       int nmc, double alpha, std::uint64_t seed) {
    if (nmc < 1) throw invalid_input("empirical rates: nmc must be >= 1");
    const std::size_t ntests = names.size();
    const std::size_t workers = std::min<std::size_t>(thread_count(), static_cast<std::size_t>(nmc));
    std::vector<std::vector<long long>> partial(std::max<std::size_t>(workers, 1),
                                                std::vector<long long>(ntests, 0));
    parallel_chunks(static_cast<std::size_t>(nmc), [&](std::size_t chunk, std::size_t b, std::size_t e) {
        auto& rej = partial[chunk];
        for (std::size_t r = b; r < e; ++r) {
            const PointSet ps = generate(spec, seed, r);
            RngStream aux(seed, r + (1ULL << 62));
            const std::vector<double> pvals = per_replicate(ps, aux);
            for (std::size_t t = 0; t < ntests; ++t)
                if (pvals[t] <= alpha) ++rej[t];
        }
    });

    SizePowerReport rep;
    rep.spec = spec;
    rep.nmc = nmc;
    rep.alpha = alpha;
    rep.seed = seed;
    const double se0 = std::sqrt(alpha * (1.0 - alpha) / nmc);
    for (std::size_t t = 0; t < ntests; ++t) {
        TestRate tr;
        tr.name = names[t];
        for (const auto& p : partial) tr.rejections += p[t];
        tr.rate = static_cast<double>(tr.rejections) / nmc;
        tr.se = std::sqrt(std::max(0.0, tr.rate * (1.0 - tr.rate)) / nmc);
        if (spec.is_null()) {
            // one-sided 5% binomial bounds around the nominal level, the
            // thresholds behind the conservative/liberal marks
            if (tr.rate < alpha - 1.645 * se0) tr.flag = -1;
            else if (tr.rate > alpha + 1.645 * se0) tr.flag = +1;
        }
        rep.tests.push_back(std::move(tr));
    }
    return rep;
}

/// Asymptotic p-values of the overall NNCT battery on one realized pattern.
inline std::vector<double> nnct_battery_pvalues(const PointSet& ps,
                                                const std::vector<Method>& methods,
                                                const McCorrection& corr = McCorrection()) {
    const NNGraph g = build_nngraph(ps, Metric::euclidean());
    const Nnct t = build_nnct(ps, g);
    const CellMoments cm = analytic_moments_2class(t.row_sums(), g.Q, g.R);
    std::vector<double> out;
    out.reserve(methods.size());
    for (Method m : methods)
        out.push_back(*evaluate_nnct_method(m, t, cm, corr).p_asymptotic);
    return out;
}

inline SizePowerReport empirical_size(const PatternSpec& spec, const std::vector<Method>& tests,
                                      int nmc, double alpha, std::uint64_t seed) {
    if (!spec.is_null()) throw invalid_input("empirical_size: spec must be a null pattern");
    std::vector<std::string> names;
    for (Method m : tests) names.emplace_back(method_name(m));
    return empirical_rates_custom(
        spec, names,
        [&](const PointSet& ps, RngStream&) { return nnct_battery_pvalues(ps, tests); }, nmc,
        alpha, seed);
}

inline SizePowerReport empirical_power(const PatternSpec& spec, const std::vector<Method>& tests,
                                       int nmc, double alpha, std::uint64_t seed) {
    if (spec.is_null()) throw invalid_input("empirical_power: spec must be an alternative");
    std::vector<std::string> names;
    for (Method m : tests) names.emplace_back(method_name(m));
    return empirical_rates_custom(
        spec, names,
        [&](const PointSet& ps, RngStream&) { return nnct_battery_pvalues(ps, tests); }, nmc,
        alpha, seed);
}

/// Pielou statistics over nmc CSR replicates plus the fitted location/scale
/// correction; criterion inputs for re-deriving gamma and delta.
struct CorrectionFit {
    double mean = 0.0;
    double variance = 0.0;
    McCorrection corr;
    int nmc = 0;
};

inline CorrectionFit fit_correction_csr(int n1, int n2, int nmc, std::uint64_t seed) {
    const PatternSpec spec = PatternSpec::csr(n1, n2);
    std::vector<double> xp(static_cast<std::size_t>(nmc));
    parallel_chunks(static_cast<std::size_t>(nmc), [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r) {
            const PointSet ps = generate(spec, seed, r);
            const NNGraph g = build_nngraph(ps, Metric::euclidean());
            xp[r] = pielou(build_nnct(ps, g)).statistic;
        }
    });
    CorrectionFit out;
    out.nmc = nmc;
    out.corr = fit_mc_correction(xp);
    double s = 0.0;
    for (double v : xp) s += v;
    out.mean = s / nmc;
    double ss = 0.0;
    for (double v : xp) ss += (v - out.mean) * (v - out.mean);
    out.variance = ss / std::max(1, nmc - 1);
    return out;
}

} // namespace spatnn
