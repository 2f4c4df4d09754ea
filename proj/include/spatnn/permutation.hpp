#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "spatnn/errors.hpp"
#include "spatnn/parallel.hpp"
#include "spatnn/rng.hpp"

namespace spatnn {

struct PermutationResult {
    double pvalue = 1.0;
    long long replicates = 0;
    bool exhaustive = false;
    double stat_mean = 0.0;
    double stat_sd = 0.0;
};

/// Number of distinct labelings of the class-size multiset (multinomial
/// coefficient), saturated at `cap` to keep the check cheap.
inline long long distinct_labelings(std::vector<int> labels, long long cap = (1LL << 62)) {
    std::sort(labels.begin(), labels.end());
    long long total = 1;
    long long n = 0;
    int run = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ++n;
        run = (i > 0 && labels[i] == labels[i - 1]) ? run + 1 : 1;
        // total *= n / run stays integral along this order
        total = total * n / run;
        if (total > cap) return cap;
    }
    return total;
}

/// Monte Carlo permutation p-value over random relabelings of fixed
/// positions: p = (1 + #{replicate stat >= observed}) / (nperm + 1).
/// Replicate r draws its labels from stream (seed, r); deterministic for a
/// fixed seed whatever the worker count.
template <typename StatFn>
PermutationResult permutation_pvalue(const std::vector<int>& base_labels, double observed,
                                     StatFn&& stat, int nperm, std::uint64_t seed) {
    if (nperm < 1) throw invalid_input("permutation_pvalue: nperm must be >= 1");
    struct Acc {
        long long ge = 0;
        double sum = 0.0, sum2 = 0.0;
    };
    const std::size_t workers =
        std::min<std::size_t>(thread_count(), static_cast<std::size_t>(nperm));
    std::vector<Acc> acc(std::max<std::size_t>(workers, 1));
    parallel_chunks(static_cast<std::size_t>(nperm),
                    [&](std::size_t chunk, std::size_t b, std::size_t e) {
                        auto& a = acc[chunk];
                        std::vector<int> labels;
                        for (std::size_t r = b; r < e; ++r) {
                            RngStream rng(seed, r);
                            labels = base_labels;
                            rng.shuffle(labels);
                            const double s = stat(labels);
                            if (s >= observed) ++a.ge;
                            a.sum += s;
                            a.sum2 += s * s;
                        }
                    });
    long long ge = 0;
    double sum = 0.0, sum2 = 0.0;
    for (const auto& a : acc) {
        ge += a.ge;
        sum += a.sum;
        sum2 += a.sum2;
    }
    PermutationResult out;
    out.replicates = nperm;
    out.pvalue = static_cast<double>(1 + ge) / static_cast<double>(nperm + 1);
    out.stat_mean = sum / nperm;
    const double var = (sum2 - sum * sum / nperm) / std::max(1, nperm - 1);
    out.stat_sd = var > 0.0 ? std::sqrt(var) : 0.0;
    return out;
}

/// Exact conditional p-value by enumerating every distinct labeling:
/// p = #{stat >= observed} / total. The observed labeling is one of them.
template <typename StatFn>
PermutationResult exhaustive_permutation_pvalue(const std::vector<int>& base_labels,
                                                double observed, StatFn&& stat) {
    std::vector<int> labels = base_labels;
    std::sort(labels.begin(), labels.end());
    long long ge = 0, total = 0;
    double sum = 0.0, sum2 = 0.0;
    do {
        const double s = stat(labels);
        if (s >= observed) ++ge;
        sum += s;
        sum2 += s * s;
        ++total;
    } while (std::next_permutation(labels.begin(), labels.end()));
    PermutationResult out;
    out.exhaustive = true;
    out.replicates = total;
    out.pvalue = static_cast<double>(ge) / static_cast<double>(total);
    out.stat_mean = sum / static_cast<double>(total);
    const double var = (sum2 - sum * sum / static_cast<double>(total)) /
                       static_cast<double>(std::max<long long>(1, total - 1));
    out.stat_sd = var > 0.0 ? std::sqrt(var) : 0.0;
    return out;
}

} // namespace spatnn
