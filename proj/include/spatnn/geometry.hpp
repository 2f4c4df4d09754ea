#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "spatnn/errors.hpp"

namespace spatnn {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Rect {
    double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;

    Rect() = default;
    Rect(double x0, double y0, double x1, double y1) : xmin(x0), ymin(y0), xmax(x1), ymax(y1) {
        if (!(xmin < xmax) || !(ymin < ymax))
            throw invalid_input("Rect: requires xmin < xmax and ymin < ymax");
    }

    static Rect unit_square() { return Rect(0.0, 0.0, 1.0, 1.0); }

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
    double min_side() const { return std::min(width(), height()); }

    bool contains(Point p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }

    /// Distance from an interior point to the nearest boundary edge.
    double boundary_distance(Point p) const {
        return std::min(std::min(p.x - xmin, xmax - p.x), std::min(p.y - ymin, ymax - p.y));
    }

    Rect shrunk(double w) const { return Rect(xmin + w, ymin + w, xmax - w, ymax - w); }
};

enum class MetricKind { euclidean, toroidal };

/// Distance on the plane or on the torus obtained by identifying opposite
/// edges of a rectangle (toroidal edge correction).
class Metric {
public:
    static Metric euclidean() { return Metric(MetricKind::euclidean, Rect()); }
    static Metric toroidal(const Rect& region) { return Metric(MetricKind::toroidal, region); }

    MetricKind kind() const { return kind_; }
    const Rect& region() const { return region_; }

    double dist2(Point a, Point b) const {
        double dx = std::abs(a.x - b.x);
        double dy = std::abs(a.y - b.y);
        if (kind_ == MetricKind::toroidal) {
            dx = std::min(dx, region_.width() - dx);
            dy = std::min(dy, region_.height() - dy);
        }
        return dx * dx + dy * dy;
    }

    double dist(Point a, Point b) const { return std::sqrt(dist2(a, b)); }

private:
    Metric(MetricKind kind, const Rect& region) : kind_(kind), region_(region) {}
    MetricKind kind_;
    Rect region_;
};

/// Labeled planar point pattern with its rectangular study region.
///
/// Invariants enforced at construction: at least one point, labels cover
/// 0..q-1 with every class present, all coordinates inside the region.
class PointSet {
public:
    PointSet(std::vector<Point> coords, std::vector<int> labels, const Rect& region)
        : pts_(std::move(coords)), labels_(std::move(labels)), region_(region) {
        validate();
    }

    /// Region defaults to the bounding box of the data.
    PointSet(std::vector<Point> coords, std::vector<int> labels)
        : pts_(std::move(coords)), labels_(std::move(labels)), region_(bbox(pts_)) {
        validate();
    }

    int n() const { return static_cast<int>(pts_.size()); }
    int num_classes() const { return q_; }
    Point point(int i) const { return pts_[static_cast<std::size_t>(i)]; }
    int label(int i) const { return labels_[static_cast<std::size_t>(i)]; }
    const std::vector<Point>& points() const { return pts_; }
    const std::vector<int>& labels() const { return labels_; }
    const Rect& region() const { return region_; }

    int class_size(int c) const { return class_sizes_[static_cast<std::size_t>(c)]; }
    const std::vector<int>& class_sizes() const { return class_sizes_; }

    std::vector<int> indices_of_class(int c) const {
        std::vector<int> out;
        for (int i = 0; i < n(); ++i)
            if (labels_[static_cast<std::size_t>(i)] == c) out.push_back(i);
        return out;
    }

    /// Same positions, different labels (sizes per class may change but every
    /// class 0..q-1 must stay represented).
    PointSet relabeled(std::vector<int> labels) const {
        return PointSet(pts_, std::move(labels), region_);
    }

private:
    static Rect bbox(const std::vector<Point>& pts) {
        if (pts.empty()) throw invalid_input("PointSet: needs at least one point");
        double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
        for (const auto& p : pts) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
        // Degenerate (collinear) data still needs a valid rectangle.
        const double pad_x = (x1 - x0 > 0.0) ? 0.0 : std::max(1.0, std::abs(x0));
        const double pad_y = (y1 - y0 > 0.0) ? 0.0 : std::max(1.0, std::abs(y0));
        return Rect(x0 - pad_x, y0 - pad_y, x1 + pad_x, y1 + pad_y);
    }

    void validate() {
        if (pts_.empty()) throw invalid_input("PointSet: needs at least one point");
        if (pts_.size() != labels_.size())
            throw invalid_input("PointSet: coords and labels differ in length");
        int q = 0;
        for (int l : labels_) {
            if (l < 0) throw invalid_input("PointSet: negative class label");
            q = std::max(q, l + 1);
        }
        q_ = q;
        class_sizes_.assign(static_cast<std::size_t>(q_), 0);
        for (int l : labels_) ++class_sizes_[static_cast<std::size_t>(l)];
        for (int c = 0; c < q_; ++c)
            if (class_sizes_[static_cast<std::size_t>(c)] == 0)
                throw invalid_input("PointSet: class " + std::to_string(c) + " has no members");
        for (const auto& p : pts_)
            if (!region_.contains(p))
                throw invalid_input("PointSet: point outside the study region");
    }

    std::vector<Point> pts_;
    std::vector<int> labels_;
    Rect region_;
    int q_ = 0;
    std::vector<int> class_sizes_;
};

struct NnResult {
    int nn_id = -1;
    double dist = 0.0;
};

enum class SearchPolicy { automatic, brute_force, indexed };

// Spatial index kicks in above this size under the automatic policy.
inline constexpr int kBruteForceCutoff = 512;

std::vector<NnResult> nn_index(const PointSet& ps, const Metric& m,
                               SearchPolicy policy = SearchPolicy::automatic);
std::vector<std::vector<int>> knn_index(const PointSet& ps, int k, const Metric& m,
                                        SearchPolicy policy = SearchPolicy::automatic);

enum class BufferMode { inner, outer };

/// Marks the points eligible as base points once a buffer frame of the given
/// width is discarded. NN queries still search all points; only base-point
/// status changes.
inline std::vector<bool> buffer_filter(const PointSet& ps, double width, BufferMode mode) {
    if (width < 0.0) throw invalid_input("buffer_filter: width must be >= 0");
    const Rect& r = ps.region();
    if (width > 0.0 && (2.0 * width >= r.width() || 2.0 * width >= r.height()))
        throw invalid_input("buffer_filter: buffer width leaves an empty analysis region");
    std::vector<bool> mask(static_cast<std::size_t>(ps.n()), true);
    if (width == 0.0) return mask;
    const Rect inner = r.shrunk(width);
    for (int i = 0; i < ps.n(); ++i) {
        const Point p = ps.point(i);
        mask[static_cast<std::size_t>(i)] =
            (mode == BufferMode::inner) ? r.boundary_distance(p) >= width : inner.contains(p);
    }
    return mask;
}

/// Average NN distance, the recommended default buffer width.
inline double mean_nn_distance(const PointSet& ps, const Metric& m) {
    const auto nn = nn_index(ps, m);
    double s = 0.0;
    for (const auto& r : nn) s += r.dist;
    return s / static_cast<double>(nn.size());
}

} // namespace spatnn

#include "spatnn/detail/kdtree.hpp"

namespace spatnn {

namespace detail {

inline std::vector<std::vector<int>> knn_brute(const PointSet& ps, int k, const Metric& m) {
    const int n = ps.n();
    std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
    std::vector<std::pair<double, int>> cand(static_cast<std::size_t>(n - 1));
    for (int i = 0; i < n; ++i) {
        std::size_t c = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            cand[c++] = {m.dist2(ps.point(i), ps.point(j)), j};
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        auto& lst = out[static_cast<std::size_t>(i)];
        lst.resize(static_cast<std::size_t>(k));
        for (int t = 0; t < k; ++t) lst[static_cast<std::size_t>(t)] = cand[static_cast<std::size_t>(t)].second;
    }
    return out;
}

} // namespace detail

inline std::vector<std::vector<int>> knn_index(const PointSet& ps, int k, const Metric& m,
                                               SearchPolicy policy) {
    if (ps.n() < 2) throw invalid_input("knn_index: needs at least 2 points");
    if (k < 1 || k >= ps.n()) throw invalid_input("knn_index: requires 1 <= k <= n-1");
    const bool use_index = policy == SearchPolicy::indexed ||
                           (policy == SearchPolicy::automatic && ps.n() > kBruteForceCutoff);
    if (!use_index) return detail::knn_brute(ps, k, m);
    KdTree tree(ps.points(), m);
    const int n = ps.n();
    std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = tree.knn(ps.point(i), k, i);
    return out;
}

inline std::vector<NnResult> nn_index(const PointSet& ps, const Metric& m, SearchPolicy policy) {
    if (ps.n() < 2) throw invalid_input("nn_index: needs at least 2 points");
    const auto lists = knn_index(ps, 1, m, policy);
    std::vector<NnResult> out(lists.size());
    for (std::size_t i = 0; i < lists.size(); ++i) {
        const int j = lists[i][0];
        out[i] = {j, m.dist(ps.point(static_cast<int>(i)), ps.point(j))};
    }
    return out;
}

} // namespace spatnn
