#pragma once

// Internal header: requires the Point/Metric types from spatnn/geometry.hpp,
// which includes this file at the right position. Do not include directly.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace spatnn {

/// 2-d kd-tree over a fixed point cloud, metric-aware (plain or toroidal).
///
/// k-NN queries reproduce the brute-force result bit for bit, including the
/// lowest-index rule for equidistant neighbors: candidates are ordered by
/// (squared distance, index) and subtrees are pruned only when their box
/// distance strictly exceeds the current worst candidate.
class KdTree {
public:
    KdTree(const std::vector<Point>& pts, const Metric& metric)
        : pts_(pts), metric_(metric) {
        idx_.resize(pts_.size());
        for (std::size_t i = 0; i < idx_.size(); ++i) idx_[i] = static_cast<int>(i);
        nodes_.reserve(2 * pts_.size() / kLeafSize + 2);
        root_ = build(0, static_cast<int>(pts_.size()));
    }

    /// Indices of the k nearest points to `query`, excluding `exclude`,
    /// sorted by (distance, index).
    std::vector<int> knn(Point query, int k, int exclude = -1) const {
        Best best;
        best.k = k;
        search(root_, query, exclude, best);
        std::sort(best.items.begin(), best.items.end());
        std::vector<int> out(best.items.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = best.items[i].second;
        return out;
    }

private:
    static constexpr int kLeafSize = 16;

    struct Node {
        double split = 0.0;
        int axis = -1;       // -1 marks a leaf
        int lo = 0, hi = 0;  // leaf range in idx_
        int left = -1, right = -1;
        double bx0 = 0, bx1 = 0, by0 = 0, by1 = 0;  // bounding box of the subtree
    };

    struct Best {
        int k = 0;
        std::vector<std::pair<double, int>> items;  // max at front once full

        double worst_d2() const { return items.front().first; }
        int worst_idx() const { return items.front().second; }
        bool full() const { return static_cast<int>(items.size()) == k; }

        void offer(double d2, int idx) {
            if (!full()) {
                items.emplace_back(d2, idx);
                std::push_heap(items.begin(), items.end());
                return;
            }
            if (std::pair<double, int>{d2, idx} < items.front()) {
                std::pop_heap(items.begin(), items.end());
                items.back() = {d2, idx};
                std::push_heap(items.begin(), items.end());
            }
        }
    };

    int build(int lo, int hi) {
        Node nd;
        nd.bx0 = nd.bx1 = pts_[static_cast<std::size_t>(idx_[static_cast<std::size_t>(lo)])].x;
        nd.by0 = nd.by1 = pts_[static_cast<std::size_t>(idx_[static_cast<std::size_t>(lo)])].y;
        for (int t = lo; t < hi; ++t) {
            const Point& p = pts_[static_cast<std::size_t>(idx_[static_cast<std::size_t>(t)])];
            nd.bx0 = std::min(nd.bx0, p.x);
            nd.bx1 = std::max(nd.bx1, p.x);
            nd.by0 = std::min(nd.by0, p.y);
            nd.by1 = std::max(nd.by1, p.y);
        }
        if (hi - lo <= kLeafSize) {
            nd.lo = lo;
            nd.hi = hi;
            nodes_.push_back(nd);
            return static_cast<int>(nodes_.size()) - 1;
        }
        nd.axis = (nd.bx1 - nd.bx0 >= nd.by1 - nd.by0) ? 0 : 1;
        const int mid = (lo + hi) / 2;
        auto key = [&](int i) {
            const Point& p = pts_[static_cast<std::size_t>(i)];
            return nd.axis == 0 ? p.x : p.y;
        };
        std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                         [&](int a, int b) { return key(a) < key(b); });
        nd.split = key(idx_[static_cast<std::size_t>(mid)]);
        const int self = static_cast<int>(nodes_.size());
        nodes_.push_back(nd);
        const int left = build(lo, mid);
        const int right = build(mid, hi);
        nodes_[static_cast<std::size_t>(self)].left = left;
        nodes_[static_cast<std::size_t>(self)].right = right;
        return self;
    }

    // Squared min distance from q to the node's bounding box under the metric.
    double box_dist2(const Node& nd, Point q) const {
        const double dx = axis_dist(q.x, nd.bx0, nd.bx1, metric_.region().width());
        const double dy = axis_dist(q.y, nd.by0, nd.by1, metric_.region().height());
        return dx * dx + dy * dy;
    }

    double axis_dist(double x, double lo, double hi, double period) const {
        auto flat = [&](double v) { return v < lo ? lo - v : (v > hi ? v - hi : 0.0); };
        double d = flat(x);
        if (metric_.kind() == MetricKind::toroidal)
            d = std::min({d, flat(x - period), flat(x + period)});
        return d;
    }

    void search(int node, Point q, int exclude, Best& best) const {
        const Node& nd = nodes_[static_cast<std::size_t>(node)];
        if (best.full()) {
            const double bd = box_dist2(nd, q);
            const auto worst = std::pair<double, int>{best.worst_d2(), best.worst_idx()};
            // A box at exactly the worst distance can still hold a lower index.
            if (std::pair<double, int>{bd, -1} > worst) return;
        }
        if (nd.axis < 0) {
            for (int t = nd.lo; t < nd.hi; ++t) {
                const int i = idx_[static_cast<std::size_t>(t)];
                if (i == exclude) continue;
                best.offer(metric_.dist2(q, pts_[static_cast<std::size_t>(i)]), i);
            }
            return;
        }
        const double qv = nd.axis == 0 ? q.x : q.y;
        const int first = qv < nd.split ? nd.left : nd.right;
        const int second = qv < nd.split ? nd.right : nd.left;
        search(first, q, exclude, best);
        search(second, q, exclude, best);
    }

    const std::vector<Point>& pts_;
    Metric metric_;
    std::vector<int> idx_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

} // namespace spatnn
