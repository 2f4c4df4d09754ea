#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "spatnn/nnct.hpp"
#include "spatnn/rng.hpp"

using namespace spatnn;

namespace {

// Definition-level Q and R: a double loop over ordered pairs of points.
std::pair<long long, int> q_r_by_definition(const NNGraph& g) {
    long long q = 0;
    int r = 0;
    const int n = g.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (g.nn_id[static_cast<std::size_t>(i)] == g.nn_id[static_cast<std::size_t>(j)]) ++q;
            if (g.nn_id[static_cast<std::size_t>(i)] == j &&
                g.nn_id[static_cast<std::size_t>(j)] == i)
                ++r;  // counts each reflexive pair twice, which is R
        }
    return {q, r};
}

} // namespace

TEST_CASE("NN graph on tiny configurations") {
    SECTION("two points: one reflexive pair") {
        const PointSet ps({{0, 0}, {1, 0}}, {0, 1});
        const auto g = build_nngraph(ps, Metric::euclidean());
        CHECK(g.Q == 0);
        CHECK(g.R == 2);
        CHECK(g.indegree == std::vector<int>{1, 1});
    }
    SECTION("collinear x = 0,1,3") {
        const PointSet ps({{0, 0}, {1, 0}, {3, 0}}, {0, 0, 0});
        const auto g = build_nngraph(ps, Metric::euclidean());
        CHECK(g.indegree == std::vector<int>{1, 2, 0});
        REQUIRE(g.qk.size() >= 3);
        CHECK(g.qk[2] == 1);
        CHECK(g.Q == 2);
        CHECK(g.R == 2);
    }
}

TEST_CASE("every point has exactly one NN: sum k Qk = n") {
    RngStream rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 10 + static_cast<int>(rng.below(40));
        std::vector<Point> pts;
        for (int i = 0; i < n; ++i) pts.push_back({rng.u01(), rng.u01()});
        const PointSet ps(std::move(pts), std::vector<int>(static_cast<std::size_t>(n), 0));
        const auto g = build_nngraph(ps, Metric::euclidean());
        long long total = 0;
        for (std::size_t k = 0; k < g.qk.size(); ++k)
            total += static_cast<long long>(k) * g.qk[k];
        CHECK(total == n);
        CHECK(g.R % 2 == 0);
        CHECK(g.R <= n);
        CHECK(g.Q >= 0);
    }
}

TEST_CASE("Q and R: expansion equals definition on all small grid configurations") {
    // every subset of size 2..6 of a 3x3 integer grid
    std::vector<Point> grid;
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) grid.push_back({static_cast<double>(x), static_cast<double>(y)});
    int checked = 0;
    for (int size = 2; size <= 6; ++size) {
        std::vector<int> pick(9, 0);
        std::fill(pick.end() - size, pick.end(), 1);
        do {
            std::vector<Point> pts;
            for (int i = 0; i < 9; ++i)
                if (pick[static_cast<std::size_t>(i)]) pts.push_back(grid[static_cast<std::size_t>(i)]);
            const PointSet ps(std::move(pts),
                              std::vector<int>(static_cast<std::size_t>(size), 0),
                              Rect(-0.5, -0.5, 2.5, 2.5));
            const auto g = build_nngraph(ps, Metric::euclidean());
            const auto [qdef, rdef] = q_r_by_definition(g);
            REQUIRE(g.Q == qdef);
            REQUIRE(g.R == rdef);
            ++checked;
        } while (std::next_permutation(pick.begin(), pick.end()));
    }
    CHECK(checked == 36 + 84 + 126 + 126 + 84);
}

TEST_CASE("NNCT construction") {
    SECTION("two points, two classes") {
        const PointSet ps({{0, 0}, {1, 0}}, {0, 1});
        const auto g = build_nngraph(ps, Metric::euclidean());
        const auto t = build_nnct(ps, g);
        CHECK(t.count(0, 0) == 0);
        CHECK(t.count(0, 1) == 1);
        CHECK(t.count(1, 0) == 1);
        CHECK(t.count(1, 1) == 0);
        CHECK(t.n() == 2);
    }
    SECTION("row sums equal class sizes and column sums total n") {
        RngStream rng(8);
        std::vector<Point> pts;
        std::vector<int> labels;
        for (int i = 0; i < 60; ++i) {
            pts.push_back({rng.u01(), rng.u01()});
            labels.push_back(static_cast<int>(rng.below(3)));
        }
        labels[0] = 0; labels[1] = 1; labels[2] = 2;
        const PointSet ps(std::move(pts), labels);
        const auto g = build_nngraph(ps, Metric::euclidean());
        const auto t = build_nnct(ps, g);
        for (int c = 0; c < 3; ++c) CHECK(t.row_sum(c) == ps.class_size(c));
        CHECK(t.col_sum(0) + t.col_sum(1) + t.col_sum(2) == 60);
    }
    SECTION("mask that empties a class row is degenerate") {
        const PointSet ps({{0.5, 0.5}, {0.05, 0.5}, {0.6, 0.5}}, {0, 1, 0}, Rect::unit_square());
        const auto g = build_nngraph(ps, Metric::euclidean());
        const std::vector<bool> mask{true, false, true};  // removes the only class-1 base
        CHECK_THROWS_AS(build_nnct(ps, g, &mask), degenerate_table);
    }
}

TEST_CASE("permuting point order leaves Q, R, Qk, and the NNCT unchanged") {
    RngStream rng(77);
    std::vector<Point> pts;
    std::vector<int> labels;
    for (int i = 0; i < 50; ++i) {
        pts.push_back({rng.u01(), rng.u01()});
        labels.push_back(static_cast<int>(rng.below(2)));
    }
    labels[0] = 0; labels[1] = 1;
    const PointSet ps(pts, labels);
    const auto g = build_nngraph(ps, Metric::euclidean());
    const auto t = build_nnct(ps, g);

    std::vector<int> order(50);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<Point> pts2;
    std::vector<int> labels2;
    for (int i : order) {
        pts2.push_back(pts[static_cast<std::size_t>(i)]);
        labels2.push_back(labels[static_cast<std::size_t>(i)]);
    }
    const PointSet ps2(pts2, labels2);
    const auto g2 = build_nngraph(ps2, Metric::euclidean());
    const auto t2 = build_nnct(ps2, g2);

    CHECK(g.Q == g2.Q);
    CHECK(g.R == g2.R);
    CHECK(g.qk == g2.qk);
    CHECK(t.counts() == t2.counts());
}

TEST_CASE("relabeling classes permutes the NNCT accordingly") {
    RngStream rng(99);
    std::vector<Point> pts;
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) {
        pts.push_back({rng.u01(), rng.u01()});
        labels.push_back(static_cast<int>(rng.below(2)));
    }
    labels[0] = 0; labels[1] = 1;
    const PointSet ps(pts, labels);
    const auto g = build_nngraph(ps, Metric::euclidean());
    const auto t = build_nnct(ps, g);

    std::vector<int> swapped;
    for (int l : labels) swapped.push_back(1 - l);
    const PointSet ps2 = ps.relabeled(swapped);
    const auto g2 = build_nngraph(ps2, Metric::euclidean());
    const auto t2 = build_nnct(ps2, g2);

    CHECK(g2.Q == g.Q);
    CHECK(g2.R == g.R);
    CHECK(t2.count(0, 0) == t.count(1, 1));
    CHECK(t2.count(0, 1) == t.count(1, 0));
    CHECK(t2.count(1, 0) == t.count(0, 1));
    CHECK(t2.count(1, 1) == t.count(0, 0));
}

TEST_CASE("nnct_counts matches build_nnct on relabelings") {
    RngStream rng(13);
    std::vector<Point> pts;
    std::vector<int> labels;
    for (int i = 0; i < 30; ++i) {
        pts.push_back({rng.u01(), rng.u01()});
        labels.push_back(i < 12 ? 0 : 1);
    }
    const PointSet ps(pts, labels);
    const auto g = build_nngraph(ps, Metric::euclidean());
    for (int trial = 0; trial < 10; ++trial) {
        auto l2 = labels;
        rng.shuffle(l2);
        const auto counts = nnct_counts(l2, 2, g);
        const auto t = build_nnct(ps.relabeled(l2), g);
        CHECK(counts == t.counts());
    }
}

TEST_CASE("Nnct validation") {
    CHECK_THROWS_AS(Nnct(2, {1, 2, 3}), invalid_input);
    CHECK_THROWS_AS(Nnct(2, {1, 2, 3, -1}), invalid_input);
    const Nnct t(2, {137, 23, 38, 30});
    CHECK(t.row_sum(0) == 160);
    CHECK(t.col_sum(0) == 175);
    CHECK(t.n() == 228);
}
