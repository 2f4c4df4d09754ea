#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spatnn/geometry.hpp"
#include "spatnn/rng.hpp"

using namespace spatnn;

namespace {

PointSet uniform_points(int n, std::uint64_t seed, const Rect& r = Rect::unit_square(),
                        int q = 1) {
    RngStream rng(seed);
    std::vector<Point> pts(static_cast<std::size_t>(n));
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        pts[static_cast<std::size_t>(i)] = {rng.uniform(r.xmin, r.xmax), rng.uniform(r.ymin, r.ymax)};
        labels[static_cast<std::size_t>(i)] = i % q;
    }
    return PointSet(std::move(pts), std::move(labels), r);
}

PointSet line_points(std::vector<double> xs) {
    std::vector<Point> pts;
    for (double x : xs) pts.push_back({x, 0.0});
    return PointSet(std::move(pts), std::vector<int>(xs.size(), 0));
}

} // namespace

TEST_CASE("nearest neighbors on tiny configurations") {
    SECTION("three collinear points") {
        const auto nn = nn_index(line_points({0, 1, 3}), Metric::euclidean());
        CHECK(nn[0].nn_id == 1);
        CHECK(nn[1].nn_id == 0);
        CHECK(nn[2].nn_id == 1);
        CHECK(nn[2].dist == Catch::Approx(2.0));
    }
    SECTION("two points are mutual NNs") {
        const auto nn = nn_index(line_points({0, 1}), Metric::euclidean());
        CHECK(nn[0].nn_id == 1);
        CHECK(nn[1].nn_id == 0);
    }
    SECTION("equidistant tie goes to the lowest index") {
        const auto nn = nn_index(line_points({0, 1, 2, 3}), Metric::euclidean());
        CHECK(nn[1].nn_id == 0);  // tie between 0 and 2 at distance 1
        CHECK(nn[2].nn_id == 1);
    }
    SECTION("fewer than two points is an error") {
        CHECK_THROWS_AS(nn_index(line_points({0}), Metric::euclidean()), invalid_input);
    }
}

TEST_CASE("knn lists") {
    SECTION("line x = 0,1,3 with k = 2") {
        const auto knn = knn_index(line_points({0, 1, 3}), 2, Metric::euclidean());
        CHECK(knn[2] == std::vector<int>{1, 0});
    }
    SECTION("k = 1 reduces to nn_index") {
        const auto ps = uniform_points(60, 4);
        const auto nn = nn_index(ps, Metric::euclidean());
        const auto knn = knn_index(ps, 1, Metric::euclidean());
        for (int i = 0; i < ps.n(); ++i)
            CHECK(knn[static_cast<std::size_t>(i)][0] == nn[static_cast<std::size_t>(i)].nn_id);
    }
    SECTION("k out of range") {
        CHECK_THROWS_AS(knn_index(line_points({0, 1, 3}), 3, Metric::euclidean()), invalid_input);
    }
    SECTION("prefix consistency in k") {
        const auto ps = uniform_points(40, 9);
        const auto k3 = knn_index(ps, 3, Metric::euclidean());
        const auto k4 = knn_index(ps, 4, Metric::euclidean());
        for (int i = 0; i < ps.n(); ++i)
            for (int t = 0; t < 3; ++t)
                CHECK(k3[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] ==
                      k4[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]);
    }
}

TEST_CASE("brute force and kd-tree agree exactly") {
    SECTION("100 uniform points") {
        const auto ps = uniform_points(100, 12345);
        const auto a = knn_index(ps, 5, Metric::euclidean(), SearchPolicy::brute_force);
        const auto b = knn_index(ps, 5, Metric::euclidean(), SearchPolicy::indexed);
        REQUIRE(a == b);
    }
    SECTION("grid with massive ties, both metrics, n > cutoff") {
        // 24x25 integer grid inside a padded region: every interior point has
        // four equidistant neighbors, so the tie-break rule is load-bearing.
        std::vector<Point> pts;
        for (int x = 0; x < 24; ++x)
            for (int y = 0; y < 25; ++y) pts.push_back({static_cast<double>(x), static_cast<double>(y)});
        const Rect region(-0.5, -0.5, 23.5, 24.5);
        const PointSet ps(std::move(pts), std::vector<int>(600, 0), region);
        REQUIRE(ps.n() > kBruteForceCutoff);
        for (const Metric& m : {Metric::euclidean(), Metric::toroidal(region)}) {
            const auto a = knn_index(ps, 4, m, SearchPolicy::brute_force);
            const auto b = knn_index(ps, 4, m, SearchPolicy::indexed);
            const auto c = knn_index(ps, 4, m, SearchPolicy::automatic);
            REQUIRE(a == b);
            REQUIRE(a == c);
        }
    }
    SECTION("toroidal uniform points") {
        const auto ps = uniform_points(700, 777);
        const Metric m = Metric::toroidal(ps.region());
        const auto a = knn_index(ps, 3, m, SearchPolicy::brute_force);
        const auto b = knn_index(ps, 3, m, SearchPolicy::indexed);
        REQUIRE(a == b);
    }
}

TEST_CASE("toroidal distance wraps") {
    const Metric m = Metric::toroidal(Rect::unit_square());
    CHECK(m.dist({0.05, 0.5}, {0.95, 0.5}) == Catch::Approx(0.1).margin(1e-15));
    CHECK(m.dist({0.5, 0.02}, {0.5, 0.98}) == Catch::Approx(0.04).margin(1e-15));
}

TEST_CASE("NN relation invariant under translation and uniform scaling") {
    const auto ps = uniform_points(80, 2024);
    const auto base = nn_index(ps, Metric::euclidean());
    std::vector<Point> moved;
    for (int i = 0; i < ps.n(); ++i)
        moved.push_back({3.0 * ps.point(i).x + 11.0, 3.0 * ps.point(i).y - 7.0});
    const PointSet ps2(std::move(moved), ps.labels());
    const auto shifted = nn_index(ps2, Metric::euclidean());
    for (int i = 0; i < ps.n(); ++i)
        CHECK(base[static_cast<std::size_t>(i)].nn_id == shifted[static_cast<std::size_t>(i)].nn_id);
}

TEST_CASE("nn distance is the minimum over all other points") {
    const auto ps = uniform_points(30, 5);
    const Metric m = Metric::euclidean();
    const auto nn = nn_index(ps, m);
    for (int i = 0; i < ps.n(); ++i)
        for (int j = 0; j < ps.n(); ++j) {
            if (i == j) continue;
            CHECK(nn[static_cast<std::size_t>(i)].dist <= m.dist(ps.point(i), ps.point(j)) + 1e-15);
        }
}

TEST_CASE("buffer filter") {
    std::vector<Point> pts{{0.5, 0.5}, {0.1, 0.5}, {0.9, 0.9}};
    const PointSet ps(pts, {0, 0, 0}, Rect::unit_square());
    SECTION("width 0 keeps everything") {
        const auto mask = buffer_filter(ps, 0.0, BufferMode::inner);
        CHECK(mask == std::vector<bool>{true, true, true});
    }
    SECTION("inner width 0.25") {
        const auto mask = buffer_filter(ps, 0.25, BufferMode::inner);
        CHECK(mask[0]);
        CHECK_FALSE(mask[1]);
        CHECK_FALSE(mask[2]);
    }
    SECTION("outer mode computes the same membership") {
        CHECK(buffer_filter(ps, 0.2, BufferMode::outer) == buffer_filter(ps, 0.2, BufferMode::inner));
    }
    SECTION("too-wide buffer is rejected") {
        CHECK_THROWS_AS(buffer_filter(ps, 0.5, BufferMode::inner), invalid_input);
        CHECK_THROWS_AS(buffer_filter(ps, -0.1, BufferMode::inner), invalid_input);
    }
}

TEST_CASE("PointSet validation") {
    CHECK_THROWS_AS(PointSet({}, {}), invalid_input);
    CHECK_THROWS_AS(PointSet({{0, 0}, {1, 1}}, {0, 2}), invalid_input);  // class 1 missing
    CHECK_THROWS_AS(PointSet({{0, 0}, {2, 2}}, {0, 0}, Rect::unit_square()), invalid_input);
    CHECK_THROWS_AS(Rect(1, 0, 0, 1), invalid_input);
    const PointSet ps({{0, 0}, {1, 2}}, {0, 1});
    CHECK(ps.region().contains({0.5, 1.0}));
    CHECK(ps.class_size(0) == 1);
}

TEST_CASE("mean NN distance matches a hand case") {
    // distances: 1, 1, 2
    CHECK(mean_nn_distance(line_points({0, 1, 3}), Metric::euclidean()) ==
          Catch::Approx(4.0 / 3.0));
}
