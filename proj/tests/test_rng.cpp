#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <vector>

#include "spatnn/rng.hpp"

using namespace spatnn;

TEST_CASE("same (seed, stream) reproduces the sequence") {
    RngStream a(123, 45), b(123, 45);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams diverge") {
    RngStream a(123, 0), b(123, 1);
    int equal = 0;
    for (int i = 0; i < 10000; ++i)
        if (a.u01() == b.u01()) ++equal;
    CHECK(equal < 10);
}

TEST_CASE("uniform angle has mean pi") {
    RngStream rng(99);
    double s = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) s += rng.angle();
    CHECK(s / n == Catch::Approx(std::numbers::pi).margin(0.01));
}

TEST_CASE("u01 range and below bounds") {
    RngStream rng(5);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.u01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(rng.below(7) < 7);
    }
}

TEST_CASE("shuffle preserves the multiset") {
    RngStream rng(17);
    std::vector<int> v{0, 0, 0, 1, 1, 2};
    auto w = v;
    rng.shuffle(w);
    std::sort(w.begin(), w.end());
    CHECK(w == v);
}
