#include "doctest.h"

#include <atomic>
#include <cstdlib>
#include <set>

#include "pmaflow/common.hpp"

using namespace pmaflow;

TEST_CASE("vec2 and sym2 algebra") {
    Vec2 a{3.0, 4.0};
    CHECK(a.norm2() == 25.0);
    CHECK(a.norm() == 5.0);
    CHECK((a + Vec2{1.0, -1.0}).x == 4.0);
    CHECK((a * 2.0).y == 8.0);
    CHECK(a.dot(Vec2{-4.0, 3.0}) == 0.0);

    Sym2 H{2.0, 1.0, 3.0};
    CHECK(H.det() == 5.0);
    CHECK(H.trace() == 5.0);
    Vec2 Hv = H.apply(Vec2{1.0, 0.0});
    CHECK(Hv.x == 2.0);
    CHECK(Hv.y == 1.0);
}

TEST_CASE("splitmix64 reference stream") {
    SplitMix64 rng(1);
    CHECK(rng.next() == 0x910a2dec89025cc1ULL);
    CHECK(rng.next() == 0xbeeb8da1658eec67ULL);
    CHECK(rng.next() == 0xf893a2eefb32555eULL);

    SplitMix64 u(1);
    const double first = u.uniform();
    CHECK(first == doctest::Approx(0.5665615751722809).epsilon(1e-15));
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }

    SplitMix64 b(42);
    for (int i = 0; i < 1000; ++i) CHECK(b.below(7) < 7);
}

TEST_CASE("format_double prints shortest round-trip form") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
    CHECK(format_double(1e300) == "1e+300");
    CHECK(format_double(0.0) == "0");

    // Round-trip: parsing the printed form recovers the exact bits.
    for (double v : {3.141592653589793, 2.2250738585072014e-308, 123456.789,
                     -9.87e-12, 0.49999999999999994}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("fnv1a64 reference vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("hello") == 0xa430d84680aabd0bULL);
    CHECK(hash_hex("") == "cbf29ce484222325");
    CHECK(hash_hex("hello") == "a430d84680aabd0b");
    CHECK(hash_hex("x").size() == 16);
}

TEST_CASE("parallel_for covers the range exactly once") {
    const std::size_t n = 10007;
    std::vector<std::atomic<int>> hits(n);
    for (auto& h : hits) h.store(0);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) hits[i].fetch_add(1);
    });
    for (std::size_t i = 0; i < n; ++i) CHECK(hits[i].load() == 1);

    // Small ranges run inline.
    std::size_t count = 0;
    parallel_for(5, [&](std::size_t b, std::size_t e) { count += e - b; });
    CHECK(count == 5);
}

TEST_CASE("thread_count is at least one") {
    CHECK(thread_count() >= 1);
    CHECK(thread_count() <= 64);
}

TEST_CASE("error hierarchy groups configuration failures") {
    CHECK_THROWS_AS(throw ParseError("p"), ConfigError);
    CHECK_THROWS_AS(throw UnknownKey("k"), ConfigError);
    CHECK_THROWS_AS(throw RangeError("r"), ConfigError);
    CHECK_THROWS_AS(throw ConfigError("c"), Error);
    CHECK_THROWS_AS(throw StiffnessOverflow("s"), Error);
}
