#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "imbalforest/random.hpp"

using imbalforest::RandomSource;

TEST_SUITE_BEGIN("random");

TEST_CASE("equal seed and label give identical sequences") {
    RandomSource a(1234, "exp");
    RandomSource b(1234, "exp");
    auto sa = a.stream();
    auto sb = b.stream();
    for (int i = 0; i < 64; ++i) CHECK(sa.next_u64() == sb.next_u64());
}

TEST_CASE("child derivation is a pure function of the path") {
    RandomSource root(7);
    auto a = root.child("tree", 3).child("grow").stream();
    auto b = RandomSource(7).child("tree", 3).child("grow").stream();
    for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(root.child("tree", 3).stream_label() == "tree/3");
}

TEST_CASE("distinct labels diverge within the first 16 draws") {
    RandomSource root(99);
    for (int pair = 0; pair < 100; ++pair) {
        auto a = root.child("a", std::uint64_t(pair)).stream();
        auto b = root.child("b", std::uint64_t(pair)).stream();
        bool differs = false;
        for (int i = 0; i < 16 && !differs; ++i)
            differs = a.next_u64() != b.next_u64();
        CHECK(differs);
    }
}

TEST_CASE("distinct seeds diverge") {
    auto a = RandomSource(1).stream();
    auto b = RandomSource(2).stream();
    bool differs = false;
    for (int i = 0; i < 16 && !differs; ++i) differs = a.next_u64() != b.next_u64();
    CHECK(differs);
}

TEST_CASE("next_double stays in [0, 1) with a sane mean") {
    auto s = RandomSource(5).stream();
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double v = s.next_double();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        sum += v;
    }
    CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("next_below covers the full range and stays in bounds") {
    auto s = RandomSource(6).stream();
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto v = s.next_below(7);
        REQUIRE(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("gaussian draws have roughly standard moments") {
    auto s = RandomSource(8).stream();
    double sum = 0.0, sum2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = s.next_gaussian();
        sum += v;
        sum2 += v * v;
    }
    CHECK(sum / n == doctest::Approx(0.0).epsilon(0.05));
    CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("shuffle is a deterministic permutation") {
    std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
    auto s = RandomSource(3, "shuffle").stream();
    s.shuffle(v);
    std::vector<int> w{0, 1, 2, 3, 4, 5, 6, 7};
    auto t = RandomSource(3, "shuffle").stream();
    t.shuffle(w);
    CHECK(v == w);
    std::set<int> elems(v.begin(), v.end());
    CHECK(elems.size() == 8);
}

TEST_SUITE_END();
