#include "doctest.h"

#include "divmkt/random.hpp"

#include <cmath>
#include <set>
#include <vector>

using divmkt::derive_seed;
using divmkt::PathStream;
using divmkt::Philox4x32;

TEST_CASE("philox known answers") {
    // Reference vectors for Philox4x32-10.
    CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) ==
          Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("stream replays bit for bit") {
    PathStream a(42, 7);
    PathStream b(42, 7);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(a() == b());
    }
    PathStream c(42, 7);
    PathStream d(42, 7);
    for (int i = 0; i < 200; ++i) {
        REQUIRE(c.normal() == d.normal());
    }
}

TEST_CASE("streams differ by id and seed") {
    PathStream a(1, 0);
    PathStream b(1, 1);
    PathStream c(2, 0);
    int same_ab = 0;
    int same_ac = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        same_ab += x == b() ? 1 : 0;
        same_ac += x == c() ? 1 : 0;
    }
    CHECK(same_ab == 0);
    CHECK(same_ac == 0);
}

TEST_CASE("adding streams leaves existing streams untouched") {
    // Stream p's output depends only on (seed, p).
    std::vector<std::uint64_t> first;
    PathStream s(9, 3);
    for (int i = 0; i < 10; ++i) {
        first.push_back(s());
    }
    for (std::uint64_t other = 0; other < 10; ++other) {
        PathStream t(9, other);
        (void)t();
    }
    PathStream again(9, 3);
    for (int i = 0; i < 10; ++i) {
        CHECK(again() == first[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("uniform lies in the open unit interval with the right mean") {
    PathStream s(5, 0);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    const double se = std::sqrt(1.0 / 12.0 / n);
    CHECK(std::abs(sum / n - 0.5) < 4.0 * se);
}

TEST_CASE("normal moments") {
    PathStream s(11, 4);
    const int n = 200000;
    double m1 = 0.0;
    double m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        m1 += z;
        m2 += z * z;
    }
    m1 /= n;
    m2 /= n;
    CHECK(std::abs(m1) < 4.0 / std::sqrt(n));
    CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("exponential rate and the zero-rate clock") {
    PathStream s(3, 3);
    CHECK(std::isinf(s.exponential(0.0)));
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += s.exponential(4.0);
    }
    CHECK(std::abs(sum / n - 0.25) < 4.0 * 0.25 / std::sqrt(n));
}

TEST_CASE("derived seeds separate tags") {
    std::set<std::uint64_t> seen;
    for (const char* tag : {"main", "rbm/0", "rbm/1", "single-name", "double-jump/3"}) {
        seen.insert(derive_seed(20261016, tag));
    }
    CHECK(seen.size() == 5);
    CHECK(derive_seed(1, "main") == derive_seed(1, "main"));
    CHECK(derive_seed(1, "main") != derive_seed(2, "main"));
}
