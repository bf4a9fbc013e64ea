#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "rwhull/parallel.hpp"
#include "rwhull/rng.hpp"

using namespace rwhull;

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST_CASE("philox4x32-10 known answers") {
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are deterministic and copyable") {
    RngStream a(42, {3, 1});
    RngStream b(42, {3, 1});
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    RngStream fork = a;
    for (int i = 0; i < 100; ++i) CHECK(fork.normal() == a.normal());
}

TEST_CASE("distinct seeds and stream ids give distinct sequences") {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL})
        for (std::uint32_t rep = 0; rep < 4; ++rep)
            for (std::uint32_t walk = 0; walk < 3; ++walk) firsts.insert(RngStream(seed, {rep, walk}).next_u64());
    CHECK(firsts.size() == 36);
}

TEST_CASE("derive_seed separates its inputs") {
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {2}) != derive_seed(1, {2, 0}));
    CHECK(derive_seed(0, {}) != derive_seed(1, {}));
}

TEST_CASE("uniform and normal moments") {
    RngStream rng(2026, {0, 0});
    constexpr int n = 1000000;
    CompensatedSum su, su2, sn, sn2, sn4;
    double umin = 1.0, umax = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        su.add(u);
        su2.add(u * u);
        const double z = rng.normal();
        sn.add(z);
        sn2.add(z * z);
        sn4.add(z * z * z * z);
    }
    CHECK(umin >= 0.0);
    CHECK(umax < 1.0);
    // 5 standard errors
    CHECK(std::abs(su.value() / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(su2.value() / n - 1.0 / 3.0) < 5.0 * std::sqrt(4.0 / 45.0 / n));
    CHECK(std::abs(sn.value() / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(sn2.value() / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(sn4.value() / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
}
