#include <doctest.h>

#include <cmath>
#include <vector>

#include "mpcc/random.hpp"

using namespace mpcc;

TEST_CASE("streams are stable across builds") {
    Rng rng(Seed{42, 7}, 3);
    CHECK(rng.next_u64() == 13480866253234042925ull);
    CHECK(rng.next_u64() == 10278706172622310781ull);
    CHECK(rng.next_u64() == 14230260707346000371ull);

    Rng u(Seed{42, 7}, 3);
    CHECK(u.uniform01() == 0.73079922393714358);
    CHECK(u.uniform01() == 0.55720977813486361);
}

TEST_CASE("distinct keys give distinct streams") {
    const std::uint64_t a = Rng(Seed{1, 0}, 0).next_u64();
    CHECK(a != Rng(Seed{1, 1}, 0).next_u64());
    CHECK(a != Rng(Seed{1, 0}, 1).next_u64());
    CHECK(a != Rng(Seed{2, 0}, 0).next_u64());
    // High and low words both enter the key.
    CHECK(a != Rng(Seed{1ull | (1ull << 40), 0}, 0).next_u64());
    CHECK(a == Rng(Seed{1, 0}, 0).next_u64());
}

TEST_CASE("uniform01 stays in [0, 1) with the right mean") {
    Rng rng(Seed{9, 9});
    double sum = 0.0;
    const int n = 200'000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // Standard error of the mean is sqrt(1/12/n).
    CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("index is unbiased across buckets") {
    Rng rng(Seed{5, 1});
    const int n = 60'000;
    std::vector<int> counts(6, 0);
    for (int i = 0; i < n; ++i) ++counts[rng.index(6)];
    const double expect = n / 6.0;
    const double sd = std::sqrt(n * (1.0 / 6.0) * (5.0 / 6.0));
    for (int c : counts) CHECK(std::abs(c - expect) < 4.0 * sd);
    CHECK(rng.index(1) == 0);
    CHECK(rng.index(0) == 0);
}

TEST_CASE("bernoulli edge probabilities") {
    Rng rng(Seed{3, 3});
    for (int i = 0; i < 1000; ++i) {
        CHECK_FALSE(rng.bernoulli(0.0));
        CHECK(rng.bernoulli(1.0));
    }
}
