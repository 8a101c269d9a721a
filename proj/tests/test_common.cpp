#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "iftnet/common.hpp"

using namespace iftnet;

TEST_CASE("fnv1a64 matches the published test vectors", "[common]")
{
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("hex64 renders fixed-width lowercase hex", "[common]")
{
    CHECK(hex64(0) == "0000000000000000");
    CHECK(hex64(0xdeadbeefULL) == "00000000deadbeef");
    CHECK(hex64(0xcbf29ce484222325ULL) == "cbf29ce484222325");
}

TEST_CASE("derive_seed is deterministic and stream-separated", "[common]")
{
    const std::uint64_t a = derive_seed(42, 0);
    CHECK(a == derive_seed(42, 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 64; ++s)
        seen.insert(derive_seed(42, s));
    CHECK(seen.size() == 64);
    CHECK(derive_seed(42, 1) != derive_seed(43, 1));
}

TEST_CASE("rng draws are reproducible per seed", "[common]")
{
    Rng a(7), b(7), c(8);
    bool diverged = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t va = a.bits();
        CHECK(va == b.bits());
        if (va != c.bits())
            diverged = true;
    }
    CHECK(diverged);
}

TEST_CASE("uniform01 stays inside the half-open unit interval", "[common]")
{
    Rng rng(1);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("below covers the full range without bias artifacts", "[common]")
{
    Rng rng(3);
    std::size_t counts[7] = {};
    for (int i = 0; i < 70000; ++i) {
        const std::uint64_t v = rng.below(7);
        REQUIRE(v < 7);
        ++counts[v];
    }
    for (std::size_t k = 0; k < 7; ++k) {
        CHECK(counts[k] > 9000);
        CHECK(counts[k] < 11000);
    }
    CHECK_THROWS_AS(rng.below(0), error);
}

TEST_CASE("bernoulli respects the edge probabilities", "[common]")
{
    Rng rng(5);
    for (int i = 0; i < 100; ++i)
        CHECK_FALSE(rng.bernoulli(0.0));
    int hits = 0;
    for (int i = 0; i < 10000; ++i)
        hits += rng.bernoulli(0.25) ? 1 : 0;
    CHECK(hits > 2200);
    CHECK(hits < 2800);
}

TEST_CASE("format_fixed rounds and never emits negative zero", "[common]")
{
    CHECK(format_fixed(0.15238, 4) == "0.1524");
    CHECK(format_fixed(2.0 / 3.0, 4) == "0.6667");
    CHECK(format_fixed(-0.00001, 4) == "0.0000");
    CHECK(format_fixed(-1.5, 2) == "-1.50");
    CHECK(format_fixed(6.25, 4) == "6.2500");
}

TEST_CASE("format_double round-trips through strtod", "[common]")
{
    for (double x : {0.1, -3.25, 1e-12, 12345.6789, 2.0 / 3.0}) {
        const std::string s = format_double(x);
        CHECK(std::stod(s) == x);
    }
}

TEST_CASE("powi agrees with std::pow on integer exponents", "[common]")
{
    CHECK(powi(2.0, 0) == 1.0);
    CHECK(powi(2.0, 10) == 1024.0);
    CHECK(powi(0.5, 3) == 0.125);
    CHECK_THAT(powi(0.9, 57), Catch::Matchers::WithinRel(std::pow(0.9, 57.0), 1e-12));
}

TEST_CASE("logsumexp is exact on two terms and stable far from zero", "[common]")
{
    const double a = std::log(3.0), b = std::log(5.0);
    CHECK_THAT(logsumexp({a, b}), Catch::Matchers::WithinAbs(std::log(8.0), 1e-12));
    CHECK_THAT(logsumexp({1000.0, 1000.0}),
               Catch::Matchers::WithinAbs(1000.0 + std::log(2.0), 1e-9));
    CHECK_THAT(logsumexp({-1000.0, -1001.0}),
               Catch::Matchers::WithinAbs(-1000.0 + std::log1p(std::exp(-1.0)), 1e-9));
}
