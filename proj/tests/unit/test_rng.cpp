#include <doctest.h>

#include <cmath>
#include <vector>

#include "levyfbsde/rng.hpp"
#include "levyfbsde/stats.hpp"

using namespace levyfbsde;

TEST_CASE("substreams are reproducible and distinct") {
    RngStream a = RngStream::substream(42, 7, StreamTag::Brownian);
    RngStream b = RngStream::substream(42, 7, StreamTag::Brownian);
    RngStream c = RngStream::substream(42, 8, StreamTag::Brownian);
    RngStream d = RngStream::substream(42, 7, StreamTag::Marks);
    for (int i = 0; i < 16; ++i) {
        const std::uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        CHECK(va != c.next_u64());
        CHECK(va != d.next_u64());
    }
}

TEST_CASE("uniform stays inside the open interval") {
    RngStream s = RngStream::substream(1, 0, StreamTag::Aux);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal draws have the right first two moments") {
    RngStream s = RngStream::substream(3, 1, StreamTag::Aux);
    const int n = 200000;
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = s.normal();
    CHECK(std::abs(mean(z)) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(variance(z) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("brownian path is consistent under bridge refinement") {
    // Coarse values must not change as finer times are inserted.
    BrownianPath bp(RngStream::substream(9, 2, StreamTag::Brownian));
    const double b_half = bp.value(0.5);
    const double b_one = bp.value(1.0);
    bp.value(0.25);
    bp.value(0.75);
    bp.value(0.125);
    CHECK(bp.value(0.5) == b_half);
    CHECK(bp.value(1.0) == b_one);
    CHECK(bp.value(0.0) == 0.0);
    CHECK_THROWS_AS(bp.value(-1.0), std::domain_error);
}

TEST_CASE("brownian increments have the right variance") {
    const int n = 20000;
    std::vector<double> b1(n), mid(n);
    for (int i = 0; i < n; ++i) {
        BrownianPath bp(RngStream::substream(11, static_cast<std::uint64_t>(i), StreamTag::Brownian));
        b1[static_cast<std::size_t>(i)] = bp.value(1.0);
        // Bridged midpoint.
        mid[static_cast<std::size_t>(i)] = bp.value(0.5);
    }
    CHECK(variance(b1) == doctest::Approx(1.0).epsilon(0.06));
    CHECK(variance(mid) == doctest::Approx(0.5).epsilon(0.06));
    CHECK(std::abs(mean(b1)) < 4.0 / std::sqrt(static_cast<double>(n)));
}
