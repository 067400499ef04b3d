#include <doctest.h>

#include <algorithm>

#include "curvatlas/counting.hpp"
#include "curvatlas/generators.hpp"
#include "oracles.hpp"

using namespace curvatlas;
using namespace curvatlas::testing;

TEST_CASE("partition_count basics") {
    PolyCurve seg({Point(0.0, 0.0), Point(1.0, 0.0)}, 0.0);
    CHECK(partition_count(seg, 2.0) == 1);
    CHECK(partition_count(seg, 1.0) == 1);
    CHECK(partition_count(seg, 0.25) == 4);
    CHECK(partition_count(seg, 1.0 / 3.0) == 3);
    // single point
    PolyCurve pt({Point(0.5, 0.5)}, 0.0);
    CHECK(partition_count(pt, 0.01) == 1);
}

TEST_CASE("partition_count matches grid oracle on random polylines") {
    Rng rng(12345);
    for (int it = 0; it < 150; ++it) {
        const PolyCurve c = random_polyline(rng, 12, it % 3 == 0 ? 3 : 2);
        const double l = 0.05 + 0.5 * rng.uniform();
        const long got = partition_count(c, l);
        const long want = grid_partition_oracle(c, l);
        CAPTURE(it);
        CAPTURE(l);
        CHECK(got == want);
    }
}

TEST_CASE("packing_count near the arc-grid oracle") {
    Rng rng(777);
    for (int it = 0; it < 100; ++it) {
        const PolyCurve c = random_polyline(rng, 10);
        const double l = 0.05 + 0.4 * rng.uniform();
        const long got = packing_count(c, l);
        // the grid oracle under-places by up to its own arc resolution, so
        // bracket with a few grid steps of slack on the scale
        const double step = c.length() / 4000.0;
        const long lo = grid_packing_oracle(c, l + 8.0 * step);
        const long hi = grid_packing_oracle(c, std::max(l - 8.0 * step, 1e-6));
        CAPTURE(it);
        CHECK(got >= lo);
        CHECK(got <= hi);
    }
}

TEST_CASE("Lemma 2.2 inequalities") {
    Rng rng(4242);
    for (int it = 0; it < 300; ++it) {
        const PolyCurve c = random_polyline(rng, 12);
        const double l = 0.02 + 0.4 * rng.uniform();
        CHECK(partition_count(c, 3.0 * l) <= packing_count(c, l));
        CHECK(packing_count(c, l) <= partition_count(c, l * (1.0 - 1e-9)));
    }
}

TEST_CASE("partition_count monotone in l") {
    Rng rng(99);
    for (int it = 0; it < 50; ++it) {
        const PolyCurve c = random_polyline(rng, 10);
        long prev = partition_count(c, 0.02);
        for (double l = 0.04; l < 1.0; l *= 2.0) {
            const long cur = partition_count(c, l);
            CHECK(cur <= prev);
            prev = cur;
        }
    }
}

TEST_CASE("box_count vs sampled supercover") {
    Rng rng(31337);
    for (int it = 0; it < 40; ++it) {
        const PolyCurve c = random_polyline(rng, 8);
        const double l = 0.05 + 0.3 * rng.uniform();
        const double h = l / std::sqrt(2.0);
        const long got = box_count(c, l);
        const auto approx = sampled_cells(c, h);
        // sampling only finds interior hits, so it can never exceed the trace
        CHECK(got >= static_cast<long>(approx.size()));
        // and with dense sampling it should miss at most a couple of cells
        CHECK(got <= static_cast<long>(approx.size()) + 4);
    }
}

TEST_CASE("prefix_partition_counts consistent with partition_count") {
    Rng rng(5150);
    for (int it = 0; it < 50; ++it) {
        const PolyCurve c = random_polyline(rng, 10);
        const double l = 0.05 + 0.4 * rng.uniform();
        const auto pc = prefix_partition_counts(c, l);
        REQUIRE(!pc.cuts.empty());
        CHECK(pc.cuts.back() == doctest::Approx(c.length()));
        CHECK(pc.counts.back() == partition_count(c, l));
        for (std::size_t i = 0; i < pc.counts.size(); ++i)
            CHECK(pc.counts[i] == static_cast<long>(i) + 1);
        for (std::size_t i = 0; i + 1 < pc.cuts.size(); ++i) CHECK(pc.cuts[i] < pc.cuts[i + 1]);
        // every piece has diameter <= l
        double s0 = 0.0;
        for (double s1 : pc.cuts) {
            CHECK(arc_diameter(c, s0, s1) <= l * (1.0 + 1e-9));
            s0 = s1;
        }
    }
}

TEST_CASE("fixtures have expected counting behavior") {
    const PolyCurve line = gen_fixture(FixtureKind::line, 0);
    CHECK(partition_count(line, 0.5) == 2);
    const PolyCurve koch = gen_fixture(FixtureKind::koch, 4);
    // koch partition counts grow like l^-tau with tau > 1
    const long m1 = partition_count(koch, 1.0 / 8.0);
    const long m2 = partition_count(koch, 1.0 / 16.0);
    CHECK(m2 > 2 * m1 - m1 / 2);
}
