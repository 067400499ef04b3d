#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "curvatlas/generators.hpp"
#include "oracles.hpp"

using namespace curvatlas;
using namespace curvatlas::testing;

TEST_CASE("bond percolation is deterministic per seed") {
    const LatticeField a = gen_bond_percolation(32, 0.5, 11);
    const LatticeField b = gen_bond_percolation(32, 0.5, 11);
    const LatticeField c = gen_bond_percolation(32, 0.5, 12);
    CHECK(a.hbond == b.hbond);
    CHECK(a.vbond == b.vbond);
    CHECK(a.hbond != c.hbond);
}

TEST_CASE("field serialization round trip") {
    const LatticeField f = gen_bond_percolation(24, 0.37, 99);
    std::stringstream ss;
    write_field(ss, f);
    const LatticeField g = read_field(ss);
    CHECK(f.nx == g.nx);
    CHECK(f.ny == g.ny);
    CHECK(f.hbond == g.hbond);
    CHECK(f.vbond == g.vbond);
}

TEST_CASE("crossing extraction agrees with the crossing predicate") {
    int crossings = 0;
    for (int seed = 0; seed < 30; ++seed) {
        const LatticeField f = gen_bond_percolation(24, 0.5, static_cast<std::uint64_t>(seed));
        const auto path = extract_crossing_path(f);
        CHECK(path.has_value() == has_lr_crossing(f));
        if (path) {
            ++crossings;
            // path spans left to right
            CHECK(path->front()[0] == doctest::Approx(0.0));
            CHECK(path->back()[0] == doctest::Approx((f.nx - 1) * f.delta));
            // self-avoiding
            std::set<std::pair<long, long>> seen;
            for (const auto& v : path->vertices()) {
                const auto key = std::make_pair(std::lround(v[0] / f.delta),
                                                std::lround(v[1] / f.delta));
                CHECK(seen.insert(key).second);
            }
        }
    }
    CHECK(crossings > 5);
}

TEST_CASE("lerw is self-avoiding and exits the target ball") {
    for (int seed = 0; seed < 10; ++seed) {
        const PolyCurve c = gen_lerw(64, static_cast<std::uint64_t>(seed), Point(0.5, 0.5), 0.3);
        std::set<std::pair<long, long>> seen;
        for (const auto& v : c.vertices()) {
            const auto key =
                std::make_pair(std::lround(v[0] * 64.0), std::lround(v[1] * 64.0));
            CHECK(seen.insert(key).second);
        }
        CHECK(distance(c.back(), Point(0.5, 0.5)) >= 0.3 - 1e-9);
    }
}

TEST_CASE("mst path connects its endpoints") {
    const PolyCurve c = gen_mst_path(32, 3, Point(0.0, 0.0), Point(1.0, 1.0));
    CHECK(distance(c.front(), Point(0.0, 0.0)) < 1e-9);
    CHECK(distance(c.back(), Point(1.0, 1.0)) < 1e-9);
    CHECK(c.size() >= 2);
}

TEST_CASE("fixtures: line, staircase, koch, hairpin") {
    const PolyCurve line = gen_fixture(FixtureKind::line, 0);
    CHECK(line.size() == 2);
    CHECK(span(line) == doctest::Approx(1.0));
    const PolyCurve koch = gen_fixture(FixtureKind::koch, 3);
    CHECK(koch.size() == 65);  // 4^3 legs
    CHECK(koch.length() > 1.0);
    const PolyCurve stair = gen_fixture(FixtureKind::staircase, 4);
    CHECK(stair.size() > 4);
    const PolyCurve hp = gen_fixture(FixtureKind::hairpin, 2);
    CHECK(hp.size() > 4);
}

TEST_CASE("resample keeps geometry and sets the cutoff") {
    const PolyCurve line = gen_fixture(FixtureKind::line, 0);
    const PolyCurve r = resample(line, 1.0 / 128.0);
    CHECK(r.step() == doctest::Approx(1.0 / 128.0).epsilon(0.5));
    CHECK(r.length() == doctest::Approx(line.length()));
    for (const auto& v : r.vertices()) CHECK(std::abs(v[1] - line.front()[1]) < 1e-12);
}

TEST_CASE("draw_config is a pure function of (spec, trial)") {
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::lerw;
    spec.seed = 21;
    spec.params["n"] = 64.0;
    const CurveConfig a = draw_config(spec, 4);
    const CurveConfig b = draw_config(spec, 4);
    const CurveConfig c = draw_config(spec, 5);
    REQUIRE(a.curves.size() == b.curves.size());
    REQUIRE(!a.curves.empty());
    CHECK(a.curves[0].vertices().size() == b.curves[0].vertices().size());
    for (std::size_t i = 0; i < a.curves[0].size(); ++i)
        CHECK(distance(a.curves[0].vertices()[i], b.curves[0].vertices()[i]) == 0.0);
    CHECK(a.curves[0].size() != c.curves[0].size());
}
