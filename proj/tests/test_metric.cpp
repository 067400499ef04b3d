#include <doctest.h>

#include <cmath>

#include "curvatlas/generators.hpp"
#include "curvatlas/metric.hpp"
#include "oracles.hpp"

using namespace curvatlas;
using namespace curvatlas::testing;

TEST_CASE("translated segment distance equals the offset") {
    PolyCurve a({Point(0.0, 0.0), Point(1.0, 0.0)}, 0.0);
    PolyCurve b({Point(0.0, 0.3), Point(1.0, 0.3)}, 0.0);
    CHECK(curve_distance(a, b) == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("identity and symmetry") {
    Rng rng(606);
    for (int it = 0; it < 30; ++it) {
        const PolyCurve a = random_polyline(rng, 8);
        const PolyCurve b = random_polyline(rng, 8);
        CHECK(curve_distance(a, a) <= 1e-9);
        CHECK(curve_distance(a, b) == curve_distance(b, a));  // bit-exact by contract
    }
}

TEST_CASE("triangle inequality within bisection slack") {
    Rng rng(707);
    for (int it = 0; it < 60; ++it) {
        const PolyCurve a = random_polyline(rng, 7);
        const PolyCurve b = random_polyline(rng, 7);
        const PolyCurve c = random_polyline(rng, 7);
        const double tol = 1e-9 * 4.0;
        const double ab = curve_distance(a, b), bc = curve_distance(b, c),
                     ac = curve_distance(a, c);
        CHECK(ac <= ab + bc + 3.0 * tol);
    }
}

TEST_CASE("continuous distance bounded by the discrete Frechet oracle") {
    Rng rng(909);
    for (int it = 0; it < 25; ++it) {
        PolyCurve a = resample(random_polyline(rng, 6), 1e-3);
        PolyCurve b = resample(random_polyline(rng, 6), 1e-3);
        const double cont = curve_distance(a, b);
        const double disc = discrete_frechet(a.vertices(), b.vertices());
        // d_F <= d_dF <= d_F + max leg length; the bisection answer carries
        // its own tolerance of about 1e-9 per unit diameter
        const double slack = 1e-8 * (diameter(a) + diameter(b) + 1.0);
        CHECK(cont <= disc + slack);
        CHECK(disc <= cont + 2e-3 + slack);
    }
}

TEST_CASE("single-point curves act as constant maps") {
    PolyCurve pt({Point(0.0, 0.0)}, 0.0);
    PolyCurve seg({Point(0.0, 0.0), Point(1.0, 0.0)}, 0.0);
    CHECK(curve_distance(pt, seg) == doctest::Approx(1.0).epsilon(1e-9));
    PolyCurve pt2({Point(0.0, 1.0)}, 0.0);
    CHECK(curve_distance(pt, pt2) == doctest::Approx(1.0));
}

TEST_CASE("config_distance directed max-min and empty sentinel") {
    CurveConfig A, B;
    A.region = B.region = Box::unit(2);
    A.curves.push_back(PolyCurve({Point(0.0, 0.0), Point(1.0, 0.0)}, 0.0));
    A.curves.push_back(PolyCurve({Point(0.0, 0.5), Point(1.0, 0.5)}, 0.0));
    B.curves.push_back(PolyCurve({Point(0.0, 0.1), Point(1.0, 0.1)}, 0.0));
    // directed: every A-curve near some B-curve? second A-curve is 0.4 away
    CHECK(config_distance(A, B) == doctest::Approx(0.4).epsilon(1e-6));
    CurveConfig empty;
    empty.region = Box::unit(2);
    CHECK(config_distance(empty, B) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("coupling_gap reports consecutive distances") {
    std::vector<CurveConfig> series;
    for (int i = 0; i < 3; ++i) {
        CurveConfig F;
        F.region = Box::unit(2);
        const double y = 0.1 * i;
        F.curves.push_back(PolyCurve({Point(0.0, y), Point(1.0, y)}, 0.0));
        series.push_back(F);
    }
    const CouplingReport rep = coupling_gap(series);
    REQUIRE(rep.gaps.size() == 2);
    CHECK(rep.gaps[0] == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(rep.gaps[1] == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("distance_matrix csv round trip shape") {
    CurveConfig A, B;
    A.region = B.region = Box::unit(2);
    A.curves.push_back(PolyCurve({Point(0.0, 0.0), Point(1.0, 0.0)}, 0.0));
    B.curves.push_back(PolyCurve({Point(0.0, 0.2), Point(1.0, 0.2)}, 0.0));
    B.curves.push_back(PolyCurve({Point(0.0, 0.6), Point(1.0, 0.6)}, 0.0));
    const auto m = distance_matrix(A, B);
    REQUIRE(m.size() == 1);
    REQUIRE(m[0].size() == 2);
    const std::string csv = distance_matrix_csv(m);
    CHECK(csv.find("0.2") != std::string::npos);
}
