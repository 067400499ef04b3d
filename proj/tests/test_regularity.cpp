#include <doctest.h>

#include <cmath>

#include "curvatlas/generators.hpp"
#include "curvatlas/regularity.hpp"
#include "oracles.hpp"

using namespace curvatlas;
using namespace curvatlas::testing;

TEST_CASE("fit_exponent recovers a pure power law") {
    std::vector<ScaleSample> samples;
    const double tau = 1.37;
    for (int n = 1; n <= 8; ++n) {
        const double l = std::pow(2.0, -n);
        samples.push_back({l, std::pow(l, -tau)});
    }
    const ExponentFit fit = fit_exponent(samples, 1e-3, 1.0);
    CHECK(fit.exponent == doctest::Approx(tau).epsilon(1e-9));
    CHECK(fit.residual_rms < 1e-9);
}

TEST_CASE("reparametrize_holder is monotone and normalized") {
    for (auto kind : {FixtureKind::line, FixtureKind::staircase, FixtureKind::koch}) {
        const PolyCurve c = gen_fixture(kind, kind == FixtureKind::line ? 0 : 4);
        const Parametrization par = reparametrize_holder(c, 6);
        REQUIRE(par.s.size() == par.t.size());
        CHECK(par.t.front() == 0.0);
        CHECK(par.t.back() == doctest::Approx(1.0));
        for (std::size_t i = 0; i + 1 < par.t.size(); ++i) {
            CHECK(par.s[i] < par.s[i + 1]);
            CHECK(par.t[i] < par.t[i + 1]);
        }
        // inverse round trip
        for (double s : {0.1 * c.length(), 0.5 * c.length(), 0.9 * c.length()})
            CHECK(par.arc_at(par.time_at(s)) == doctest::Approx(s).epsilon(1e-9));
    }
}

TEST_CASE("verify_modulus finds no violations on small fixtures") {
    const PolyCurve c = gen_fixture(FixtureKind::staircase, 5);
    const Parametrization par = reparametrize_holder(c, 8);
    const ModulusReport rep = verify_modulus(c, par, 500, 17);
    CHECK(rep.pairs_checked == 500);
    CHECK(rep.violations == 0);
}

TEST_CASE("dimension_summary on a straight line is 1") {
    PolyCurve line = resample(gen_fixture(FixtureKind::line, 0), 1.0 / 512.0);
    double lmin = 0.0, lmax = 0.0;
    default_window(line, lmin, lmax);
    const DimensionSummary ds = dimension_summary(line, 0.25, lmin, lmax);
    CHECK(ds.dim_box.exponent == doctest::Approx(1.0).epsilon(0.02));
    CHECK(ds.tau.exponent == doctest::Approx(1.0).epsilon(0.02));
    CHECK(ds.alpha_lower == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("fit_line slope and intercept") {
    std::vector<double> xs{0.0, 1.0, 2.0, 3.0};
    std::vector<double> ys{1.0, 3.0, 5.0, 7.0};
    const ExponentFit f = fit_line(xs, ys);
    CHECK(f.exponent == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
}
