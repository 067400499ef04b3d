#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvatlas/counting.hpp"
#include "curvatlas/curve.hpp"

namespace curvatlas {

// Slope/intercept/window/residual of a log-log regression.
struct ExponentFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double l_min = 0.0;
    double l_max = 0.0;
    double residual_rms = 0.0;
    int n_scales = 0;

    // One-line record: `fit kind=... exponent=... residual=... lmin=... lmax=... n=...`
    std::string record(const std::string& kind) const;
};

struct ScaleSample {
    double l = 0.0;
    double count = 0.0;
};

// Least-squares slope of log(count) against log(1/l) over the samples whose
// scale lies inside [l_min, l_max].
ExponentFit fit_exponent(const std::vector<ScaleSample>& samples, double l_min, double l_max);

// Plain least-squares line y = intercept + exponent * x (inputs already on
// the scale to be fitted).
ExponentFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

// Strictly increasing arc-length -> time map, t in [0,1]; linear between
// breakpoints.
struct Parametrization {
    std::vector<double> s;  // strictly increasing, s.front() = 0
    std::vector<double> t;  // strictly increasing, t.front() = 0, t.back() = 1

    double time_at(double arc) const;
    double arc_at(double time) const;
};

// Time-of-travel reparametrization built from prefix partition counts at the
// dyadic scales l_n = 2^-n, n = 0..n_max, with weights (n+1)^-2 and
// psi(l) = 1/partition_count(C, l).
Parametrization reparametrize_holder(const PolyCurve& c, int n_max);

struct ModulusReport {
    long violations = 0;
    double worst_margin = 0.0;  // min over pairs of lhs - rhs (negative = violation)
    long pairs_checked = 0;
};

// Samples n_pairs random time pairs and checks the uniform-continuity
// modulus |t1-t2| >= psi(dq/2) / (2 * log2(4/dq)^2) with dq the spatial
// distance of the sampled points and psi(l) = 1/partition_count(C, l).
ModulusReport verify_modulus(const PolyCurve& c, const Parametrization& par, long n_pairs,
                             std::uint64_t seed);

struct DimensionSummary {
    ExponentFit tau;      // from partition counts
    ExponentFit dim_box;  // from grid box counts
    double alpha_lower = 0.0;
    bool ordering_ok = false;  // dimB <= tau <= (1+eps) dimB across the window
};

// Fits both exponents over dyadic scales in [l_min, l_max]; eps is the
// tempered-crossing slack for the ordering flag.
DimensionSummary dimension_summary(const PolyCurve& c, double eps, double l_min, double l_max);

// Default regression window [4 delta, diameter/4] (delta = step; for
// continuum fixtures pass an explicit floor).
void default_window(const PolyCurve& c, double& l_min, double& l_max);

}  // namespace curvatlas
