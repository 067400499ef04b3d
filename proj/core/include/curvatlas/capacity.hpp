#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "curvatlas/curve.hpp"
#include "curvatlas/shapes.hpp"

namespace curvatlas {

struct HierarchySegment {
    double s0 = 0.0;
    double s1 = 0.0;
    int parent = -1;  // index into the previous generation
    int n_desc = 0;   // immediate descendants (0 on the last generation)
};

// Nested generations of subsegments at scales L_k = gamma^-k L0, built on a
// copy of the source curve; arc ranges refer to that copy.
struct FractalHierarchy {
    PolyCurve curve;
    std::vector<std::vector<HierarchySegment>> generations;
    double gamma = 0.0;
    int m = 0;
    double L0 = 0.0;
    double eps = 0.0;  // gamma/m - 1

    // Asserts nesting, same-generation separation >= eps*L_k, spans, and
    // descendant counts >= m; throws logic_error with a description.
    void validate() const;
};

// The cut-point construction: L0 = span, Gamma_0 = [0, first exit of the
// radius-L0 ball], each segment refined by y_1 = start, x_1 = first exit of
// the radius-L_{k+1} ball at y_1, then x_n = first point at distance
// >= L_k/m from the constructed subsegments and y_n = last entrance before
// x_n into the radius-L_{k+1} ball at x_n.
FractalHierarchy build_hierarchy(const PolyCurve& c, double gamma, int m, int k_max);

// One segment per line: `<generation> <parent> <s0> <s1>`, generations in
// order, preceded by `hierarchy v1 gamma=<f> m=<i> L0=<f> kmax=<i>`.
void write_hierarchy(std::ostream& os, const FractalHierarchy& h);

struct DiscreteMeasure {
    std::vector<Point> support;
    std::vector<double> weights;
};

// Uniform branching measure: one support point per leaf (its
// lexicographically earliest curve point), weight = product of inverse
// descendant counts along the ancestry.
DiscreteMeasure hierarchy_measure(const FractalHierarchy& h);

// E(mu) = sum_ij w_i w_j / max{|x_i - x_j|, l}^s, diagonal included.
double energy(const DiscreteMeasure& mu, double s, double l);

struct CapacityResult {
    double s = 0.0;
    double l = 0.0;
    double energy_value = 0.0;
    double capacity = 0.0;
    std::string method;  // qp | hierarchy-bound | brute
    double gap = 0.0;    // relative duality gap at the last iterate
    bool converged = true;
    long iterations = 0;
    std::vector<double> weights;

    // `cap s=<f> l=<f> E=<f> C=<f> method=<id> gap=<f>`
    std::string record() const;
};

// Minimal energy over probability measures on the points (conditional
// gradient with away steps, relative gap tolerance tol, iteration cap 1e5);
// capacity = 1/energy.
CapacityResult capacity_qp(const std::vector<Point>& points, double s, double l, double tol);

// Closed-form bound (eps L0)^s [gamma^{s k0} + beta/(1 - gamma^s/beta)]^-1
// with beta = sqrt(m(m+1)); requires gamma^s < beta.
double capacity_lower_bound(const FractalHierarchy& h, double s, int k0);

struct GammaReport {
    double gamma = 0.0;
    bool sparse = false;
    double s = 0.0;  // log beta / log gamma when sparse
};

// Max over gammas whose ladders make F's straight runs sparse of the s
// solving gamma^s = sqrt(m(m+1)); 1 when none is sparse.  `base` supplies
// L0, k_max, and k0; its gamma is overridden per entry.
double dimension_lower_bound(const CurveConfig& F, int m, const std::vector<double>& gammas,
                             const ScaleLadder& base, std::vector<GammaReport>* report = nullptr);

}  // namespace curvatlas
