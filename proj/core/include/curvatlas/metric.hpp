#pragma once

#include <string>
#include <vector>

#include "curvatlas/curve.hpp"

namespace curvatlas {

// Continuous Frechet distance between polygonal chains via the free-space
// reachability decision and bisection.  tol <= 0 means 1e-9 times the summed
// diameters.  Single-point curves act as constant maps.
double curve_distance(const PolyCurve& a, const PolyCurve& b, double tol = -1.0);

// Decision procedure: is the Frechet distance <= eps?
bool frechet_within(const PolyCurve& a, const PolyCurve& b, double eps);

// Hausdorff metric over the curve metric: max of the two directed sup-min
// values.  An empty side yields the region diameter as a sentinel.
double config_distance(const CurveConfig& a, const CurveConfig& b, double tol = -1.0);

// Pairwise curve distances, row = curve of a, column = curve of b.
std::vector<std::vector<double>> distance_matrix(const CurveConfig& a, const CurveConfig& b,
                                                 double tol = -1.0);
// CSV with a header row/column of curve indices.
std::string distance_matrix_csv(const std::vector<std::vector<double>>& m);

struct CouplingReport {
    std::vector<double> gaps;  // consecutive config distances
    bool nonincreasing = false;
};

// Diagnostic gaps along a series of configurations at decreasing cutoffs.
CouplingReport coupling_gap(const std::vector<CurveConfig>& series, double tol = -1.0);

}  // namespace curvatlas
