#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvatlas/curve.hpp"
#include "curvatlas/generators.hpp"
#include "curvatlas/regularity.hpp"
#include "curvatlas/shapes.hpp"

namespace curvatlas {

// Number of pairwise-disjoint subsegments contained in the closed shell with
// one endpoint on the inner sphere and the other on the outer, counted from
// the radial profile's boundary-touch sequence.
long shell_traversals(const PolyCurve& c, const Shell& shell);
long shell_traversals(const CurveConfig& F, const Shell& shell);

// Smallest dyadic scale r_n = 2^-n >= cutoff at which some discretized shell
// with radii {3 r_n^(1+eps), r_n/2} (ordered so inner <= outer) centered on
// the grid (2 r_n^(1+eps)/sqrt(d)) Z^d admits >= k traversals; 1 if none.
double min_kfold_scale(const CurveConfig& F, double eps, int k);

struct ArcRange {
    double s0 = 0.0;
    double s1 = 0.0;
};

// Earliest subsegment contained in the closed cylinder whose endpoints lie
// within tol of the two opposite faces respectively.
std::optional<ArcRange> cylinder_traversal(const PolyCurve& c, const Cylinder& cyl, double tol);

struct RunRecord {
    Cylinder cylinder;
    int scale_index = 0;
    int curve_index = 0;
    ArcRange arc_range;

    // `run scale=<k> L=<f> ax=<f,f> bx=<f,f> width=<f> curve=<i> s0=<f> s1=<f>`
    std::string record() const;
};

struct RunScan {
    std::vector<RunRecord> runs;
    int skipped_scales = 0;  // ladder scales below the cutoff
};

// All straight runs of F on the ladder: cylinders of length L_k/2 and width
// L_k/sqrt(gamma) with face centers on the grid (L_k/gamma) Z^d at
// mutual distance within [1 - 1/gamma, 1 + 1/gamma] of L_k/2, one record per
// (cylinder, curve, earliest traversal).  tol < 0 means the cutoff delta.
// With `anchored` the traversing subsegment must end near the face centers
// (within tol plus the grid rounding slack) rather than anywhere on the
// faces -- the "joining the centers" reading of a straight run.
RunScan detect_straight_runs(const CurveConfig& F, const ScaleLadder& ladder, double tol = -1.0,
                             bool anchored = true);

struct SparsityVerdict {
    bool sparse = true;
    std::vector<RunRecord> witness;  // a violating nested chain when !sparse
};

// Nested chains of runs over scales k_1 < ... < k_n (nesting = cylinder
// containment); not sparse iff some chain has n >= max{k_n, k0} / 2.
SparsityVerdict sparsity_check(const CurveConfig& F, const ScaleLadder& ladder, double tol = -1.0,
                               bool anchored = true);
SparsityVerdict sparsity_check(const RunScan& scan, const ScaleLadder& ladder);

struct ProbabilityCell {
    double ratio = 0.0;  // r/R for lambda scans, k for rho scans
    int k = 0;
    double p = 0.0;
    double std_err = 0.0;
    long trials = 0;
};

struct CrossingEstimate {
    ExponentFit fit;
    std::vector<ProbabilityCell> table;
    int excluded_cells = 0;  // zero-probability cells left out of the fit
    bool fit_ok = false;

    // CSV `ratio,k,p,stderr,trials`, one row per cell.
    std::string csv() const;
};

// Monte-Carlo estimate of the H1 exponent: probability that a centered shell
// of the given radius ratio r/R is traversed >= k times, fitted as
// p ~ (r/R)^lambda; fit.exponent = lambda-hat.  The shell's outer radius is
// a quarter of the sample's bounding-box diameter (for lattice fields, a
// quarter of the shorter domain side).  For bond percolation the
// event counts distinct shell-restricted crossing clusters (a documented
// under-count of disjoint curve segments).
CrossingEstimate estimate_lambda(const GeneratorSpec& gen, int k, const std::vector<double>& ratios,
                                 long trials, std::uint64_t seed, long min_trials = 100);

// Monte-Carlo estimate of the H2 decay rate: probability that the first k
// cylinders of the (pairwise well separated) family are all traversed,
// fitted as p ~ rho^k; fit.exponent = log(rho-hat).
CrossingEstimate estimate_rho(const GeneratorSpec& gen, const std::vector<Cylinder>& family,
                              long trials, std::uint64_t seed);

struct ConfigStats {
    std::vector<double> r_scales;
    std::vector<double> l_scales;
    std::vector<std::vector<long>> n_tilde;  // [r index][l index]
    std::optional<double> U;                 // only with external normalizers
};

// Table of N-tilde(r, l) = number of grid cells of diameter l meeting some
// curve of diameter >= r, plus the weighted sum U when per-cell normalizers
// E[N-tilde] are supplied (weights (n+1)^-2 (m+1)^-2 over the scale grid).
ConfigStats config_statistics(const CurveConfig& F, const std::vector<double>& r_scales,
                              const std::vector<double>& l_scales,
                              const std::vector<std::vector<double>>* normalizers = nullptr);

}  // namespace curvatlas
