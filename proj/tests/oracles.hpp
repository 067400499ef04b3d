#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "curvatlas/counting.hpp"
#include "curvatlas/curve.hpp"
#include "curvatlas/geometry.hpp"
#include "curvatlas/rng.hpp"

namespace curvatlas::testing {

// Random polyline with up to max_vertices vertices in the unit square/cube.
inline PolyCurve random_polyline(Rng& rng, int max_vertices, int dim = 2) {
    const int n = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_vertices - 1)));
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) {
        Point p = dim == 2 ? Point(rng.uniform(), rng.uniform())
                           : Point(rng.uniform(), rng.uniform(), rng.uniform());
        if (!pts.empty() && distance(p, pts.back()) < 1e-9) p[0] += 1e-6;
        pts.push_back(p);
    }
    return PolyCurve(pts, 0.0);
}

// Exact diameter of the sub-polyline between arc positions s0 <= s1.
inline double arc_diameter(const PolyCurve& c, double s0, double s1) {
    std::vector<Point> pts;
    pts.push_back(c.at(s0));
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        const double s = c.arc_at_vertex(i + 1);
        if (s > s0 && s < s1) pts.push_back(c.vertices()[i + 1]);
    }
    pts.push_back(c.at(s1));
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::max(best, distance(pts[i], pts[j]));
    return best;
}

// Minimal contiguous partition restricted to a dense arc grid that includes
// the vertices and the implementation's own cut points.  The grid optimum is
// found by the grid greedy (diameter is monotone under arc inclusion), which
// is an independent algorithm from the implementation's exact mid-leg cuts.
inline long grid_partition_oracle(const PolyCurve& c, double l, int samples = 240) {
    const double len = c.length();
    if (len == 0.0) return 1;
    std::vector<double> grid;
    for (int i = 0; i <= samples; ++i) grid.push_back(len * i / samples);
    for (std::size_t i = 0; i < c.size(); ++i) grid.push_back(c.arc_at_vertex(i));
    for (double s : prefix_partition_counts(c, l).cuts) grid.push_back(s);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    long pieces = 0;
    std::size_t i = 0;
    const double tol = 1e-12 * std::max(1.0, l);
    while (i + 1 < grid.size()) {
        std::size_t j = i + 1;
        std::size_t best = i;
        while (j < grid.size() && arc_diameter(c, grid[i], grid[j]) <= l + tol) best = j++;
        if (best == i) return -1;  // grid too coarse to take any step (not expected)
        ++pieces;
        i = best;
    }
    return std::max<long>(pieces, 1);
}

// Greedy packing on a dense arc grid; the result can differ from the exact
// packing count by at most the grid resolution effect, so callers compare
// with a +-0 tolerance on counts computed at slightly perturbed l.
inline long grid_packing_oracle(const PolyCurve& c, double l, int samples = 4000) {
    const double len = c.length();
    if (len == 0.0) return 1;
    long count = 1;
    Point last = c.at(0.0);
    for (int i = 1; i <= samples; ++i) {
        const Point p = c.at(len * i / samples);
        if (distance(p, last) >= l) {
            ++count;
            last = p;
        }
    }
    return count;
}

// Cells met by dense sampling of the curve on the mesh-h grid (supercover
// approximation; a subset of the exact trace for finite sampling).
inline std::set<CellKey> sampled_cells(const PolyCurve& c, double h, int per_leg = 2000) {
    std::set<CellKey> cells;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        const Point& a = c.vertices()[i];
        const Point& b = c.vertices()[i + 1];
        for (int t = 0; t <= per_leg; ++t) {
            const Point p = lerp(a, b, static_cast<double>(t) / per_leg);
            CellKey k;
            bool boundary = false;
            for (int d = 0; d < p.dim; ++d) {
                const double x = p[d] / h;
                const double f = std::floor(x);
                if (std::abs(x - f) < 1e-12 || std::abs(x - f - 1.0) < 1e-12) boundary = true;
                k.i[d] = static_cast<std::int64_t>(f);
            }
            if (!boundary) cells.insert(k);
        }
    }
    return cells;
}

// Discrete Frechet distance on the vertex sequences (classic quadratic DP);
// an upper-bound oracle for the continuous distance on finely resampled
// curves.
inline double discrete_frechet(const std::vector<Point>& P, const std::vector<Point>& Q) {
    const std::size_t n = P.size(), m = Q.size();
    std::vector<double> prev(m), cur(m);
    for (std::size_t j = 0; j < m; ++j)
        prev[j] = std::max(j == 0 ? 0.0 : prev[j - 1], distance(P[0], Q[j]));
    for (std::size_t i = 1; i < n; ++i) {
        cur[0] = std::max(prev[0], distance(P[i], Q[0]));
        for (std::size_t j = 1; j < m; ++j) {
            const double reach = std::min({prev[j], prev[j - 1], cur[j - 1]});
            cur[j] = std::max(reach, distance(P[i], Q[j]));
        }
        prev.swap(cur);
    }
    return prev[m - 1];
}

}  // namespace curvatlas::testing
