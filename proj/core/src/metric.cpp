#include "curvatlas/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "curvatlas/geometry.hpp"

namespace curvatlas {

namespace {

struct Interval {
    double lo = 1.0;
    double hi = 0.0;
    bool empty() const { return lo > hi; }
};

// Free sub-interval of {q0 + t (q1 - q0) : t in [0, 1]} within eps of p.
Interval free_interval(const Point& p, const Point& q0, const Point& q1, double eps) {
    const Point u = q1 - q0;
    const Point w = q0 - p;
    const double a = dot(u, u);
    const double b = dot(u, w);
    const double c = dot(w, w) - eps * eps;
    Interval out;
    if (a <= 0.0) {
        if (c <= 0.0) {
            out.lo = 0.0;
            out.hi = 1.0;
        }
        return out;
    }
    const double disc = b * b - a * c;
    if (disc < 0.0) return out;
    const double sq = std::sqrt(disc);
    out.lo = std::max(0.0, (-b - sq) / a);
    out.hi = std::min(1.0, (-b + sq) / a);
    if (out.lo > out.hi) out = Interval{};
    return out;
}

double max_dist_to_vertices(const Point& p, const PolyCurve& c) {
    double best = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) best = std::max(best, distance(p, c.vertices()[i]));
    return best;
}

constexpr double kEdgeSlack = 1e-12;

}  // namespace

bool frechet_within(const PolyCurve& a, const PolyCurve& b, double eps) {
    const auto& P = a.vertices();
    const auto& Q = b.vertices();
    if (distance(P.front(), Q.front()) > eps) return false;
    if (distance(P.back(), Q.back()) > eps) return false;
    // The distance from a fixed point to a segment-parametrized point is
    // convex, so the max over a constant map is attained at a vertex.
    if (a.single_point()) return max_dist_to_vertices(P.front(), b) <= eps;
    if (b.single_point()) return max_dist_to_vertices(Q.front(), a) <= eps;

    const std::size_t nc = P.size() - 1;  // cells along a (rows)
    const std::size_t mc = Q.size() - 1;  // cells along b (columns)

    // Reachable intervals on the left edges of row i, rolled per row.
    std::vector<Interval> left(mc);
    {
        Interval f = free_interval(P[0], Q[0], Q[1], eps);
        if (!f.empty() && f.lo <= kEdgeSlack) left[0] = Interval{0.0, f.hi};
        for (std::size_t j = 1; j < mc; ++j) {
            if (left[j - 1].empty() || left[j - 1].hi < 1.0 - kEdgeSlack) break;
            Interval fj = free_interval(P[0], Q[j], Q[j + 1], eps);
            if (!fj.empty() && fj.lo <= kEdgeSlack) left[j] = Interval{0.0, fj.hi};
        }
    }

    // Bottom-boundary (t = 0) reachability, advanced row by row.
    Interval boundary_bottom;
    {
        Interval g = free_interval(Q[0], P[0], P[1], eps);
        if (!g.empty() && g.lo <= kEdgeSlack) boundary_bottom = Interval{0.0, g.hi};
    }

    Interval top;  // top edge of the last cell in the row just swept
    for (std::size_t i = 0; i < nc; ++i) {
        Interval bottom = boundary_bottom;
        for (std::size_t j = 0; j < mc; ++j) {
            const Interval in_left = left[j];
            const Interval right_free = free_interval(P[i + 1], Q[j], Q[j + 1], eps);
            const Interval top_free = free_interval(Q[j + 1], P[i], P[i + 1], eps);
            Interval out_right, out_top;
            if (!bottom.empty()) {
                out_right = right_free;
            } else if (!in_left.empty() && !right_free.empty()) {
                out_right = Interval{std::max(right_free.lo, in_left.lo), right_free.hi};
                if (out_right.lo > out_right.hi) out_right = Interval{};
            }
            if (!in_left.empty()) {
                out_top = top_free;
            } else if (!bottom.empty() && !top_free.empty()) {
                out_top = Interval{std::max(top_free.lo, bottom.lo), top_free.hi};
                if (out_top.lo > out_top.hi) out_top = Interval{};
            }
            left[j] = out_right;
            bottom = out_top;
        }
        top = bottom;
        // advance the t = 0 boundary to the next row
        if (i + 1 < nc) {
            Interval next;
            if (!boundary_bottom.empty() && boundary_bottom.hi >= 1.0 - kEdgeSlack) {
                Interval g = free_interval(Q[0], P[i + 1], P[i + 2], eps);
                if (!g.empty() && g.lo <= kEdgeSlack) next = Interval{0.0, g.hi};
            }
            boundary_bottom = next;
        }
    }
    const Interval& end_right = left[mc - 1];
    if (!end_right.empty() && end_right.hi >= 1.0 - kEdgeSlack) return true;
    if (!top.empty() && top.hi >= 1.0 - kEdgeSlack) return true;
    return false;
}

namespace {

// Lexicographic order on vertex data; used to make curve_distance(a, b)
// bit-identical to curve_distance(b, a).
bool curve_before(const PolyCurve& a, const PolyCurve& b) {
    const auto& va = a.vertices();
    const auto& vb = b.vertices();
    for (std::size_t i = 0; i < std::min(va.size(), vb.size()); ++i) {
        if (lex_less(va[i], vb[i])) return true;
        if (lex_less(vb[i], va[i])) return false;
    }
    return va.size() <= vb.size();
}

}  // namespace

double curve_distance(const PolyCurve& a_in, const PolyCurve& b_in, double tol) {
    const bool swap_args = !curve_before(a_in, b_in);
    const PolyCurve& a = swap_args ? b_in : a_in;
    const PolyCurve& b = swap_args ? a_in : b_in;
    const double dia = diameter(a) + diameter(b);
    if (tol <= 0.0) tol = 1e-9 * std::max(dia, 1e-12);
    double lo = std::max(distance(a.front(), b.front()), distance(a.back(), b.back()));
    double hi = distance(a.front(), b.front()) + dia;
    if (frechet_within(a, b, lo)) return lo;
    hi = std::max(hi, lo) * (1.0 + 1e-12) + tol;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (frechet_within(a, b, mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

std::vector<std::vector<double>> distance_matrix(const CurveConfig& a, const CurveConfig& b,
                                                 double tol) {
    std::vector<std::vector<double>> m(a.curves.size(),
                                       std::vector<double>(b.curves.size(), 0.0));
    for (std::size_t i = 0; i < a.curves.size(); ++i)
        for (std::size_t j = 0; j < b.curves.size(); ++j)
            m[i][j] = curve_distance(a.curves[i], b.curves[j], tol);
    return m;
}

std::string distance_matrix_csv(const std::vector<std::vector<double>>& m) {
    std::ostringstream os;
    os.precision(17);
    os << "i\\j";
    if (!m.empty())
        for (std::size_t j = 0; j < m[0].size(); ++j) os << ',' << j;
    os << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        os << i;
        for (double v : m[i]) os << ',' << v;
        os << '\n';
    }
    return os.str();
}

double config_distance(const CurveConfig& a, const CurveConfig& b, double tol) {
    if (a.curves.empty() || b.curves.empty()) {
        const Box& r = a.curves.empty() ? (b.curves.empty() ? a.region : b.region) : a.region;
        return distance(r.hi, r.lo);  // sentinel: region diameter
    }
    const auto m = distance_matrix(a, b, tol);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (double v : m[i]) best = std::min(best, v);
        worst = std::max(worst, best);
    }
    for (std::size_t j = 0; j < m[0].size(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m.size(); ++i) best = std::min(best, m[i][j]);
        worst = std::max(worst, best);
    }
    return worst;
}

CouplingReport coupling_gap(const std::vector<CurveConfig>& series, double tol) {
    CouplingReport rep;
    if (series.size() < 2) {
        rep.nonincreasing = true;
        return rep;
    }
    for (std::size_t i = 0; i + 1 < series.size(); ++i)
        rep.gaps.push_back(config_distance(series[i], series[i + 1], tol));
    rep.nonincreasing = true;
    for (std::size_t i = 0; i + 1 < rep.gaps.size(); ++i)
        if (rep.gaps[i + 1] > rep.gaps[i] + 1e-12) rep.nonincreasing = false;
    return rep;
}

}  // namespace curvatlas
