#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace curvatlas {

// A point of R^d with d <= 3.  The dimension is carried explicitly so that
// 2D and 3D data can share the same code paths.
struct Point {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    int dim = 2;

    Point() = default;
    Point(double x, double y) : c{x, y, 0.0}, dim(2) {}
    Point(double x, double y, double z) : c{x, y, z}, dim(3) {}

    double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
};

inline Point operator+(const Point& a, const Point& b) {
    Point r = a;
    for (int i = 0; i < a.dim; ++i) r[i] += b[i];
    return r;
}

inline Point operator-(const Point& a, const Point& b) {
    Point r = a;
    for (int i = 0; i < a.dim; ++i) r[i] -= b[i];
    return r;
}

inline Point operator*(double t, const Point& a) {
    Point r = a;
    for (int i = 0; i < a.dim; ++i) r[i] *= t;
    return r;
}

inline double dot(const Point& a, const Point& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(norm2(a)); }

inline double distance(const Point& a, const Point& b) { return norm(a - b); }
inline double distance2(const Point& a, const Point& b) { return norm2(a - b); }

// Point on the segment a + t*(b-a), t in [0,1].
inline Point lerp(const Point& a, const Point& b, double t) {
    Point r = a;
    for (int i = 0; i < a.dim; ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
}

inline bool lex_less(const Point& a, const Point& b) {
    for (int i = 0; i < a.dim; ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

// Distance from p to the segment [a,b].
inline double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    const Point u = b - a;
    const double uu = norm2(u);
    if (uu == 0.0) return distance(p, a);
    double t = dot(p - a, u) / uu;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, lerp(a, b, t));
}

// Axis-aligned box.
struct Box {
    Point lo;
    Point hi;

    int dim() const { return lo.dim; }

    bool contains(const Point& p, double slack = 0.0) const {
        for (int i = 0; i < p.dim; ++i)
            if (p[i] < lo[i] - slack || p[i] > hi[i] + slack) return false;
        return true;
    }

    double diameter() const { return distance(lo, hi); }

    static Box unit(int d) {
        Box b;
        b.lo.dim = b.hi.dim = d;
        for (int i = 0; i < d; ++i) {
            b.lo[i] = 0.0;
            b.hi[i] = 1.0;
        }
        return b;
    }
};

// Roots of |a + t*u - q| = level on t in [t_lo, t_hi].  Appends to `out`,
// returns the number of roots appended.  Degenerate (tangent) roots are
// reported once.
inline int sphere_crossings(const Point& a, const Point& u, const Point& q, double level,
                            double t_lo, double t_hi, std::array<double, 2>& out) {
    // |a - q + t u|^2 = level^2
    const Point w = a - q;
    const double A = norm2(u);
    const double B = 2.0 * dot(w, u);
    const double C = norm2(w) - level * level;
    int n = 0;
    if (A == 0.0) return 0;
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return 0;
    const double sq = std::sqrt(disc);
    // Numerically stable pair of roots.
    const double qq = -0.5 * (B + (B >= 0.0 ? sq : -sq));
    double r0 = qq / A;
    double r1 = (qq != 0.0) ? C / qq : r0;
    if (r0 > r1) std::swap(r0, r1);
    if (r0 >= t_lo && r0 <= t_hi) out[static_cast<std::size_t>(n++)] = r0;
    if (disc > 0.0 && r1 >= t_lo && r1 <= t_hi) out[static_cast<std::size_t>(n++)] = r1;
    return n;
}

}  // namespace curvatlas
