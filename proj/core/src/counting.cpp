#include "curvatlas/counting.hpp"

#include <cmath>
#include <stdexcept>

namespace curvatlas {

namespace {

void require_positive(double l) {
    if (!(l > 0.0)) throw std::invalid_argument("scale l must be positive");
}

// Relative slack on the diameter threshold so that scales like 1/3, whose
// rounding falls a hair short of the intended value, don't force an extra
// sliver segment.
constexpr double kScaleSlack = 1e-12;

// Largest root of |x(t) - p| = l on the leg a -> b, i.e. the parameter beyond
// which the (convex) distance stays above l.  Falls back to bisection if the
// closed form degenerates.
double upward_crossing(const Point& a, const Point& b, const Point& p, double l,
                       double t_lo) {
    const Point u = b - a;
    const Point w = a - p;
    const double A = norm2(u);
    const double B = 2.0 * dot(w, u);
    const double C = norm2(w) - l * l;
    const double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0 && A > 0.0) {
        const double r = (-B + std::sqrt(disc)) / (2.0 * A);
        if (r >= t_lo - 1e-12 && r <= 1.0 + 1e-12)
            return std::clamp(r, t_lo, 1.0);
    }
    // Bisection on f(t) = |x(t)-p| - l, bracketed by [t_lo, 1].
    double lo = t_lo, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (distance(lerp(a, b, mid), p) > l) hi = mid;
        else lo = mid;
    }
    return hi;
}

// Tracks the candidate points of the current segment.  The diameter of a
// growing point set is attained at convex-hull vertices, so in 2D the
// committed points are periodically collapsed onto their hull; recently
// added points are kept verbatim until the next collapse.
class SegmentPoints {
public:
    explicit SegmentPoints(int dim) : dim_(dim) {}

    void reset(const Point& p) {
        hull_.clear();
        pending_.clear();
        pending_.push_back(p);
    }

    void add(const Point& p) {
        pending_.push_back(p);
        if (dim_ == 2 && pending_.size() >= 64) collapse();
    }

    template <typename F>
    void for_each(F&& f) const {
        for (const auto& p : hull_) f(p);
        for (const auto& p : pending_) f(p);
    }

private:
    void collapse() {
        hull_.insert(hull_.end(), pending_.begin(), pending_.end());
        pending_.clear();
        // Andrew monotone chain.
        std::sort(hull_.begin(), hull_.end(), [](const Point& a, const Point& b) {
            return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
        });
        auto cross = [](const Point& o, const Point& a, const Point& b) {
            return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
        };
        std::vector<Point> out;
        out.reserve(hull_.size() + 1);
        for (int pass = 0; pass < 2; ++pass) {
            const std::size_t base = out.size();
            auto scan = [&](const Point& p) {
                while (out.size() >= base + 2 &&
                       cross(out[out.size() - 2], out[out.size() - 1], p) <= 0.0)
                    out.pop_back();
                out.push_back(p);
            };
            if (pass == 0)
                for (const auto& p : hull_) scan(p);
            else
                for (auto it = hull_.rbegin(); it != hull_.rend(); ++it) scan(*it);
            out.pop_back();
        }
        if (out.empty()) out.push_back(hull_.front());  // all points coincide on a chain
        hull_ = std::move(out);
    }

    int dim_;
    std::vector<Point> hull_;
    std::vector<Point> pending_;
};

}  // namespace

PrefixCounts prefix_partition_counts(const PolyCurve& c, double l) {
    require_positive(l);
    l *= 1.0 + kScaleSlack;
    PrefixCounts out;
    if (c.single_point()) {
        out.cuts.push_back(0.0);
        out.counts.push_back(1);
        return out;
    }
    const auto& v = c.vertices();
    const std::size_t nlegs = v.size() - 1;

    long count = 0;
    std::size_t leg = 0;
    double t_pos = 0.0;  // current position as a parameter on `leg`
    SegmentPoints pts(c.dim());
    pts.reset(v[0]);

    while (true) {
        // Try to absorb the rest of the current leg.
        const Point& a = v[leg];
        const Point& b = v[leg + 1];
        double t_cut = 2.0;
        pts.for_each([&](const Point& p) {
            if (distance(b, p) > l) {
                // Convexity: the distance can only exceed l at the far end,
                // so the upward crossing is the cut candidate.
                t_cut = std::min(t_cut, upward_crossing(a, b, p, l, t_pos));
            }
        });
        if (t_cut <= 1.0) {
            // Close the segment at the exact threshold point.
            const double leg_len = c.arc_at_vertex(leg + 1) - c.arc_at_vertex(leg);
            const double s_cut = c.arc_at_vertex(leg) + t_cut * leg_len;
            ++count;
            out.cuts.push_back(s_cut);
            out.counts.push_back(count);
            pts.reset(lerp(a, b, t_cut));
            t_pos = t_cut;
            continue;
        }
        pts.add(b);
        ++leg;
        t_pos = 0.0;
        if (leg == nlegs) break;
    }
    ++count;
    out.cuts.push_back(c.length());
    out.counts.push_back(count);
    return out;
}

long partition_count(const PolyCurve& c, double l) {
    return prefix_partition_counts(c, l).counts.back();
}

long packing_count(const PolyCurve& c, double l) {
    require_positive(l);
    if (c.single_point()) return 1;
    const auto& v = c.vertices();
    const std::size_t nlegs = v.size() - 1;

    long count = 1;  // point at s = 0
    Point anchor = v[0];
    std::size_t leg = 0;
    double t_pos = 0.0;
    while (leg < nlegs) {
        const Point& a = v[leg];
        const Point& b = v[leg + 1];
        if (distance(b, anchor) >= l) {
            const double t = upward_crossing(a, b, anchor, l, t_pos);
            anchor = lerp(a, b, t);
            ++count;
            t_pos = t;
            // Anchor may sit exactly at the leg end.
            if (t_pos >= 1.0) {
                ++leg;
                t_pos = 0.0;
            }
        } else {
            ++leg;
            t_pos = 0.0;
        }
    }
    return count;
}

std::set<CellKey> grid_cells(const PolyCurve& c, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("grid mesh must be positive");
    const int d = c.dim();
    std::set<CellKey> cells;

    auto cell_of = [&](const Point& p) {
        CellKey k;
        for (int i = 0; i < d; ++i)
            k.i[i] = static_cast<std::int64_t>(std::floor(p[i] / h));
        return k;
    };

    const auto& v = c.vertices();
    if (v.size() == 1) {
        cells.insert(cell_of(v[0]));
        return cells;
    }

    for (std::size_t leg = 0; leg + 1 < v.size(); ++leg) {
        const Point& a = v[leg];
        const Point& b = v[leg + 1];
        // Sample the start cell just inside the leg so a vertex sitting on a
        // grid face lands on the side the leg actually occupies.
        CellKey cur = cell_of(lerp(a, b, 1e-12));
        cells.insert(cur);

        // Amanatides-Woo traversal; exact corner ties step one axis at a
        // time (lowest index first) so the opposite corner cell is skipped.
        double t_max[3], t_delta[3];
        int step[3];
        for (int i = 0; i < d; ++i) {
            const double di = b[i] - a[i];
            if (di > 0.0) {
                step[i] = 1;
                t_max[i] = ((static_cast<double>(cur.i[i]) + 1.0) * h - a[i]) / di;
                t_delta[i] = h / di;
            } else if (di < 0.0) {
                step[i] = -1;
                t_max[i] = (static_cast<double>(cur.i[i]) * h - a[i]) / di;
                t_delta[i] = -h / di;
            } else {
                step[i] = 0;
                t_max[i] = std::numeric_limits<double>::infinity();
                t_delta[i] = std::numeric_limits<double>::infinity();
            }
        }
        while (true) {
            int axis = 0;
            for (int i = 1; i < d; ++i)
                if (t_max[i] < t_max[axis]) axis = i;
            const double t_next = t_max[axis];
            if (!(t_next < 1.0 - 1e-12)) break;
            cur.i[axis] += step[axis];
            t_max[axis] += t_delta[axis];
            cells.insert(cur);
        }
    }
    return cells;
}

long box_count(const PolyCurve& c, double l) {
    require_positive(l);
    const double h = l / std::sqrt(static_cast<double>(c.dim()));
    return static_cast<long>(grid_cells(c, h).size());
}

}  // namespace curvatlas
