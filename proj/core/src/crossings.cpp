#include "curvatlas/crossings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace curvatlas {

namespace {

// 63-bit key for integer grid coordinates (21 bits per axis, offset binary).
std::uint64_t cell_key(const std::int64_t* z, int d) {
    std::uint64_t k = 0;
    for (int i = 0; i < d; ++i)
        k = (k << 21) | (static_cast<std::uint64_t>(z[i] + (1 << 20)) & 0x1FFFFF);
    return k;
}

Box config_bbox(const CurveConfig& F) {
    bool any = false;
    Box b;
    for (const auto& c : F.curves) {
        for (const auto& p : c.vertices()) {
            if (!any) {
                b.lo = b.hi = p;
                any = true;
                continue;
            }
            for (int i = 0; i < p.dim; ++i) {
                b.lo[i] = std::min(b.lo[i], p[i]);
                b.hi[i] = std::max(b.hi[i], p[i]);
            }
        }
    }
    if (!any) throw std::invalid_argument("empty configuration has no bounding box");
    return b;
}

double max_curve_diameter(const CurveConfig& F) {
    double d = 0.0;
    for (const auto& c : F.curves) d = std::max(d, diameter(c));
    return d;
}

}  // namespace

long shell_traversals(const PolyCurve& c, const Shell& shell) {
    shell.validate();
    if (c.single_point()) return 0;
    const auto& v = c.vertices();

    if (shell.inner == shell.outer) {
        // Degenerate shell: a traversal is a positive-length arc on the sphere.
        long count = 0;
        bool run = false;
        const double tol = 1e-12 * (1.0 + shell.inner);
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            const bool on = std::abs(distance(v[i], shell.center) - shell.inner) <= tol &&
                            std::abs(distance(v[i + 1], shell.center) - shell.inner) <= tol &&
                            std::abs(distance(lerp(v[i], v[i + 1], 0.5), shell.center) -
                                     shell.inner) <= tol;
            if (on && !run) ++count;
            run = on;
        }
        return count;
    }

    struct Touch {
        double arc;
        int label;  // 0 = inner sphere, 1 = outer sphere
    };
    std::vector<Touch> touches;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const Point& a = v[i];
        if (point_segment_distance(shell.center, a, v[i + 1]) > shell.outer) continue;
        const Point u = v[i + 1] - a;
        const double base = c.arc_at_vertex(i);
        const double leg_len = c.arc_at_vertex(i + 1) - base;
        for (int label = 0; label < 2; ++label) {
            std::array<double, 2> roots{};
            const double level = label == 0 ? shell.inner : shell.outer;
            const int n = sphere_crossings(a, u, shell.center, level, 0.0, 1.0, roots);
            for (int j = 0; j < n; ++j)
                touches.push_back({base + roots[static_cast<std::size_t>(j)] * leg_len, label});
        }
    }
    if (touches.empty()) return 0;
    std::sort(touches.begin(), touches.end(),
              [](const Touch& x, const Touch& y) { return x.arc < y.arc; });
    const double dedupe = 1e-12 * (1.0 + c.length());
    touches.erase(std::unique(touches.begin(), touches.end(),
                              [&](const Touch& x, const Touch& y) {
                                  return x.label == y.label && std::abs(x.arc - y.arc) <= dedupe;
                              }),
                  touches.end());

    // Interval delimiters; zone between consecutive delimiters is constant.
    std::vector<double> delim{0.0};
    for (const auto& t : touches) delim.push_back(t.arc);
    delim.push_back(c.length());
    std::sort(delim.begin(), delim.end());
    delim.erase(std::unique(delim.begin(), delim.end(),
                            [&](double x, double y) { return std::abs(x - y) <= dedupe; }),
                delim.end());

    const std::size_t m = delim.size() - 1;
    std::vector<bool> in_shell(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double rho = distance(c.at(0.5 * (delim[i] + delim[i + 1])), shell.center);
        in_shell[i] = rho >= shell.inner && rho <= shell.outer;
    }

    // Greedy matching of opposite-boundary touches within each maximal
    // shell-confined interval (touches at its closure endpoints included);
    // earliest-finish matching maximizes the number of disjoint traversals.
    long count = 0;
    std::size_t ti = 0;
    for (std::size_t i = 0; i < m;) {
        if (!in_shell[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < m && in_shell[j + 1]) ++j;
        const double lo = delim[i] - dedupe;
        const double hi = delim[j + 1] + dedupe;
        while (ti < touches.size() && touches[ti].arc < lo) ++ti;  // isolated tangencies
        int pending = -1;
        while (ti < touches.size() && touches[ti].arc <= hi) {
            if (pending == -1) {
                pending = touches[ti].label;
            } else if (touches[ti].label != pending) {
                ++count;
                pending = -1;
            }
            ++ti;
        }
        i = j + 1;
    }
    return count;
}

long shell_traversals(const CurveConfig& F, const Shell& shell) {
    long total = 0;
    for (const auto& c : F.curves) total += shell_traversals(c, shell);
    return total;
}

double min_kfold_scale(const CurveConfig& F, double eps, int k) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("min_kfold_scale: eps in (0,1)");
    if (k < 1) throw std::invalid_argument("min_kfold_scale: k >= 1");
    if (F.curves.empty()) return 1.0;
    const int d = F.curves.front().dim();
    const double floor_scale = F.cutoff > 0.0 ? F.cutoff : std::pow(2.0, -20);
    const double max_diam = max_curve_diameter(F);

    int n_hi = 0;
    while (std::pow(2.0, -(n_hi + 1)) >= floor_scale) ++n_hi;

    for (int n = n_hi; n >= 0; --n) {
        const double r = std::pow(2.0, -n);
        const double ra = 3.0 * std::pow(r, 1.0 + eps);
        const double rb = r / 2.0;
        const double inner = std::min(ra, rb);
        const double outer = std::max(ra, rb);
        if (outer - inner > max_diam) continue;  // no curve can span the shell
        const double h = 2.0 * std::pow(r, 1.0 + eps) / std::sqrt(static_cast<double>(d));

        // Candidate centers: grid points within `inner` of some curve point
        // (a traversal needs a curve endpoint on the inner sphere).
        const std::int64_t rad = static_cast<std::int64_t>(std::ceil(inner / h)) + 1;
        std::unordered_set<std::uint64_t> seen;
        std::vector<std::array<std::int64_t, 3>> centers;
        auto stamp = [&](const Point& p) {
            std::int64_t base[3] = {0, 0, 0};
            for (int i = 0; i < d; ++i) base[i] = static_cast<std::int64_t>(std::llround(p[i] / h));
            std::int64_t z[3] = {0, 0, 0};
            for (std::int64_t dx = -rad; dx <= rad; ++dx) {
                z[0] = base[0] + dx;
                for (std::int64_t dy = -rad; dy <= rad; ++dy) {
                    z[1] = base[1] + dy;
                    if (d == 2) {
                        if (seen.insert(cell_key(z, d)).second) centers.push_back({z[0], z[1], 0});
                        continue;
                    }
                    for (std::int64_t dz = -rad; dz <= rad; ++dz) {
                        z[2] = base[2] + dz;
                        if (seen.insert(cell_key(z, d)).second)
                            centers.push_back({z[0], z[1], z[2]});
                    }
                }
            }
        };
        for (const auto& c : F.curves) {
            const auto& v = c.vertices();
            stamp(v[0]);
            for (std::size_t i = 0; i + 1 < v.size(); ++i) {
                const double leg = distance(v[i], v[i + 1]);
                const int steps = std::max(1, static_cast<int>(std::ceil(leg / (h / 2.0))));
                for (int s = 1; s <= steps; ++s)
                    stamp(lerp(v[i], v[i + 1], static_cast<double>(s) / steps));
            }
        }

        for (const auto& z : centers) {
            Point x(0.0, 0.0);
            x.dim = d;
            for (int i = 0; i < d; ++i) x[i] = static_cast<double>(z[static_cast<std::size_t>(i)]) * h;
            if (shell_traversals(F, Shell{x, inner, outer}) >= k) return r;
        }
    }
    return 1.0;
}

namespace {

// Scan the listed contiguous leg ranges of `c` for the earliest traversal of
// `cyl`; legs outside the ranges are guaranteed outside the cylinder, so the
// state resets between ranges.  anchor_r > 0 requires the endpoints within
// anchor_r of the face centers instead of the tol-slabs at the face planes.
std::optional<ArcRange> traversal_scan(const PolyCurve& c, const Cylinder& cyl, double tol,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& groups,
                                       double anchor_r = -1.0) {
    const double L = cyl.length();
    const double w2 = cyl.width / 2.0;
    const double slab = std::max(tol, 1e-12 * L);
    const Point dir = (1.0 / L) * (cyl.face_b - cyl.face_a);
    const auto& v = c.vertices();

    struct State {
        std::optional<double> e0, eL;  // earliest slab-entry arcs
        bool prev0 = false, prevL = false;
        bool extending = false;  // found a traversal, extending s1 forward
        int target = 0;          // slab being extended through (0 or 1)
        double s0 = 0.0, s1 = 0.0;
    } st;
    std::optional<ArcRange> found;

    auto classify = [&](double arc, bool& inside, bool& n0, bool& nL) {
        const Point pos = c.at(arc);
        double ax = 0.0, rad = 0.0;
        cyl.decompose(pos, ax, rad);
        const double slk = 1e-12 * (L + cyl.width);
        inside = rad <= w2 + slk && ax >= -slk && ax <= L + slk;
        if (anchor_r > 0.0) {
            n0 = distance(pos, cyl.face_a) <= anchor_r + slk;
            nL = distance(pos, cyl.face_b) <= anchor_r + slk;
        } else {
            n0 = ax <= slab + slk;
            nL = ax >= L - slab - slk;
        }
    };

    // Feed one constant-classification interval [p, q] to the state machine;
    // returns true when the final answer is ready.
    auto feed = [&](double p, double q, bool inside, bool n0, bool nL) {
        if (st.extending) {
            const bool same = inside && (st.target == 0 ? n0 : nL);
            if (!same) {
                found = ArcRange{st.s0, st.s1};
                return true;
            }
            st.s1 = q;
            return false;
        }
        if (!inside) {
            st.e0.reset();
            st.eL.reset();
            st.prev0 = st.prevL = false;
            return false;
        }
        if (n0 && !st.prev0 && !st.e0) st.e0 = p;
        if (nL && !st.prevL && !st.eL) st.eL = p;
        st.prev0 = n0;
        st.prevL = nL;
        if (st.e0 && st.eL) {
            // The later entry is the arrival side; extend through its slab run.
            if (*st.e0 <= *st.eL) {
                st.s0 = *st.e0;
                st.target = 1;
            } else {
                st.s0 = *st.eL;
                st.target = 0;
            }
            st.s1 = q;
            st.extending = true;
        }
        return false;
    };

    auto flush = [&]() {
        if (st.extending && !found) found = ArcRange{st.s0, st.s1};
        st = State{};
    };

    for (const auto& [lo, hi] : groups) {
        for (std::size_t i = lo; i < hi; ++i) {
            const Point& a = v[i];
            const Point& b = v[i + 1];
            const double base = c.arc_at_vertex(i);
            const double leg_len = c.arc_at_vertex(i + 1) - base;

            // Cheap reject: the whole leg is far outside the cylinder.
            const double reach = w2 + L + slab;
            if (distance(a, cyl.face_a) > reach + leg_len &&
                distance(b, cyl.face_a) > reach + leg_len) {
                flush();
                if (found) return found;
                continue;
            }

            // Event parameters on this leg: axial level crossings (affine) and
            // radial boundary crossings (quadratic).
            std::vector<double> ts{0.0, 1.0};
            const Point q0 = a - cyl.face_a;
            const Point ul = b - a;
            const double ax0 = dot(q0, dir);
            const double dax = dot(ul, dir);
            for (double level : {0.0, slab, L - slab, L}) {
                if (dax != 0.0) {
                    const double t = (level - ax0) / dax;
                    if (t > 0.0 && t < 1.0) ts.push_back(t);
                }
            }
            if (anchor_r > 0.0) {
                for (const Point* f : {&cyl.face_a, &cyl.face_b}) {
                    std::array<double, 2> roots{};
                    const int n = sphere_crossings(a, ul, *f, anchor_r, 0.0, 1.0, roots);
                    for (int i = 0; i < n; ++i) {
                        const double t = roots[static_cast<std::size_t>(i)];
                        if (t > 0.0 && t < 1.0) ts.push_back(t);
                    }
                }
            }
            {
                const double A = norm2(ul) - dax * dax;
                const double B = 2.0 * (dot(q0, ul) - ax0 * dax);
                const double C = norm2(q0) - ax0 * ax0 - w2 * w2;
                if (A > 0.0) {
                    const double disc = B * B - 4.0 * A * C;
                    if (disc >= 0.0) {
                        const double sq = std::sqrt(disc);
                        const double qq = -0.5 * (B + (B >= 0.0 ? sq : -sq));
                        for (double t : {qq / A, qq != 0.0 ? C / qq : qq / A})
                            if (t > 0.0 && t < 1.0) ts.push_back(t);
                    }
                }
            }
            std::sort(ts.begin(), ts.end());
            for (std::size_t j = 0; j + 1 < ts.size(); ++j) {
                if (ts[j + 1] - ts[j] <= 1e-15) continue;
                const double p = base + ts[j] * leg_len;
                const double q = base + ts[j + 1] * leg_len;
                bool inside = false, n0 = false, nL = false;
                classify(0.5 * (p + q), inside, n0, nL);
                if (feed(p, q, inside, n0, nL)) return found;
            }
        }
        flush();
        if (found) return found;
    }
    return found;
}

}  // namespace

std::optional<ArcRange> cylinder_traversal(const PolyCurve& c, const Cylinder& cyl, double tol) {
    cyl.validate();
    if (tol < 0.0) throw std::invalid_argument("cylinder_traversal: tol >= 0");
    if (c.single_point()) return std::nullopt;
    std::vector<std::pair<std::size_t, std::size_t>> all{{0, c.size() - 1}};
    return traversal_scan(c, cyl, tol, all);
}

std::string RunRecord::record() const {
    std::ostringstream os;
    os.precision(17);
    const int d = cylinder.face_a.dim;
    os << "run scale=" << scale_index << " L=" << cylinder.length() << " ax=";
    for (int i = 0; i < d; ++i) os << (i ? "," : "") << cylinder.face_a[i];
    os << " bx=";
    for (int i = 0; i < d; ++i) os << (i ? "," : "") << cylinder.face_b[i];
    os << " width=" << cylinder.width << " curve=" << curve_index << " s0=" << arc_range.s0
       << " s1=" << arc_range.s1;
    return os.str();
}

namespace {

// Per-curve spatial bucket index over legs, bucket size bs.
struct LegIndex {
    double bs;
    int d;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells;

    LegIndex(const PolyCurve& c, double bucket) : bs(bucket), d(c.dim()) {
        const auto& v = c.vertices();
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            std::int64_t lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
            for (int j = 0; j < d; ++j) {
                lo[j] = static_cast<std::int64_t>(
                    std::floor(std::min(v[i][j], v[i + 1][j]) / bs));
                hi[j] = static_cast<std::int64_t>(
                    std::floor(std::max(v[i][j], v[i + 1][j]) / bs));
            }
            std::int64_t z[3] = {0, 0, 0};
            for (z[0] = lo[0]; z[0] <= hi[0]; ++z[0])
                for (z[1] = lo[1]; z[1] <= hi[1]; ++z[1]) {
                    if (d == 2) {
                        cells[cell_key(z, d)].push_back(static_cast<std::uint32_t>(i));
                        continue;
                    }
                    for (z[2] = lo[2]; z[2] <= hi[2]; ++z[2])
                        cells[cell_key(z, d)].push_back(static_cast<std::uint32_t>(i));
                }
        }
    }

    // Contiguous leg-index ranges whose legs may meet the given box.
    std::vector<std::pair<std::size_t, std::size_t>> gather(const Point& blo,
                                                            const Point& bhi) const {
        std::vector<std::uint32_t> ids;
        std::int64_t lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
        for (int j = 0; j < d; ++j) {
            lo[j] = static_cast<std::int64_t>(std::floor(blo[j] / bs));
            hi[j] = static_cast<std::int64_t>(std::floor(bhi[j] / bs));
        }
        std::int64_t z[3] = {0, 0, 0};
        auto grab = [&]() {
            const auto it = cells.find(cell_key(z, d));
            if (it != cells.end()) ids.insert(ids.end(), it->second.begin(), it->second.end());
        };
        for (z[0] = lo[0]; z[0] <= hi[0]; ++z[0])
            for (z[1] = lo[1]; z[1] <= hi[1]; ++z[1]) {
                if (d == 2) {
                    grab();
                    continue;
                }
                for (z[2] = lo[2]; z[2] <= hi[2]; ++z[2]) grab();
            }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        std::vector<std::pair<std::size_t, std::size_t>> groups;
        for (std::size_t i = 0; i < ids.size();) {
            std::size_t j = i;
            while (j + 1 < ids.size() && ids[j + 1] == ids[j] + 1) ++j;
            groups.emplace_back(ids[i], ids[j] + 1);
            i = j + 1;
        }
        return groups;
    }
};

}  // namespace

namespace {

// Emits every straight run at ladder scale k to `sink` (which returns false
// to request an early stop); returns false when stopped early.
template <typename Sink>
bool scan_scale(const CurveConfig& F, const ScaleLadder& ladder, int k, double tol, bool anchored,
                Sink&& sink) {
    const int d = F.curves.front().dim();
    {
        const double Lk = ladder.scale(k);
        const double len = Lk / 2.0;
        // Cross-sectional diameter L_k / sqrt(gamma).  The width must stay
        // well below the length for "straight run" to mean anything at the
        // benchmark gammas (8..16), so the O(1) inflation constant of the
        // discretization is absorbed into it.
        const double w = Lk / std::sqrt(ladder.gamma);
        const double Lp = Lk / ladder.gamma;
        const double band_lo = len * (1.0 - 1.0 / ladder.gamma);
        const double band_hi = len * (1.0 + 1.0 / ladder.gamma);

        // Ring of grid offsets realizing the face-center distance band; only
        // lexicographically positive offsets so each unordered pair comes up
        // once.
        std::vector<std::array<std::int64_t, 3>> ring;
        {
            const std::int64_t zr = static_cast<std::int64_t>(std::ceil(band_hi / Lp));
            std::int64_t z[3] = {0, 0, 0};
            auto consider = [&]() {
                double n2 = 0;
                for (int j = 0; j < d; ++j)
                    n2 += static_cast<double>(z[j]) * static_cast<double>(z[j]);
                const double dist = std::sqrt(n2) * Lp;
                if (dist < band_lo - 1e-12 * Lk || dist > band_hi + 1e-12 * Lk) return;
                for (int j = 0; j < d; ++j) {
                    if (z[j] > 0) break;
                    if (z[j] < 0) return;
                }
                ring.push_back({z[0], z[1], z[2]});
            };
            for (z[0] = -zr; z[0] <= zr; ++z[0])
                for (z[1] = -zr; z[1] <= zr; ++z[1]) {
                    if (d == 2) {
                        consider();
                        continue;
                    }
                    for (z[2] = -zr; z[2] <= zr; ++z[2]) consider();
                }
        }

        // Anchored runs must pass near the face centers themselves; the grid
        // rounding contributes up to Lp*sqrt(d)/2 of slack.
        const double anchor_r =
            anchored ? tol + Lp * std::sqrt(static_cast<double>(d)) / 2.0 : -1.0;

        // Candidate face centers: grid points within reach of some curve
        // (w/2 + tol for slab traversals, anchor_r for anchored ones).
        const double reach_r = anchored ? anchor_r : w / 2.0 + tol;
        const std::int64_t rad = static_cast<std::int64_t>(std::ceil(reach_r / Lp)) + 1;
        std::unordered_set<std::uint64_t> cand;
        {
            std::int64_t z[3] = {0, 0, 0};
            auto stamp = [&](const Point& p) {
                std::int64_t base[3] = {0, 0, 0};
                for (int j = 0; j < d; ++j)
                    base[j] = static_cast<std::int64_t>(std::llround(p[j] / Lp));
                for (std::int64_t dx = -rad; dx <= rad; ++dx) {
                    z[0] = base[0] + dx;
                    for (std::int64_t dy = -rad; dy <= rad; ++dy) {
                        z[1] = base[1] + dy;
                        if (d == 2) {
                            cand.insert(cell_key(z, d));
                            continue;
                        }
                        for (std::int64_t dz = -rad; dz <= rad; ++dz) {
                            z[2] = base[2] + dz;
                            cand.insert(cell_key(z, d));
                        }
                    }
                }
            };
            for (const auto& c : F.curves) {
                const auto& v = c.vertices();
                stamp(v[0]);
                for (std::size_t i = 0; i + 1 < v.size(); ++i) {
                    const double leg = distance(v[i], v[i + 1]);
                    const int steps = std::max(1, static_cast<int>(std::ceil(leg / (Lp / 2.0))));
                    for (int s = 1; s <= steps; ++s)
                        stamp(lerp(v[i], v[i + 1], static_cast<double>(s) / steps));
                }
            }
        }

        std::vector<LegIndex> indices;
        indices.reserve(F.curves.size());
        for (const auto& c : F.curves) indices.emplace_back(c, Lk);

        auto decode = [&](std::uint64_t key, std::int64_t* z) {
            for (int j = d - 1; j >= 0; --j) {
                z[j] = static_cast<std::int64_t>(key & 0x1FFFFF) - (1 << 20);
                key >>= 21;
            }
        };

        const double pad = w / 2.0 + tol + 1e-9 * Lk;
        for (const std::uint64_t key : cand) {
            std::int64_t za[3] = {0, 0, 0};
            decode(key, za);
            for (const auto& off : ring) {
                std::int64_t zb[3] = {za[0] + off[0], za[1] + off[1], za[2] + off[2]};
                if (!cand.count(cell_key(zb, d))) continue;
                Cylinder cyl;
                cyl.face_a.dim = cyl.face_b.dim = d;
                for (int j = 0; j < d; ++j) {
                    cyl.face_a[j] = static_cast<double>(za[j]) * Lp;
                    cyl.face_b[j] = static_cast<double>(zb[j]) * Lp;
                }
                cyl.width = w;
                Point blo = cyl.face_a, bhi = cyl.face_a;
                for (int j = 0; j < d; ++j) {
                    blo[j] = std::min(cyl.face_a[j], cyl.face_b[j]) - pad;
                    bhi[j] = std::max(cyl.face_a[j], cyl.face_b[j]) + pad;
                }
                for (std::size_t ci = 0; ci < F.curves.size(); ++ci) {
                    const auto groups = indices[ci].gather(blo, bhi);
                    if (groups.empty()) continue;
                    const auto hit = traversal_scan(F.curves[ci], cyl, tol, groups, anchor_r);
                    if (hit && !sink(RunRecord{cyl, k, static_cast<int>(ci), *hit}))
                        return false;
                }
            }
        }
    }
    return true;
}

}  // namespace

RunScan detect_straight_runs(const CurveConfig& F, const ScaleLadder& ladder, double tol,
                             bool anchored) {
    ladder.validate();
    F.validate();
    RunScan scan;
    if (F.curves.empty()) return scan;
    if (tol < 0.0) tol = F.cutoff;

    for (int k = 0; k <= ladder.k_max; ++k) {
        // Scales whose anchoring grid L_k/gamma falls below the lattice
        // cutoff always carry runs (the curve is locally straight at the
        // lattice step), so they say nothing about the curve and are skipped.
        if (F.cutoff > 0.0 && ladder.scale(k) < F.cutoff * ladder.gamma) {
            ++scan.skipped_scales;
            continue;
        }
        scan_scale(F, ladder, k, tol, anchored, [&](RunRecord r) {
            scan.runs.push_back(std::move(r));
            return true;
        });
    }
    return scan;
}

namespace {

// Whether `outer_cyl` contains `inner_cyl`.  Exact for d = 2 (rectangle
// corners); for d = 3 the face rims are sampled, a conservative check.
bool cylinder_contains(const Cylinder& outer_cyl, const Cylinder& inner_cyl) {
    const int d = outer_cyl.face_a.dim;
    const double slack = 1e-9 * outer_cyl.width;
    const Point axis = inner_cyl.face_b - inner_cyl.face_a;
    const double L = norm(axis);
    if (d == 2) {
        Point n(-axis[1] / L, axis[0] / L);
        for (const Point* f : {&inner_cyl.face_a, &inner_cyl.face_b})
            for (double sgn : {-1.0, 1.0})
                if (!outer_cyl.contains(*f + (sgn * inner_cyl.width / 2.0) * n, slack))
                    return false;
        return true;
    }
    // Orthonormal frame perpendicular to the axis.
    Point u = (1.0 / L) * axis;
    Point e1(0.0, 0.0, 0.0);
    e1.dim = 3;
    int least = 0;
    for (int j = 1; j < 3; ++j)
        if (std::abs(u[j]) < std::abs(u[least])) least = j;
    e1[least] = 1.0;
    e1 = e1 - dot(e1, u) * u;
    e1 = (1.0 / norm(e1)) * e1;
    Point e2(u[1] * e1[2] - u[2] * e1[1], u[2] * e1[0] - u[0] * e1[2], u[0] * e1[1] - u[1] * e1[0]);
    for (const Point* f : {&inner_cyl.face_a, &inner_cyl.face_b})
        for (int s = 0; s < 16; ++s) {
            const double th = 2.0 * 3.14159265358979323846 * s / 16.0;
            const Point rim = *f + (inner_cyl.width / 2.0 * std::cos(th)) * e1 +
                              (inner_cyl.width / 2.0 * std::sin(th)) * e2;
            if (!outer_cyl.contains(rim, slack)) return false;
        }
    return true;
}

}  // namespace

SparsityVerdict sparsity_check(const RunScan& scan, const ScaleLadder& ladder) {
    SparsityVerdict v;
    std::vector<std::size_t> order(scan.runs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scan.runs[a].scale_index < scan.runs[b].scale_index;
    });
    std::vector<int> len(scan.runs.size(), 1);
    std::vector<std::ptrdiff_t> parent(scan.runs.size(), -1);

    std::size_t best = scan.runs.size();
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const std::size_t i = order[oi];
        const RunRecord& ri = scan.runs[i];
        for (std::size_t oj = 0; oj < oi; ++oj) {
            const std::size_t j = order[oj];
            const RunRecord& rj = scan.runs[j];
            if (rj.scale_index >= ri.scale_index) continue;
            if (len[j] + 1 <= len[i]) continue;
            // Centers further apart than the big cylinder's reach cannot nest.
            if (distance(rj.cylinder.face_a, ri.cylinder.face_a) >
                rj.cylinder.length() + rj.cylinder.width)
                continue;
            if (cylinder_contains(rj.cylinder, ri.cylinder)) {
                len[i] = len[j] + 1;
                parent[i] = static_cast<std::ptrdiff_t>(j);
            }
        }
        const double need = 0.5 * std::max(ri.scale_index, ladder.k0);
        if (len[i] >= need) {
            if (best == scan.runs.size() || len[i] > len[best]) best = i;
        }
    }
    if (best == scan.runs.size()) return v;
    v.sparse = false;
    for (std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(best); cur >= 0; cur = parent[cur])
        v.witness.push_back(scan.runs[static_cast<std::size_t>(cur)]);
    std::reverse(v.witness.begin(), v.witness.end());
    return v;
}

SparsityVerdict sparsity_check(const CurveConfig& F, const ScaleLadder& ladder, double tol,
                               bool anchored) {
    ladder.validate();
    F.validate();
    SparsityVerdict v;
    if (F.curves.empty()) return v;
    const int d = F.curves.front().dim();
    if (tol < 0.0) tol = F.cutoff;

    // Streaming chain DP over scales: runs at scale k only ever extend chains
    // ending at coarser scales, so each scale is scanned once and the scan is
    // aborted as soon as a witness chain reaches the sparsity threshold.
    struct Node {
        RunRecord run;
        int len;
        std::ptrdiff_t parent;
    };
    std::vector<Node> nodes;
    // Per scale: spatial hash of node indices keyed by the face_a cell at that
    // scale's nesting reach, so containment candidates are a 3^d neighborhood.
    struct ScaleHash {
        double cell = 0.0;
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells;
    };
    std::vector<ScaleHash> hashes(static_cast<std::size_t>(ladder.k_max) + 1);

    std::ptrdiff_t hit = -1;
    for (int k = 0; k <= ladder.k_max && hit < 0; ++k) {
        // Same scale cutoff as detect_straight_runs: the anchoring grid must
        // stay resolvable at the lattice step.
        if (F.cutoff > 0.0 && ladder.scale(k) < F.cutoff * ladder.gamma) continue;
        const double need = 0.5 * std::max(k, ladder.k0);
        // Max nesting reach at this scale: face distance Lk/2*(1+1/gamma)
        // plus width Lk/sqrt(gamma).
        hashes[static_cast<std::size_t>(k)].cell =
            ladder.scale(k) * (0.5 * (1.0 + 1.0 / ladder.gamma) + 1.0 / std::sqrt(ladder.gamma));
        scan_scale(F, ladder, k, tol, anchored, [&](RunRecord r) {
            Node node{std::move(r), 1, -1};
            for (int p = 0; p < k; ++p) {
                const ScaleHash& h = hashes[static_cast<std::size_t>(p)];
                if (h.cells.empty()) continue;
                std::int64_t base[3] = {0, 0, 0};
                for (int j = 0; j < d; ++j)
                    base[j] = static_cast<std::int64_t>(
                        std::floor(node.run.cylinder.face_a[j] / h.cell));
                std::int64_t z[3] = {0, 0, 0};
                for (std::int64_t dx = -1; dx <= 1; ++dx)
                    for (std::int64_t dy = -1; dy <= 1; ++dy)
                        for (std::int64_t dz = -(d == 3); dz <= (d == 3); ++dz) {
                            z[0] = base[0] + dx;
                            z[1] = base[1] + dy;
                            z[2] = base[2] + dz;
                            const auto it = h.cells.find(cell_key(z, d));
                            if (it == h.cells.end()) continue;
                            for (const std::size_t j : it->second) {
                                const Node& big = nodes[j];
                                if (big.len + 1 <= node.len) continue;
                                if (distance(big.run.cylinder.face_a, node.run.cylinder.face_a) >
                                    big.run.cylinder.length() + big.run.cylinder.width)
                                    continue;
                                if (cylinder_contains(big.run.cylinder, node.run.cylinder)) {
                                    node.len = big.len + 1;
                                    node.parent = static_cast<std::ptrdiff_t>(j);
                                }
                            }
                        }
            }
            ScaleHash& hk = hashes[static_cast<std::size_t>(k)];
            std::int64_t zk[3] = {0, 0, 0};
            for (int j = 0; j < d; ++j)
                zk[j] =
                    static_cast<std::int64_t>(std::floor(node.run.cylinder.face_a[j] / hk.cell));
            const std::size_t idx = nodes.size();
            const int len = node.len;
            nodes.push_back(std::move(node));
            hk.cells[cell_key(zk, d)].push_back(idx);
            if (len >= need) {
                hit = static_cast<std::ptrdiff_t>(idx);
                return false;
            }
            return true;
        });
    }
    if (hit < 0) return v;
    v.sparse = false;
    for (std::ptrdiff_t cur = hit; cur >= 0; cur = nodes[static_cast<std::size_t>(cur)].parent)
        v.witness.push_back(nodes[static_cast<std::size_t>(cur)].run);
    std::reverse(v.witness.begin(), v.witness.end());
    return v;
}

std::string CrossingEstimate::csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "ratio,k,p,stderr,trials\n";
    for (const auto& c : table)
        os << c.ratio << "," << c.k << "," << c.p << "," << c.std_err << "," << c.trials << "\n";
    return os.str();
}

CrossingEstimate estimate_lambda(const GeneratorSpec& gen, int k, const std::vector<double>& ratios,
                                 long trials, std::uint64_t seed, long min_trials) {
    if (trials < std::max<long>(1, min_trials))
        throw std::invalid_argument("estimate_lambda: too few trials");
    if (ratios.size() < 3) throw std::invalid_argument("estimate_lambda: >= 3 ratios");
    for (double r : ratios)
        if (!(r > 0.0) || !(r < 1.0))
            throw std::invalid_argument("estimate_lambda: ratios in (0,1)");
    GeneratorSpec spec = gen;
    spec.seed = seed;
    const bool field_kind = spec.kind == GeneratorSpec::Kind::bond_perc;

    Point center(0.0, 0.0);
    double R = 0.0;
    if (field_kind) {
        const LatticeField f0 = draw_field(spec, 0);
        const double sx = (f0.nx - 1) * f0.delta;
        const double sy = (f0.ny - 1) * f0.delta;
        center = Point(sx / 2.0, sy / 2.0);
        R = std::min(sx, sy) / 4.0;
    } else {
        const CurveConfig f0 = draw_config(spec, 0);
        const Box b = config_bbox(f0);
        center = 0.5 * (b.lo + b.hi);
        R = b.diameter() / 4.0;
    }
    if (!(R > 0.0)) throw std::invalid_argument("estimate_lambda: degenerate sample domain");

    std::vector<long> hits(ratios.size(), 0);
    for (long t = 0; t < trials; ++t) {
        if (field_kind) {
            const LatticeField f = draw_field(spec, static_cast<std::uint64_t>(t));
            for (std::size_t i = 0; i < ratios.size(); ++i)
                if (shell_cluster_crossings(f, Shell{center, ratios[i] * R, R}) >= k) ++hits[i];
        } else {
            const CurveConfig F = draw_config(spec, static_cast<std::uint64_t>(t));
            for (std::size_t i = 0; i < ratios.size(); ++i)
                if (shell_traversals(F, Shell{center, ratios[i] * R, R}) >= k) ++hits[i];
        }
    }

    CrossingEstimate out;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        const double p = static_cast<double>(hits[i]) / static_cast<double>(trials);
        out.table.push_back({ratios[i], k, p, std::sqrt(p * (1.0 - p) / trials), trials});
        if (p > 0.0) {
            xs.push_back(std::log(1.0 / ratios[i]));
            ys.push_back(std::log(p));
        } else {
            ++out.excluded_cells;
        }
    }
    if (xs.size() >= 2) {
        out.fit = fit_line(xs, ys);
        // p ~ (r/R)^lambda; avoid the cosmetic -0 when the slope is flat
        out.fit.exponent = out.fit.exponent == 0.0 ? 0.0 : -out.fit.exponent;
        out.fit.l_min = *std::min_element(ratios.begin(), ratios.end());
        out.fit.l_max = *std::max_element(ratios.begin(), ratios.end());
        out.fit_ok = true;
    }
    return out;
}

namespace {

double segment_segment_distance(const Point& a0, const Point& a1, const Point& b0,
                                const Point& b1) {
    // Dense parameter sampling refined by a fine grid; adequate for the
    // separation validation (which carries a generous margin).
    double best = std::numeric_limits<double>::infinity();
    const int n = 64;
    for (int i = 0; i <= n; ++i) {
        const Point p = lerp(a0, a1, static_cast<double>(i) / n);
        best = std::min(best, point_segment_distance(p, b0, b1));
        const Point q = lerp(b0, b1, static_cast<double>(i) / n);
        best = std::min(best, point_segment_distance(q, a0, a1));
    }
    return best;
}

}  // namespace

CrossingEstimate estimate_rho(const GeneratorSpec& gen, const std::vector<Cylinder>& family,
                              long trials, std::uint64_t seed) {
    CrossingEstimate out;
    if (family.empty()) {
        out.table.push_back({0.0, 0, 1.0, 0.0, trials});
        return out;
    }
    for (const auto& cyl : family) cyl.validate();
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            const double di = std::hypot(family[i].length(), family[i].width);
            const double dj = std::hypot(family[j].length(), family[j].width);
            const double gap = segment_segment_distance(family[i].face_a, family[i].face_b,
                                                        family[j].face_a, family[j].face_b) -
                               (family[i].width + family[j].width) / 2.0;
            if (gap < std::max(di, dj) * (1.0 - 1e-9))
                throw std::invalid_argument("estimate_rho: cylinder family not well separated");
        }
    if (trials < 100) throw std::invalid_argument("estimate_rho: trials >= 100");

    GeneratorSpec spec = gen;
    spec.seed = seed;
    const bool field_kind = spec.kind == GeneratorSpec::Kind::bond_perc;
    const int K = static_cast<int>(family.size());
    std::vector<long> hits(static_cast<std::size_t>(K), 0);
    for (long t = 0; t < trials; ++t) {
        bool all = true;
        if (field_kind) {
            const LatticeField f = draw_field(spec, static_cast<std::uint64_t>(t));
            for (int j = 0; j < K && all; ++j) {
                all = cylinder_cluster_crossing(f, family[static_cast<std::size_t>(j)]);
                if (all) ++hits[static_cast<std::size_t>(j)];
            }
        } else {
            const CurveConfig F = draw_config(spec, static_cast<std::uint64_t>(t));
            const double tol = F.cutoff;
            for (int j = 0; j < K && all; ++j) {
                bool hit = false;
                for (const auto& c : F.curves)
                    if (cylinder_traversal(c, family[static_cast<std::size_t>(j)], tol)) {
                        hit = true;
                        break;
                    }
                all = hit;
                if (all) ++hits[static_cast<std::size_t>(j)];
            }
        }
    }

    std::vector<double> xs, ys;
    for (int j = 0; j < K; ++j) {
        const double p = static_cast<double>(hits[static_cast<std::size_t>(j)]) /
                         static_cast<double>(trials);
        out.table.push_back(
            {static_cast<double>(j + 1), j + 1, p, std::sqrt(p * (1.0 - p) / trials), trials});
        if (p > 0.0) {
            xs.push_back(static_cast<double>(j + 1));
            ys.push_back(std::log(p));
        } else {
            ++out.excluded_cells;
        }
    }
    if (xs.size() >= 2) {
        out.fit = fit_line(xs, ys);  // slope = log(rho-hat)
        out.fit.l_min = 1.0;
        out.fit.l_max = static_cast<double>(K);
        out.fit_ok = true;
    }
    return out;
}

ConfigStats config_statistics(const CurveConfig& F, const std::vector<double>& r_scales,
                              const std::vector<double>& l_scales,
                              const std::vector<std::vector<double>>* normalizers) {
    if (r_scales.empty() || l_scales.empty())
        throw std::invalid_argument("config_statistics: empty scale lists");
    const double min_r = *std::min_element(r_scales.begin(), r_scales.end());
    const double max_l = *std::max_element(l_scales.begin(), l_scales.end());
    if (max_l > min_r * (1.0 + 1e-12))
        throw std::invalid_argument("config_statistics: need l <= r for every pair");

    ConfigStats out;
    out.r_scales = r_scales;
    out.l_scales = l_scales;

    std::vector<double> diams;
    diams.reserve(F.curves.size());
    for (const auto& c : F.curves) diams.push_back(diameter(c));

    // Cache each curve's cell set per l.
    std::vector<std::vector<std::set<CellKey>>> cells(F.curves.size());
    for (std::size_t ci = 0; ci < F.curves.size(); ++ci) {
        cells[ci].reserve(l_scales.size());
        for (double l : l_scales) {
            const int d = F.curves[ci].dim();
            cells[ci].push_back(grid_cells(F.curves[ci], l / std::sqrt(static_cast<double>(d))));
        }
    }

    out.n_tilde.assign(r_scales.size(), std::vector<long>(l_scales.size(), 0));
    for (std::size_t ri = 0; ri < r_scales.size(); ++ri)
        for (std::size_t li = 0; li < l_scales.size(); ++li) {
            std::set<CellKey> uni;
            for (std::size_t ci = 0; ci < F.curves.size(); ++ci)
                if (diams[ci] >= r_scales[ri])
                    uni.insert(cells[ci][li].begin(), cells[ci][li].end());
            out.n_tilde[ri][li] = static_cast<long>(uni.size());
        }

    if (normalizers) {
        bool ok = normalizers->size() == r_scales.size();
        double u = 0.0;
        for (std::size_t n = 0; ok && n < r_scales.size(); ++n) {
            ok = (*normalizers)[n].size() == l_scales.size();
            for (std::size_t m = 0; ok && m < l_scales.size(); ++m) {
                const double e = (*normalizers)[n][m];
                if (!(e > 0.0)) {
                    ok = false;
                    break;
                }
                u += static_cast<double>(out.n_tilde[n][m]) / e /
                     ((n + 1.0) * (n + 1.0) * (m + 1.0) * (m + 1.0));
            }
        }
        if (ok) out.U = u;
    }
    return out;
}

}  // namespace curvatlas
