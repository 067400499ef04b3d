#include "curvatlas/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "curvatlas/crossings.hpp"

namespace curvatlas {

namespace {

// Exact minimal distance between two segments (2D intersection detected; in
// 3D skew segments are handled by the endpoint projections, adequate for the
// separation assertions which carry slack).
double segment_distance(const Point& a0, const Point& a1, const Point& b0, const Point& b1) {
    if (a0.dim == 2) {
        auto orient = [](const Point& p, const Point& q, const Point& r) {
            return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
        };
        const double o1 = orient(a0, a1, b0), o2 = orient(a0, a1, b1);
        const double o3 = orient(b0, b1, a0), o4 = orient(b0, b1, a1);
        if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0))) return 0.0;
    }
    return std::min(std::min(point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1)),
                    std::min(point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)));
}

double polyline_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < std::max<std::size_t>(a.size(), 1); ++i)
        for (std::size_t j = 0; j + 1 < std::max<std::size_t>(b.size(), 1); ++j)
            best = std::min(best, segment_distance(a[i], a[i + 1], b[j], b[j + 1]));
    if (a.size() == 1)
        for (std::size_t j = 0; j + 1 < b.size(); ++j)
            best = std::min(best, point_segment_distance(a[0], b[j], b[j + 1]));
    if (b.size() == 1)
        for (std::size_t i = 0; i + 1 < a.size(); ++i)
            best = std::min(best, point_segment_distance(b[0], a[i], a[i + 1]));
    if (a.size() == 1 && b.size() == 1) best = distance(a[0], b[0]);
    return best;
}

double point_polyline_distance(const Point& p, const std::vector<Point>& v) {
    if (v.size() == 1) return distance(p, v[0]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        best = std::min(best, point_segment_distance(p, v[i], v[i + 1]));
    return best;
}

// First arc in [s_lo, s_hi] at distance >= radius from `center`; NaN if none.
double first_reach(const PolyCurve& c, double s_lo, double s_hi, const Point& center,
                   double radius) {
    if (distance(c.at(s_lo), center) >= radius) return s_lo;
    const auto& v = c.vertices();
    std::size_t leg = c.leg_at(s_lo);
    for (; leg + 1 < v.size(); ++leg) {
        const double a_arc = std::max(c.arc_at_vertex(leg), s_lo);
        const double b_arc = std::min(c.arc_at_vertex(leg + 1), s_hi);
        if (a_arc >= s_hi) break;
        const double leg_len = c.arc_at_vertex(leg + 1) - c.arc_at_vertex(leg);
        if (leg_len <= 0.0) continue;
        const double t_lo = (a_arc - c.arc_at_vertex(leg)) / leg_len;
        const double t_hi = (b_arc - c.arc_at_vertex(leg)) / leg_len;
        const Point u = v[leg + 1] - v[leg];
        // Inside the ball the quadratic |pos - center|^2 - radius^2 is
        // negative between its roots; the first reach is the upper root.
        std::array<double, 2> roots{};
        const int n = sphere_crossings(v[leg], u, center, radius, t_lo, 1.0, roots);
        for (int i = 0; i < n; ++i) {
            const double t = roots[static_cast<std::size_t>(i)];
            if (t < t_lo || t > t_hi) continue;
            const double t_probe = std::min(1.0, t + 1e-9);
            if (distance(lerp(v[leg], v[leg + 1], t_probe), center) >= radius * (1.0 - 1e-12))
                return c.arc_at_vertex(leg) + t * leg_len;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Last arc in [s_lo, s_hi] at distance >= radius from `center`; NaN if none.
double last_reach(const PolyCurve& c, double s_lo, double s_hi, const Point& center,
                  double radius) {
    const auto& v = c.vertices();
    std::size_t leg = c.leg_at(s_hi);
    while (true) {
        const double a_arc = std::max(c.arc_at_vertex(leg), s_lo);
        const double b_arc = std::min(c.arc_at_vertex(leg + 1), s_hi);
        if (b_arc > a_arc) {
            const double leg_len = c.arc_at_vertex(leg + 1) - c.arc_at_vertex(leg);
            const double t_lo = (a_arc - c.arc_at_vertex(leg)) / leg_len;
            const double t_hi = (b_arc - c.arc_at_vertex(leg)) / leg_len;
            if (distance(c.at(b_arc), center) >= radius) return b_arc;
            const Point u = v[leg + 1] - v[leg];
            std::array<double, 2> roots{};
            const int n = sphere_crossings(v[leg], u, center, radius, t_lo, t_hi, roots);
            double best = std::numeric_limits<double>::quiet_NaN();
            for (int i = 0; i < n; ++i) {
                const double t = roots[static_cast<std::size_t>(i)];
                const double t_probe = std::max(0.0, t - 1e-9);
                if (distance(lerp(v[leg], v[leg + 1], t_probe), center) >= radius * (1.0 - 1e-12))
                    best = std::isnan(best) ? t : std::max(best, t);
            }
            if (!std::isnan(best)) return c.arc_at_vertex(leg) + best * leg_len;
        }
        if (leg == 0 || c.arc_at_vertex(leg) <= s_lo) break;
        --leg;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

FractalHierarchy build_hierarchy(const PolyCurve& c, double gamma, int m, int k_max) {
    if (!(gamma > 1.0)) throw std::invalid_argument("build_hierarchy: gamma > 1");
    if (m < 1 || !(m >= gamma / 2.0) || !(m < gamma))
        throw std::invalid_argument("build_hierarchy: m must be an integer in [gamma/2, gamma)");
    if (k_max < 0) throw std::invalid_argument("build_hierarchy: k_max >= 0");
    if (c.single_point()) throw std::invalid_argument("build_hierarchy: degenerate curve");

    FractalHierarchy h;
    h.curve = c;
    h.gamma = gamma;
    h.m = m;
    h.eps = gamma / m - 1.0;
    h.L0 = span(c);
    if (!(h.L0 > 0.0)) throw std::invalid_argument("build_hierarchy: zero span");
    if (c.step() > 0.0 && h.L0 * std::pow(gamma, -k_max) < c.step())
        throw std::invalid_argument("build_hierarchy: curve too short for k_max scales");

    // Gamma_0: from the start to the first exit of the radius-span ball.  The
    // radius is shrunk by an ulp-scale factor so that a curve whose farthest
    // point sits exactly at distance L0 still exits.
    const double exit0 = first_reach(c, 0.0, c.length(), c.front(), h.L0 * (1.0 - 1e-9));
    if (std::isnan(exit0)) throw std::logic_error("build_hierarchy: span point unreachable");
    h.generations.push_back({HierarchySegment{0.0, exit0, -1, 0}});

    for (int k = 0; k < k_max; ++k) {
        const double Lk = h.L0 * std::pow(gamma, -k);
        const double Lk1 = Lk / gamma;
        const double cut_dist = Lk / m;
        std::vector<HierarchySegment> next;
        for (std::size_t pi = 0; pi < h.generations.back().size(); ++pi) {
            HierarchySegment& parent = h.generations[static_cast<std::size_t>(k)][pi];
            const double a = parent.s0, b = parent.s1;

            std::vector<std::vector<Point>> built;  // materialized child vertex chains
            auto dist_to_built = [&](const Point& p) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& ch : built) best = std::min(best, point_polyline_distance(p, ch));
                return best;
            };

            // y_1 = start, x_1 = first exit of the L_{k+1} ball at y_1.
            double y = a;
            double x = first_reach(c, a, b, c.at(a), Lk1);
            while (!std::isnan(x)) {
                next.push_back({y, x, static_cast<int>(pi), 0});
                built.push_back(c.subcurve(y, x).vertices());
                ++parent.n_desc;

                // x_{n+1}: first point at distance >= L_k/m from the built
                // segments (1-Lipschitz safe-step scan from x).
                const double res = 1e-5 * Lk1;
                double s = x;
                double found = std::numeric_limits<double>::quiet_NaN();
                while (s <= b) {
                    const double d = dist_to_built(c.at(s));
                    if (d >= cut_dist) {
                        found = s;
                        break;
                    }
                    if (s >= b) break;
                    s = std::min(b, s + std::max(cut_dist - d, res));
                }
                if (std::isnan(found)) break;
                x = found;
                y = last_reach(c, a, x, c.at(x), Lk1);
                if (std::isnan(y)) break;  // cannot happen for valid cuts
            }
        }
        if (next.empty())
            throw std::logic_error("build_hierarchy: a generation produced no segments");
        h.generations.push_back(std::move(next));
    }
    h.validate();
    return h;
}

void FractalHierarchy::validate() const {
    const double slack = 1.0 - 1e-3;
    for (std::size_t k = 0; k < generations.size(); ++k) {
        const double Lk = L0 * std::pow(gamma, -static_cast<double>(k));
        std::vector<std::vector<Point>> chains;
        std::vector<std::pair<Point, Point>> boxes;
        for (const auto& seg : generations[k]) {
            if (!(seg.s0 < seg.s1)) throw std::logic_error("hierarchy: empty segment");
            if (k > 0) {
                const auto& par = generations[k - 1];
                if (seg.parent < 0 || static_cast<std::size_t>(seg.parent) >= par.size())
                    throw std::logic_error("hierarchy: dangling parent");
                const auto& p = par[static_cast<std::size_t>(seg.parent)];
                if (seg.s0 < p.s0 - 1e-12 || seg.s1 > p.s1 + 1e-12)
                    throw std::logic_error("hierarchy: segment not nested in its parent");
            }
            const PolyCurve sub = curve.subcurve(seg.s0, seg.s1);
            // Bounding-box extent is a cheap lower bound on the diameter;
            // only fall back to the exact O(V^2) diameter when it is short.
            const auto& sv = sub.vertices();
            Point blo = sv.front(), bhi = sv.front();
            for (const auto& p : sv)
                for (int i = 0; i < sub.dim(); ++i) {
                    blo[i] = std::min(blo[i], p[i]);
                    bhi[i] = std::max(bhi[i], p[i]);
                }
            double ext = 0.0;
            for (int i = 0; i < sub.dim(); ++i) ext = std::max(ext, bhi[i] - blo[i]);
            if (ext < Lk * slack && diameter(sub) < Lk * slack)
                throw std::logic_error("hierarchy: segment diameter below its scale");
            if (k + 1 < generations.size() && seg.n_desc < m)
                throw std::logic_error("hierarchy: fewer than m descendants");
            chains.push_back(sub.vertices());
            boxes.push_back({blo, bhi});
        }
        const double sep = eps * Lk * slack;
        for (std::size_t i = 0; i < chains.size(); ++i)
            for (std::size_t j = i + 1; j < chains.size(); ++j) {
                // box gap prescreen: far-apart chains cannot violate
                double gap2 = 0.0;
                for (int t = 0; t < static_cast<int>(curve.dim()); ++t) {
                    const double g = std::max({boxes[i].first[t] - boxes[j].second[t],
                                               boxes[j].first[t] - boxes[i].second[t], 0.0});
                    gap2 += g * g;
                }
                if (gap2 >= sep * sep) continue;
                if (polyline_distance(chains[i], chains[j]) < sep)
                    throw std::logic_error("hierarchy: same-generation segments too close");
            }
    }
}

void write_hierarchy(std::ostream& os, const FractalHierarchy& h) {
    os.precision(17);
    os << "hierarchy v1 gamma=" << h.gamma << " m=" << h.m << " L0=" << h.L0
       << " kmax=" << h.generations.size() - 1 << "\n";
    for (std::size_t k = 0; k < h.generations.size(); ++k)
        for (const auto& seg : h.generations[k])
            os << k << " " << seg.parent << " " << seg.s0 << " " << seg.s1 << "\n";
}

DiscreteMeasure hierarchy_measure(const FractalHierarchy& h) {
    if (h.generations.empty()) throw std::invalid_argument("hierarchy_measure: empty hierarchy");
    // Weight of a segment = product of inverse descendant counts of its
    // strict ancestors, times its own 1/n share at each branching.
    std::vector<std::vector<double>> w(h.generations.size());
    w[0].assign(h.generations[0].size(), 1.0 / static_cast<double>(h.generations[0].size()));
    for (std::size_t k = 1; k < h.generations.size(); ++k) {
        w[k].resize(h.generations[k].size());
        for (std::size_t i = 0; i < h.generations[k].size(); ++i) {
            const auto& seg = h.generations[k][i];
            const auto& par = h.generations[k - 1][static_cast<std::size_t>(seg.parent)];
            w[k][i] = w[k - 1][static_cast<std::size_t>(seg.parent)] /
                      static_cast<double>(par.n_desc);
        }
    }
    DiscreteMeasure mu;
    for (std::size_t i = 0; i < h.generations.back().size(); ++i) {
        const auto& seg = h.generations.back()[i];
        const auto verts = h.curve.subcurve(seg.s0, seg.s1).vertices();
        Point best = verts.front();
        for (const auto& p : verts)
            if (lex_less(p, best)) best = p;
        mu.support.push_back(best);
        mu.weights.push_back(w.back()[i]);
    }
    return mu;
}

double energy(const DiscreteMeasure& mu, double s, double l) {
    if (!(s > 0.0) || l < 0.0) throw std::invalid_argument("energy: need s > 0, l >= 0");
    if (mu.support.size() != mu.weights.size())
        throw std::invalid_argument("energy: mismatched support and weights");
    double e = 0.0;
    for (std::size_t i = 0; i < mu.support.size(); ++i)
        for (std::size_t j = 0; j < mu.support.size(); ++j) {
            const double d = std::max(distance(mu.support[i], mu.support[j]), l);
            if (d == 0.0) return std::numeric_limits<double>::infinity();
            e += mu.weights[i] * mu.weights[j] / std::pow(d, s);
        }
    return e;
}

CapacityResult capacity_qp(const std::vector<Point>& points, double s, double l, double tol) {
    if (points.empty()) throw std::invalid_argument("capacity_qp: need >= 1 point");
    if (!(tol > 0.0)) throw std::invalid_argument("capacity_qp: tol > 0");
    const std::size_t n = points.size();
    std::vector<double> K(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double d = std::max(distance(points[i], points[j]), l);
            K[i * n + j] = d > 0.0 ? 1.0 / std::pow(d, s)
                                   : std::numeric_limits<double>::infinity();
        }

    CapacityResult out;
    out.s = s;
    out.l = l;
    out.method = "qp";
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<double> Kw(n);
    auto refresh = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += K[i * n + j] * w[j];
            Kw[i] = acc;
        }
    };
    refresh();
    const long cap = 100000;
    double E = 0.0;
    for (std::size_t i = 0; i < n; ++i) E += w[i] * Kw[i];

    long it = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (; it < cap; ++it) {
        // Gradient is 2 Kw; Frank-Wolfe vertex minimizes it, the away vertex
        // maximizes it over the support.
        std::size_t fw = 0, aw = 0;
        bool aw_set = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (Kw[i] < Kw[fw]) fw = i;
            if (w[i] > 1e-16 && (!aw_set || Kw[i] > Kw[aw])) {
                aw = i;
                aw_set = true;
            }
        }
        double gw = 0.0;
        for (std::size_t i = 0; i < n; ++i) gw += Kw[i] * w[i];
        gap = 2.0 * (gw - Kw[fw]);
        if (gap <= tol * std::max(E, 1e-300)) break;

        const double fw_gain = gw - Kw[fw];
        const double aw_gain = Kw[aw] - gw;
        std::vector<double> d(n, 0.0);
        double t_max;
        if (fw_gain >= aw_gain) {
            for (std::size_t i = 0; i < n; ++i) d[i] = -w[i];
            d[fw] += 1.0;
            t_max = 1.0;
        } else {
            for (std::size_t i = 0; i < n; ++i) d[i] = w[i];
            d[aw] -= 1.0;
            t_max = w[aw] / (1.0 - w[aw] + 1e-300);
        }
        // Exact line search for the quadratic: E(w + t d).
        double gd = 0.0;
        std::vector<double> Kd(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += K[i * n + j] * d[j];
            Kd[i] = acc;
            gd += Kw[i] * d[i];
        }
        double dKd = 0.0;
        for (std::size_t i = 0; i < n; ++i) dKd += d[i] * Kd[i];
        double t = dKd > 0.0 ? std::clamp(-gd / dKd, 0.0, t_max) : t_max;
        if (t <= 0.0) break;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = std::max(0.0, w[i] + t * d[i]);
            Kw[i] += t * Kd[i];
        }
        if ((it & 1023) == 1023) refresh();  // curb incremental-update drift
        E = 0.0;
        for (std::size_t i = 0; i < n; ++i) E += w[i] * Kw[i];
    }
    out.iterations = it;
    out.converged = gap <= tol * std::max(E, 1e-300);
    out.gap = E > 0.0 ? gap / E : 0.0;
    out.energy_value = E;
    out.capacity = 1.0 / E;
    out.weights = std::move(w);
    return out;
}

std::string CapacityResult::record() const {
    std::ostringstream os;
    os.precision(17);
    os << "cap s=" << s << " l=" << l << " E=" << energy_value << " C=" << capacity
       << " method=" << method << " gap=" << gap;
    return os.str();
}

double capacity_lower_bound(const FractalHierarchy& h, double s, int k0) {
    if (!(s > 0.0)) throw std::invalid_argument("capacity_lower_bound: s > 0");
    if (k0 < 0) throw std::invalid_argument("capacity_lower_bound: k0 >= 0");
    const double beta = std::sqrt(static_cast<double>(h.m) * (h.m + 1.0));
    const double gs = std::pow(h.gamma, s);
    if (!(gs < beta))
        throw std::invalid_argument("capacity_lower_bound: requires gamma^s < sqrt(m(m+1))");
    const double denom = std::pow(h.gamma, s * k0) + beta / (1.0 - gs / beta);
    return std::pow(h.eps * h.L0, s) / denom;
}

double dimension_lower_bound(const CurveConfig& F, int m, const std::vector<double>& gammas,
                             const ScaleLadder& base, std::vector<GammaReport>* report) {
    if (m < 1) throw std::invalid_argument("dimension_lower_bound: m >= 1");
    const double beta = std::sqrt(static_cast<double>(m) * (m + 1.0));
    double best = -std::numeric_limits<double>::infinity();
    bool any_sparse = false;
    for (double gamma : gammas) {
        if (!(gamma > m)) throw std::invalid_argument("dimension_lower_bound: gamma > m required");
        ScaleLadder ladder = base;
        ladder.gamma = gamma;
        const SparsityVerdict v = sparsity_check(F, ladder);
        GammaReport r;
        r.gamma = gamma;
        r.sparse = v.sparse;
        r.s = v.sparse ? std::log(beta) / std::log(gamma) : 0.0;
        if (v.sparse) {
            any_sparse = true;
            best = std::max(best, r.s);
        }
        if (report) report->push_back(r);
    }
    if (!any_sparse) return 1.0;
    return best;
}

}  // namespace curvatlas
