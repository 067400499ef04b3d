#include "curvatlas/curve.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace curvatlas {

PolyCurve::PolyCurve(std::vector<Point> vertices, double step)
    : verts_(std::move(vertices)), step_(step) {
    if (verts_.empty()) throw std::invalid_argument("PolyCurve: empty vertex list");
    if (step_ < 0.0) throw std::invalid_argument("PolyCurve: negative step");
    cum_.resize(verts_.size());
    cum_[0] = 0.0;
    for (std::size_t i = 1; i < verts_.size(); ++i) {
        const double leg = distance(verts_[i - 1], verts_[i]);
        if (leg == 0.0) throw std::invalid_argument("PolyCurve: repeated consecutive vertex");
        if (step_ > 0.0 && leg > step_ * (1.0 + 1e-9))
            throw std::invalid_argument("PolyCurve: leg longer than step cutoff");
        cum_[i] = cum_[i - 1] + leg;
    }
}

std::size_t PolyCurve::leg_at(double s) const {
    if (verts_.size() < 2) return 0;
    auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    std::size_t i = static_cast<std::size_t>(it - cum_.begin());
    if (i == 0) return 0;
    if (i >= verts_.size()) return verts_.size() - 2;
    return i - 1;
}

Point PolyCurve::at(double s) const {
    if (verts_.size() == 1) return verts_.front();
    if (s <= 0.0) return verts_.front();
    if (s >= length()) return verts_.back();
    const std::size_t i = leg_at(s);
    const double t = (s - cum_[i]) / (cum_[i + 1] - cum_[i]);
    return lerp(verts_[i], verts_[i + 1], t);
}

PolyCurve PolyCurve::subcurve(double s0, double s1) const {
    s0 = std::clamp(s0, 0.0, length());
    s1 = std::clamp(s1, 0.0, length());
    if (s1 < s0) std::swap(s0, s1);
    std::vector<Point> vs;
    vs.push_back(at(s0));
    if (s1 > s0) {
        const std::size_t i0 = leg_at(s0);
        const std::size_t i1 = leg_at(s1);
        for (std::size_t i = i0 + 1; i <= i1; ++i) {
            if (cum_[i] > s0 && cum_[i] < s1) {
                if (distance(verts_[i], vs.back()) > 0.0) vs.push_back(verts_[i]);
            }
        }
        const Point end = at(s1);
        if (distance(end, vs.back()) > 0.0) vs.push_back(end);
    }
    return PolyCurve(std::move(vs), step_);
}

double diameter(const PolyCurve& c) {
    // Exact for polygonal curves: the max pairwise distance is attained at
    // vertices.
    const auto& v = c.vertices();
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            best = std::max(best, distance(v[i], v[j]));
    return best;
}

double span(const PolyCurve& c) { return distance(c.front(), c.back()); }

void CurveConfig::validate() const {
    if (cutoff <= 0.0) throw std::invalid_argument("CurveConfig: cutoff must be positive");
    for (const auto& c : curves) {
        if (c.step() != cutoff)
            throw std::invalid_argument("CurveConfig: curve step differs from cutoff");
        for (const auto& p : c.vertices())
            if (!region.contains(p, 1e-9))
                throw std::invalid_argument("CurveConfig: vertex outside region");
    }
}

void write_curveset(std::ostream& os, const CurveConfig& cfg) {
    const int d = cfg.region.dim();
    os << "curveset v1 d=" << d << " delta=" << std::setprecision(17) << cfg.cutoff << "\n";
    for (const auto& c : cfg.curves) {
        os << c.size();
        for (const auto& p : c.vertices())
            for (int i = 0; i < d; ++i) os << ' ' << std::setprecision(17) << p[i];
        os << "\n";
    }
}

CurveConfig read_curveset(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("curveset: missing header");
    int d = 0;
    double delta = 0.0;
    {
        std::istringstream hs(header);
        std::string magic, ver, tok;
        hs >> magic >> ver;
        if (magic != "curveset" || ver != "v1")
            throw std::runtime_error("curveset: bad header: " + header);
        while (hs >> tok) {
            if (tok.rfind("d=", 0) == 0) d = std::stoi(tok.substr(2));
            else if (tok.rfind("delta=", 0) == 0) delta = std::stod(tok.substr(6));
        }
        if (d < 1 || d > 3 || delta <= 0.0)
            throw std::runtime_error("curveset: bad header fields: " + header);
    }
    CurveConfig cfg;
    cfg.cutoff = delta;
    Point lo, hi;
    lo.dim = hi.dim = d;
    bool any = false;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::size_t n = 0;
        ls >> n;
        std::vector<Point> vs(n);
        for (std::size_t i = 0; i < n; ++i) {
            vs[i].dim = d;
            for (int k = 0; k < d; ++k)
                if (!(ls >> vs[i][k])) throw std::runtime_error("curveset: truncated curve line");
            for (int k = 0; k < d; ++k) {
                if (!any && i == 0) { lo[k] = hi[k] = vs[i][k]; }
                lo[k] = std::min(lo[k], vs[i][k]);
                hi[k] = std::max(hi[k], vs[i][k]);
            }
            any = true;
        }
        cfg.curves.emplace_back(std::move(vs), delta);
    }
    cfg.region.lo = any ? lo : Point(0, 0);
    cfg.region.hi = any ? hi : Point(1, 1);
    cfg.region.lo.dim = cfg.region.hi.dim = d;
    return cfg;
}

void write_curveset_file(const std::string& path, const CurveConfig& cfg) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_curveset(os, cfg);
}

CurveConfig read_curveset_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_curveset(is);
}

}  // namespace curvatlas
