#include "curvatlas/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "curvatlas/rng.hpp"

namespace curvatlas {

std::string ExponentFit::record(const std::string& kind) const {
    std::ostringstream os;
    os.precision(17);
    os << "fit kind=" << kind << " exponent=" << exponent << " residual=" << residual_rms
       << " lmin=" << l_min << " lmax=" << l_max << " n=" << n_scales;
    return os.str();
}

ExponentFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 matched points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double n = static_cast<double>(xs.size());
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    ExponentFit fit;
    fit.exponent = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.exponent * sx) / n;
    fit.n_scales = static_cast<int>(xs.size());
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.exponent * xs[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

ExponentFit fit_exponent(const std::vector<ScaleSample>& samples, double l_min, double l_max) {
    if (!(l_min > 0.0) || !(l_min < l_max))
        throw std::invalid_argument("fit_exponent: bad window");
    std::vector<double> xs, ys;  // (log 1/l, log count)
    for (const auto& s : samples) {
        if (s.l < l_min * (1.0 - 1e-12) || s.l > l_max * (1.0 + 1e-12)) continue;
        if (!(s.count >= 1.0))
            throw std::invalid_argument("fit_exponent: counts must be >= 1 inside the window");
        xs.push_back(std::log(1.0 / s.l));
        ys.push_back(std::log(s.count));
    }
    if (xs.size() < 3)
        throw std::invalid_argument("fit_exponent: need at least 3 scales inside the window");
    ExponentFit fit = fit_line(xs, ys);
    fit.l_min = l_min;
    fit.l_max = l_max;
    return fit;
}

double Parametrization::time_at(double arc) const {
    if (arc <= s.front()) return t.front();
    if (arc >= s.back()) return t.back();
    const auto it = std::upper_bound(s.begin(), s.end(), arc);
    const std::size_t i = static_cast<std::size_t>(it - s.begin());
    const double u = (arc - s[i - 1]) / (s[i] - s[i - 1]);
    return t[i - 1] + u * (t[i] - t[i - 1]);
}

double Parametrization::arc_at(double time) const {
    if (time <= t.front()) return s.front();
    if (time >= t.back()) return s.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double u = (time - t[i - 1]) / (t[i] - t[i - 1]);
    return s[i - 1] + u * (s[i] - s[i - 1]);
}

Parametrization reparametrize_holder(const PolyCurve& c, int n_max) {
    if (n_max < 1) throw std::invalid_argument("reparametrize_holder: n_max must be >= 1");
    if (c.single_point()) throw std::invalid_argument("reparametrize_holder: degenerate curve");

    struct ScaleData {
        double weight_psi = 0.0;        // (n+1)^-2 * psi(l_n)
        std::vector<double> cuts;       // greedy cut points, ending at length
    };
    std::vector<ScaleData> scales;
    scales.reserve(static_cast<std::size_t>(n_max) + 1);
    std::vector<double> breakpoints{0.0};
    for (int n = 0; n <= n_max; ++n) {
        const double ln = std::pow(2.0, -static_cast<double>(n));
        PrefixCounts pc = prefix_partition_counts(c, ln);
        ScaleData sd;
        const double w = 1.0 / ((n + 1.0) * (n + 1.0));
        sd.weight_psi = w / static_cast<double>(pc.counts.back());  // psi = 1/M
        sd.cuts = std::move(pc.cuts);
        breakpoints.insert(breakpoints.end(), sd.cuts.begin(), sd.cuts.end());
        scales.push_back(std::move(sd));
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    // Prefix count M(C_s, l_n) at a breakpoint: index of the greedy segment
    // whose closure contains s (segments are the half-open intervals
    // (c_{i-1}, c_i]).
    auto prefix_count = [](const std::vector<double>& cuts, double s) {
        if (s <= 0.0) return 0.0;
        const auto it = std::lower_bound(cuts.begin(), cuts.end(), s);
        return static_cast<double>(it - cuts.begin()) + 1.0;
    };

    Parametrization par;
    par.s = breakpoints;
    par.t.resize(breakpoints.size());
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        double v = 0.0;
        for (const auto& sd : scales) v += sd.weight_psi * prefix_count(sd.cuts, breakpoints[i]);
        par.t[i] = v;
    }
    const double total = par.t.back();
    for (auto& tv : par.t) tv /= total;
    par.t.front() = 0.0;
    par.t.back() = 1.0;

    for (std::size_t i = 1; i < par.t.size(); ++i)
        if (!(par.t[i] > par.t[i - 1]))
            throw std::logic_error("reparametrize_holder: produced a non-increasing time map");
    return par;
}

ModulusReport verify_modulus(const PolyCurve& c, const Parametrization& par, long n_pairs,
                             std::uint64_t seed) {
    ModulusReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    Rng rng(seed);
    // Below the polyline's own resolution the curve is a straight chord, not
    // the limiting object the modulus describes, and partition_count at such
    // scales is astronomically large; skip those pairs.
    const double floor_dq =
        2.0 * std::max(c.step(), 1e-6 * diameter(c));
    std::unordered_map<int, double> psi_cache;
    for (long i = 0; i < n_pairs; ++i) {
        const double t1 = rng.uniform();
        const double t2 = rng.uniform();
        const double dt = std::abs(t1 - t2);
        const Point p1 = c.at(par.arc_at(t1));
        const Point p2 = c.at(par.arc_at(t2));
        const double dq = distance(p1, p2);
        if (dq < floor_dq || dt == 0.0) continue;  // degenerate pair
        // Round the scale up onto a geometric grid (ratio 1.02) and memoize
        // the counts.  psi is nondecreasing in the scale, so rounding up
        // makes the checked inequality strictly harder, never easier.
        const int bucket = static_cast<int>(std::ceil(std::log(dq / 2.0) / std::log(1.02)));
        auto it = psi_cache.find(bucket);
        if (it == psi_cache.end()) {
            const double l_q = std::pow(1.02, static_cast<double>(bucket));
            it = psi_cache.emplace(bucket, 1.0 / static_cast<double>(partition_count(c, l_q)))
                     .first;
        }
        const double psi = it->second;
        const double lg = std::log2(4.0 / dq);
        const double rhs = psi / (2.0 * lg * lg);
        const double margin = dt - rhs;
        ++rep.pairs_checked;
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (margin < -1e-12) ++rep.violations;
    }
    if (rep.pairs_checked == 0) rep.worst_margin = 0.0;
    return rep;
}

void default_window(const PolyCurve& c, double& l_min, double& l_max) {
    const double d = diameter(c);
    const double delta = c.step() > 0.0 ? c.step() : d * 1e-4;
    l_min = 4.0 * delta;
    l_max = d / 4.0;
    if (!(l_min < l_max))
        throw std::invalid_argument("default_window: diameter below 16*cutoff, no usable window");
}

DimensionSummary dimension_summary(const PolyCurve& c, double eps, double l_min, double l_max) {
    if (!(l_min > 0.0) || !(l_min < l_max))
        throw std::invalid_argument("dimension_summary: bad window");
    std::vector<ScaleSample> m_samples, n_samples;
    for (double l = l_max; l >= l_min * (1.0 - 1e-12); l /= 2.0) {
        m_samples.push_back({l, static_cast<double>(partition_count(c, l))});
        n_samples.push_back({l, static_cast<double>(box_count(c, l))});
    }
    DimensionSummary out;
    out.tau = fit_exponent(m_samples, l_min, l_max);
    out.dim_box = fit_exponent(n_samples, l_min, l_max);
    out.alpha_lower = 1.0 / out.tau.exponent;
    const double slack = 2.0 * (out.tau.residual_rms + out.dim_box.residual_rms);
    out.ordering_ok = out.dim_box.exponent <= out.tau.exponent + slack &&
                      out.tau.exponent <= (1.0 + eps) * out.dim_box.exponent + slack;
    return out;
}

}  // namespace curvatlas
