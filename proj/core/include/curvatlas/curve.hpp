#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvatlas/geometry.hpp"

namespace curvatlas {

// An ordered polygonal chain with a step-size cutoff.  step == 0 marks a
// "continuum" fixture whose legs are not constrained by a lattice spacing.
class PolyCurve {
public:
    PolyCurve() = default;
    PolyCurve(std::vector<Point> vertices, double step);

    const std::vector<Point>& vertices() const { return verts_; }
    double step() const { return step_; }
    int dim() const { return verts_.empty() ? 0 : verts_.front().dim; }
    std::size_t size() const { return verts_.size(); }
    bool single_point() const { return verts_.size() == 1; }

    double length() const { return cum_.back(); }
    // Cumulative arc length up to vertex i.
    double arc_at_vertex(std::size_t i) const { return cum_[i]; }

    const Point& front() const { return verts_.front(); }
    const Point& back() const { return verts_.back(); }

    // Point at arc-length s, clamped to [0, length].
    Point at(double s) const;

    // Index of the leg containing arc position s (leg i runs from vertex i to
    // i+1), clamped.
    std::size_t leg_at(double s) const;

    // Restrict to the arc range [s0, s1].
    PolyCurve subcurve(double s0, double s1) const;

private:
    std::vector<Point> verts_;
    std::vector<double> cum_;  // cum_[i] = arc length up to vertex i
    double step_ = 0.0;
};

double diameter(const PolyCurve& c);
double span(const PolyCurve& c);

// A finite collection of curves sharing a cutoff inside a bounding region.
struct CurveConfig {
    std::vector<PolyCurve> curves;
    double cutoff = 0.0;
    Box region;

    void validate() const;
};

// Curveset text format: `curveset v1 d=<int> delta=<float>` followed by one
// curve per line, `<n> x1 y1 [z1] x2 y2 ...`, 17 significant digits.
void write_curveset(std::ostream& os, const CurveConfig& cfg);
CurveConfig read_curveset(std::istream& is);
void write_curveset_file(const std::string& path, const CurveConfig& cfg);
CurveConfig read_curveset_file(const std::string& path);

}  // namespace curvatlas
