#pragma once

#include <cmath>
#include <stdexcept>

#include "curvatlas/geometry.hpp"

namespace curvatlas {

// Spherical shell D(x; r, R) = { y : r <= |y - x| <= R }.
struct Shell {
    Point center;
    double inner = 0.0;
    double outer = 0.0;

    void validate() const {
        if (!(inner > 0.0) || !(inner <= outer))
            throw std::invalid_argument("Shell: need 0 < inner <= outer");
    }
};

// Cylinder given by the centers of its two faces and its cross-sectional
// diameter.  In 2D this is a rectangle of the given width.
struct Cylinder {
    Point face_a;
    Point face_b;
    double width = 0.0;

    double length() const { return distance(face_a, face_b); }

    void validate() const {
        if (!(length() > 0.0)) throw std::invalid_argument("Cylinder: zero length");
        if (!(width > 0.0)) throw std::invalid_argument("Cylinder: zero width");
    }

    // Axial coordinate in [0, length] and distance from the axis.
    void decompose(const Point& p, double& axial, double& radial) const {
        const Point u = face_b - face_a;
        const double L = norm(u);
        const Point w = p - face_a;
        axial = dot(w, u) / L;
        const double w2 = norm2(w);
        const double r2 = std::max(0.0, w2 - axial * axial);
        radial = std::sqrt(r2);
    }

    bool contains(const Point& p, double slack = 0.0) const {
        double axial = 0.0, radial = 0.0;
        decompose(p, axial, radial);
        return axial >= -slack && axial <= length() + slack && radial <= width / 2.0 + slack;
    }
};

// Geometric scale sequence L_k = gamma^-k * L0 with exception index k0.
struct ScaleLadder {
    double L0 = 1.0;
    double gamma = 2.0;
    int k_max = 0;
    int k0 = 0;

    double scale(int k) const { return L0 * std::pow(gamma, -static_cast<double>(k)); }

    void validate() const {
        if (!(gamma > 1.0)) throw std::invalid_argument("ScaleLadder: gamma must exceed 1");
        if (!(L0 > 0.0)) throw std::invalid_argument("ScaleLadder: L0 must be positive");
        if (k_max < 0 || k0 < 0) throw std::invalid_argument("ScaleLadder: negative index");
    }
};

}  // namespace curvatlas
