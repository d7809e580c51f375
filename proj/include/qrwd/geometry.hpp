#pragma once

#include <array>
#include <vector>

#include "qrwd/common.hpp"

namespace qrwd {

// Axis-aligned rectangle.
struct Rectangle {
    Cx center;
    double half_width = 0.0;
    double half_height = 0.0;

    Rectangle() = default;
    Rectangle(Cx c, double hw, double hh) : center(c), half_width(hw), half_height(hh) {
        if (!(hw > 0.0) || !(hh > 0.0)) throw DomainError("Rectangle: non-positive half sizes");
    }
    bool contains(const Cx& z, double pad = 0.0) const {
        return std::abs(z.real() - center.real()) <= half_width + pad &&
               std::abs(z.imag() - center.imag()) <= half_height + pad;
    }
    double xmin() const { return center.real() - half_width; }
    double xmax() const { return center.real() + half_width; }
    double ymin() const { return center.imag() - half_height; }
    double ymax() const { return center.imag() + half_height; }
};

struct Disc {
    Cx center;
    double radius = 0.0;

    Disc() = default;
    Disc(Cx c, double r) : center(c), radius(r) {
        if (!(r > 0.0)) throw DomainError("Disc: non-positive radius");
    }
    bool contains(const Cx& z, double pad = 0.0) const {
        return std::abs(z - center) <= radius + pad;
    }
};

// Ellipse centered at 0, axes on the real/imaginary axes.
struct EllipseRegion {
    double semi_major = 0.0;  // along the real axis
    double semi_minor = 0.0;

    EllipseRegion() = default;
    EllipseRegion(double a, double b) {
        // cosh/sinh of the same large argument can swap order by one ulp
        if (!(b > 0.0) || a < b * (1.0 - 1e-12))
            throw DomainError("EllipseRegion: need a >= b > 0");
        semi_major = std::max(a, b);
        semi_minor = std::min(a, b);
    }
    // (x/a)^2 + (y/b)^2 - 1
    double residual(const Cx& z) const {
        return sqr(z.real() / semi_major) + sqr(z.imag() / semi_minor) - 1.0;
    }
    bool contains(const Cx& z) const { return residual(z) < 0.0; }
};

// Ellipse E_R with axes 2cosh R, 2sinh R.
inline EllipseRegion cosh_ellipse(double R) {
    return EllipseRegion(2.0 * std::cosh(R), 2.0 * std::sinh(R));
}

// Convex polygon (vertices in CCW order) point test, boundary counts as inside.
struct ConvexQuad {
    std::array<Cx, 4> v;
    bool contains(const Cx& z, double tol = 1e-12) const {
        for (int i = 0; i < 4; ++i) {
            Cx e = v[(i + 1) % 4] - v[i];
            Cx w = z - v[i];
            double cross = e.real() * w.imag() - e.imag() * w.real();
            if (cross < -tol * (std::abs(e) + 1.0)) return false;
        }
        return true;
    }
};

}  // namespace qrwd
