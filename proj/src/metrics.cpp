#include "qrwd/metrics.hpp"

#include <cmath>

namespace qrwd {

double hyperbolic_distance_H(const Cx& z, const Cx& w) {
    if (!(z.imag() > 0.0) || !(w.imag() > 0.0))
        throw DomainError("hyperbolic_distance_H: points must have positive imaginary part");
    double num = std::abs(z - w);
    double den = std::abs(z - std::conj(w));
    return 2.0 * std::atanh(num / den);
}

double cylinder_norm(const Cx& w) {
    double im = std::remainder(w.imag(), kTwoPi);  // representative in [-pi, pi]
    return std::hypot(w.real(), im);
}

Cx mobius_M(const Cx& z) {
    Cx den = z + Cx(0.0, 1.0);
    if (std::abs(den) == 0.0) throw DomainError("mobius_M: pole at -i");
    return (z - Cx(0.0, 1.0)) / den;
}

}  // namespace qrwd
