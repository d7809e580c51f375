#pragma once

#include "qrwd/common.hpp"

namespace qrwd {

// Poincare distance on the upper half-plane.
double hyperbolic_distance_H(const Cx& z, const Cx& w);

// |w|_C = inf_n |w + 2*pi*n*i|, distance on the cylinder C/2(pi)iZ.
double cylinder_norm(const Cx& w);

// M(z) = (z - i)/(z + i); maps H onto the unit disc, D_H(i, r) onto D_{tanh(r/2)}.
Cx mobius_M(const Cx& z);

}  // namespace qrwd
