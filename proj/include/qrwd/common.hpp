#pragma once

#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qrwd {

using Cx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline bool finite(const Cx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline double sqr(double x) { return x * x; }

// |a - b| relative to scale (1 + |b|)
inline double rel_diff(const Cx& a, const Cx& b) {
    return std::abs(a - b) / (1.0 + std::abs(b));
}

struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

struct RangeError : std::range_error {
    explicit RangeError(const std::string& what) : std::range_error(what) {}
};

struct ConstructionError : std::runtime_error {
    explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qrwd
