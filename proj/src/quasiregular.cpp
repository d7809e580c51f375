#include "qrwd/quasiregular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qrwd {

QuasiregularMap::QuasiregularMap(Schedule s, ParameterSequence w, MapVariant v)
    : s_(std::move(s)), w_(std::move(w)), v_(v) {
    if (s_.mode != ScheduleMode::toy)
        throw DomainError("QuasiregularMap: true-scale schedules are not evaluable; "
                          "use the log-scale verification operations");
    for (const auto& q : s_.squares) {
        if (std::abs(w_.at(int(g_.size()))) >= 0.75)
            throw DomainError("QuasiregularMap: parameter outside D_{3/4}");
        g_.push_back(shared_gmap(q.d));
    }
}

namespace {
// membership up to the rounding of h + R: the disc and annulus rules agree
// on the circle, ties resolve inward
inline double disc_tol(const ToySquare& q) {
    return 32.0 * std::numeric_limits<double>::epsilon() * (q.h + q.R);
}
}  // namespace

Cx QuasiregularMap::eval_upper(const Cx& z) const {
    for (std::size_t k = 0; k < s_.squares.size(); ++k) {
        const ToySquare& q = s_.squares[k];
        if (!q.E.contains(z)) continue;
        Cx u = z - Cx(0.0, q.h);
        Cx val = g_[k]->eval(u);
        if (std::abs(u) <= q.R + disc_tol(q)) val = rho_eval(val, w_.at(int(k)));
        return val;
    }
    return g_eval(z);
}

Cx QuasiregularMap::eval(const Cx& z) const {
    if (z.imag() >= 0.0) return eval_upper(z);
    if (v_ == MapVariant::even) return eval_upper(-z);
    return std::conj(eval_upper(std::conj(z)));
}

RegionLabel QuasiregularMap::classify(const Cx& z) const {
    RegionLabel lbl;
    int sign = z.imag() >= 0.0 ? +1 : -1;
    Cx w = z.imag() >= 0.0 ? z : (v_ == MapVariant::even ? -z : std::conj(z));
    for (std::size_t k = 0; k < s_.squares.size(); ++k) {
        const ToySquare& q = s_.squares[k];
        if (!q.E.contains(w)) continue;
        lbl.level = sign * q.level;
        lbl.j = q.j;
        lbl.square_index = int(k);
        lbl.kind = std::abs(w - Cx(0.0, q.h)) <= q.R + disc_tol(q)
                       ? RegionLabel::Kind::disc
                       : RegionLabel::Kind::annulus;
        return lbl;
    }
    lbl.kind = RegionLabel::Kind::outside;
    return lbl;
}

double QuasiregularMap::support_inner_radius(int square_index) const {
    const ToySquare& q = s_.squares.at(square_index);
    return std::pow(1.0 / 8.0, 1.0 / (2.0 * q.d)) * q.R;
}

bool QuasiregularMap::in_support(const Cx& z) const {
    Cx w = z.imag() >= 0.0 ? z : (v_ == MapVariant::even ? -z : std::conj(z));
    for (std::size_t k = 0; k < s_.squares.size(); ++k) {
        const ToySquare& q = s_.squares[k];
        if (!q.E.contains(w)) continue;
        return std::abs(w - Cx(0.0, q.h)) >= support_inner_radius(int(k));
    }
    return false;
}

Cx gpw_eval(const QuasiregularMap& m, int p_order, const Cx& z) {
    if (p_order < 1) throw DomainError("gpw_eval: p_order >= 1");
    if (p_order == 2) return m.eval(z);  // z^{p/2} is the identity substitution
    if (z == Cx(0.0, 0.0)) {
        if (p_order % 2 == 1) throw DomainError("gpw_eval: branch point z = 0 for odd p");
        return m.eval(Cx(0.0, 0.0));
    }
    double r = std::abs(z), th = std::arg(z);  // principal branch, slit R_-
    double half_p = 0.5 * p_order;
    Cx zp = std::pow(r, half_p) * std::exp(Cx(0.0, half_p * th));
    return m.eval(zp);
}

double max_modulus(double r, const std::function<Cx(const Cx&)>& f, int samples) {
    if (!(r > 0.0)) throw DomainError("max_modulus: r > 0 required");
    auto value = [&](double th) { return std::abs(f(r * std::exp(Cx(0.0, th)))); };
    double best = -1.0, best_th = 0.0;
    for (int k = 0; k < samples; ++k) {
        double th = kTwoPi * k / samples;
        double v = value(th);
        if (v > best) {
            best = v;
            best_th = th;
        }
    }
    // golden-section around the best sample
    double span = kTwoPi / samples;
    double a = best_th - span, b = best_th + span;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = value(c), fd = value(d);
    for (int it = 0; it < 60; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = value(d);
        }
    }
    return std::max({best, fc, fd});
}

}  // namespace qrwd
