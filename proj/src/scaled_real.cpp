#include "qrwd/scaled_real.hpp"

#include <algorithm>
#include <cmath>

namespace qrwd {

namespace {
constexpr double kAddCutoff = 40.0;   // smaller addend below e^-40: absorbed
constexpr double kLowerAt = 300.0;    // lower depth while base <= this
constexpr double kRaiseAt = 1e300;    // raise depth only near double overflow
}  // namespace

LogReal logreal_encode(double x) {
    if (!std::isfinite(x)) throw DomainError("logreal_encode: non-finite input");
    if (x == 0.0) return {0, 0.0};
    return {x > 0 ? +1 : -1, std::log(std::abs(x))};
}

double logreal_decode(const LogReal& v) {
    if (v.sign == 0) return 0.0;
    if (!(std::abs(v.logmag) < 700.0))
        throw RangeError("logreal_decode: magnitude exp(" + std::to_string(v.logmag) +
                         ") outside double range");
    return v.sign * std::exp(v.logmag);
}

LogReal logreal_arith(const LogReal& a, const LogReal& b, ArithOp op) {
    ScaledReal sa = ScaledReal::from_logreal(a);
    ScaledReal sb = ScaledReal::from_logreal(b);
    ScaledReal r;
    switch (op) {
        case ArithOp::add: r = add(sa, sb); break;
        case ArithOp::sub: r = sub(sa, sb); break;
        case ArithOp::mul: r = mul(sa, sb); break;
        case ArithOp::div: r = div(sa, sb); break;
        default: throw DomainError("logreal_arith: bad op");
    }
    return r.to_logreal();
}

int logreal_cmp(const LogReal& a, const LogReal& b) {
    return cmp(ScaledReal::from_logreal(a), ScaledReal::from_logreal(b));
}

ScaledReal canonical(ScaledReal a) {
    if (a.sign == 0) return {0, 0, 0.0};
    while (a.depth >= 1 && a.base <= kLowerAt) {
        a.base = std::exp(a.base);
        a.depth -= 1;
    }
    while (a.base > kRaiseAt && std::isfinite(a.base)) {
        a.base = std::log(a.base);
        a.depth += 1;
    }
    if (!std::isfinite(a.base)) throw RangeError("ScaledReal: non-finite base");
    return a;
}

ScaledReal ScaledReal::from_double(double x) {
    if (!std::isfinite(x)) throw DomainError("ScaledReal: non-finite input");
    if (x == 0.0) return {};
    return canonical({x > 0 ? +1 : -1, 0, std::abs(x)});
}

ScaledReal ScaledReal::from_log(double log_magnitude, int sign) {
    if (sign == 0) return {};
    if (!std::isfinite(log_magnitude)) throw DomainError("ScaledReal: non-finite log");
    return canonical({sign, 1, log_magnitude});
}

ScaledReal ScaledReal::from_logreal(const LogReal& v) {
    if (v.sign == 0) return {};
    return from_log(v.logmag, v.sign);
}

LogReal ScaledReal::to_logreal() const {
    if (sign == 0) return {0, 0.0};
    auto l = log_as_double();
    if (!l) throw RangeError("ScaledReal: log magnitude exceeds double range");
    return {sign, *l};
}

double ScaledReal::to_double() const {
    if (sign == 0) return 0.0;
    ScaledReal c = canonical(*this);
    if (c.depth == 0) return c.sign * c.base;
    if (c.depth == 1 && c.base < 709.0) return c.sign * std::exp(c.base);
    throw RangeError("ScaledReal: value exceeds double range");
}

std::optional<double> ScaledReal::log_as_double() const {
    if (sign == 0) return std::nullopt;
    ScaledReal c = canonical(*this);
    if (c.depth == 0) return std::log(c.base);
    if (c.depth == 1) return c.base;
    return std::nullopt;  // log itself is a tower
}

int cmp(const ScaledReal& a, const ScaledReal& b) {
    if (a.sign != b.sign) return a.sign < b.sign ? -1 : +1;
    if (a.sign == 0) return 0;
    ScaledReal x = canonical(a), y = canonical(b);
    // raise the shallower one; exp^k is monotone so equal-depth base order decides
    while (x.depth < y.depth) {
        x.base = std::log(x.base);  // depth-0 base > 0 always
        x.depth += 1;
        if (x.depth > 1 && !(x.base > 0)) {
            // magnitude below e^0 while the other is a deep tower: strictly smaller
            return a.sign > 0 ? -1 : +1;
        }
    }
    while (y.depth < x.depth) {
        y.base = std::log(y.base);
        y.depth += 1;
        if (y.depth > 1 && !(y.base > 0)) return a.sign > 0 ? +1 : -1;
    }
    int m = x.base < y.base ? -1 : (x.base > y.base ? +1 : 0);
    return a.sign > 0 ? m : -m;
}

ScaledReal neg(const ScaledReal& a) { return {-a.sign, a.depth, a.base}; }

namespace {

// |X| >= |Y| > 0, same sign: magnitude of X + s*Y via log-sum-exp when the
// logs fit in doubles, otherwise absorb the smaller term.
ScaledReal combine_mag(const ScaledReal& X, const ScaledReal& Y, double s, int sign) {
    auto lx = X.log_as_double();
    auto ly = Y.log_as_double();
    if (lx && ly) {
        double d = *ly - *lx;
        if (d > -kAddCutoff) {
            double t = s * std::exp(d);
            if (1.0 + t <= 0.0) return ScaledReal::zero();  // exact cancel
            return ScaledReal::from_log(*lx + std::log1p(t), sign);
        }
    }
    ScaledReal r = X;
    r.sign = sign;
    return r;
}

}  // namespace

ScaledReal add(const ScaledReal& a, const ScaledReal& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    ScaledReal am = {+1, a.depth, a.base}, bm = {+1, b.depth, b.base};
    int mag = cmp(am, bm);
    const ScaledReal& X = (mag >= 0) ? a : b;
    const ScaledReal& Y = (mag >= 0) ? b : a;
    ScaledReal Xm = {+1, X.depth, X.base}, Ym = {+1, Y.depth, Y.base};
    if (a.sign == b.sign) return combine_mag(Xm, Ym, +1.0, a.sign);
    if (mag == 0) return ScaledReal::zero();
    return combine_mag(Xm, Ym, -1.0, X.sign);
}

ScaledReal sub(const ScaledReal& a, const ScaledReal& b) { return add(a, neg(b)); }

ScaledReal mul(const ScaledReal& a, const ScaledReal& b) {
    if (a.sign == 0 || b.sign == 0) return ScaledReal::zero();
    int sign = a.sign * b.sign;
    ScaledReal la = log_of({+1, a.depth, a.base});
    ScaledReal lb = log_of({+1, b.depth, b.base});
    ScaledReal r = exp_of(add(la, lb));
    r.sign = sign;
    return r;
}

ScaledReal div(const ScaledReal& a, const ScaledReal& b) {
    if (b.sign == 0) throw DomainError("ScaledReal: division by zero");
    if (a.sign == 0) return ScaledReal::zero();
    int sign = a.sign * b.sign;
    ScaledReal la = log_of({+1, a.depth, a.base});
    ScaledReal lb = log_of({+1, b.depth, b.base});
    ScaledReal r = exp_of(sub(la, lb));
    r.sign = sign;
    return r;
}

ScaledReal log_of(const ScaledReal& a) {
    if (a.sign <= 0) throw DomainError("ScaledReal: log of non-positive value");
    ScaledReal c = canonical(a);
    if (c.depth == 0) return ScaledReal::from_double(std::log(c.base));
    // value = exp(exp^{depth-1}(base)); log is one level down, always positive
    // for depth >= 2, signed via the base at depth 1.
    if (c.depth == 1) return ScaledReal::from_double(c.base);
    return canonical({+1, c.depth - 1, c.base});
}

ScaledReal exp_of(const ScaledReal& a) {
    if (a.sign == 0) return ScaledReal::from_double(1.0);
    ScaledReal c = canonical(a);
    if (c.sign > 0) return canonical({+1, c.depth + 1, c.base});
    // exp of a negative: magnitude e^{-|a|}
    if (c.depth == 0) return ScaledReal::from_log(-c.base);
    if (c.depth == 1 && c.base < 709.0) return ScaledReal::from_log(-std::exp(c.base));
    throw RangeError("ScaledReal: exp underflows past representable depth");
}

ScaledReal pow_int(const ScaledReal& a, long k) {
    if (k == 0) return ScaledReal::from_double(1.0);
    if (a.sign == 0) return ScaledReal::zero();
    if (a.sign < 0) throw DomainError("ScaledReal: pow_int needs positive base");
    ScaledReal l = mul(log_of(a), ScaledReal::from_double(double(k)));
    return exp_of(l);
}

}  // namespace qrwd
