#pragma once

#include <optional>

#include "qrwd/common.hpp"

namespace qrwd {

// Sign + natural-log magnitude. Covers magnitudes up to exp(~1.8e308).
struct LogReal {
    int sign = 0;         // -1, 0, +1
    double logmag = 0.0;  // ignored when sign == 0
};

LogReal logreal_encode(double x);
double logreal_decode(const LogReal& v);  // RangeError if |logmag| >= 700

enum class ArithOp { add, sub, mul, div };
LogReal logreal_arith(const LogReal& a, const LogReal& b, ArithOp op);
int logreal_cmp(const LogReal& a, const LogReal& b);  // -1 / 0 / +1

// Iterated-exponential scalar: value = sign * exp^depth(base).
// depth 0 stores the magnitude directly; depth 1 is LogReal territory;
// higher depths carry the tower quantities (x_n, h_n, d_n for n >= 5)
// whose logarithms do not fit in a double. Arithmetic absorbs addends
// that fall below the representable relative precision, mirroring the
// LogReal e^40 add cutoff.
struct ScaledReal {
    int sign = 0;
    int depth = 0;
    double base = 0.0;  // magnitude chain; at depth 0 this is |value|

    static ScaledReal zero() { return {}; }
    static ScaledReal from_double(double x);
    static ScaledReal from_log(double log_magnitude, int sign = +1);
    static ScaledReal from_logreal(const LogReal& v);

    bool is_zero() const { return sign == 0; }
    LogReal to_logreal() const;       // RangeError if depth > 1 after canon
    double to_double() const;         // RangeError when out of double range
    std::optional<double> log_as_double() const;  // log|value| if it fits
};

ScaledReal canonical(ScaledReal a);
int cmp(const ScaledReal& a, const ScaledReal& b);
ScaledReal neg(const ScaledReal& a);
ScaledReal add(const ScaledReal& a, const ScaledReal& b);
ScaledReal sub(const ScaledReal& a, const ScaledReal& b);
ScaledReal mul(const ScaledReal& a, const ScaledReal& b);
ScaledReal div(const ScaledReal& a, const ScaledReal& b);
ScaledReal log_of(const ScaledReal& a);   // a > 0
ScaledReal exp_of(const ScaledReal& a);
ScaledReal pow_int(const ScaledReal& a, long k);

inline bool less(const ScaledReal& a, const ScaledReal& b) { return cmp(a, b) < 0; }

}  // namespace qrwd
