#include "qrwd/qc_estimates.hpp"

#include <algorithm>
#include <cmath>

namespace qrwd {

namespace {

// adaptive Simpson on [a, b]
template <class F>
double simpson_rec(const F& f, double a, double m, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, lm, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           simpson_rec(f, m, rm, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol, int depth = 22) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, depth);
}

// radial chord of D(alpha, r) along the ray beta + rho e^{i theta}
struct Chord {
    double lo = 0.0, hi = -1.0;  // empty if hi < lo
};

Chord ray_chord(const Cx& alpha, double r, const Cx& beta, double theta) {
    Cx b = alpha - beta;
    double proj = b.real() * std::cos(theta) + b.imag() * std::sin(theta);
    double perp2 = std::norm(b) - proj * proj;
    double disc = r * r - perp2;
    Chord c;
    if (disc <= 0.0) return c;
    double s = std::sqrt(disc);
    c.lo = std::max(0.0, proj - s);
    c.hi = proj + s;
    if (c.hi < c.lo) c.hi = c.lo - 1.0;
    return c;
}

}  // namespace

double disc_pole_integral(const Cx& alpha, double r, const Cx& beta, double rel_tol) {
    if (!(r > 0.0)) throw DomainError("disc_pole_integral: r > 0");
    // polar around beta: the 1/|z - beta| cancels the Jacobian, leaving the
    // visible chord length per direction
    auto len = [&](double theta) {
        Chord c = ray_chord(alpha, r, beta, theta);
        return c.hi >= c.lo ? c.hi - c.lo : 0.0;
    };
    double scale = kTwoPi * r;
    return adaptive_simpson(len, 0.0, kTwoPi, rel_tol * scale);
}

double key_disc_integral(const Disc& B, const Cx& alpha, const Cx& beta, const Cx& gamma,
                         double rel_tol) {
    // polar quadrature centered at the nearest pole (a pole inside the disc
    // takes priority: the Jacobian then kills its singularity)
    const Cx poles[3] = {alpha, beta, gamma};
    Cx center = poles[0];
    double best = 1e308;
    bool inside_found = false;
    for (const Cx& p : poles) {
        double dist = std::abs(p - B.center);
        bool inside = dist < B.radius;
        if (inside && (!inside_found || dist < best)) {
            center = p;
            best = dist;
            inside_found = true;
        } else if (!inside_found && dist < best) {
            center = p;
            best = dist;
        }
    }
    Cx c = center;
    double ba = std::abs(beta - alpha);
    auto integrand = [&](double theta, double rho) {
        Cx z = c + rho * std::exp(Cx(0, theta));
        double da = std::abs(z - alpha), db = std::abs(z - beta), dg = std::abs(z - gamma);
        double denom = da * db * dg;
        // the centering pole contributes rho/|z - c|: exactly 1 on its rays
        if (denom < 1e-280) return 0.0;
        return ba * rho / denom;
    };
    auto ray_integral = [&](double theta) {
        Chord ch = ray_chord(B.center, B.radius, c, theta);
        if (ch.hi < ch.lo) return 0.0;
        auto f = [&](double rho) { return integrand(theta, rho); };
        double guess = integrand(theta, 0.5 * (ch.lo + ch.hi)) * (ch.hi - ch.lo);
        double tol = rel_tol * std::max(guess, 1e-300);
        return adaptive_simpson(f, ch.lo, ch.hi, tol, 18);
    };
    double scale = kTwoPi;
    double rough = ray_integral(0.0) + ray_integral(kPi / 2) + ray_integral(kPi) +
                   ray_integral(3 * kPi / 2);
    double tol = rel_tol * std::max(std::abs(rough) * scale / 4.0, 1e-300);
    return adaptive_simpson(ray_integral, 0.0, kTwoPi, tol, 16);
}

KeyInequalityResult key_inequality_rhs(const Cx& alpha, const Cx& beta, const Cx& gamma,
                                       const DiscFamily& family, double C, double rel_tol) {
    double ga = std::abs(gamma - alpha), ba = std::abs(beta - alpha);
    if (!(ga > 0.0) || ga > family.delta1 * ba + 1e-15)
        throw DomainError("key_inequality_rhs: need 0 < |gamma-alpha| <= delta1 |beta-alpha|");
    KeyInequalityResult r;
    r.C = C;
    r.K = family.K;
    for (const Disc& B : family.discs) {
        double v = key_disc_integral(B, alpha, beta, gamma, rel_tol);
        r.per_disc.push_back(C * (family.K - 1.0) * v);
        r.total += r.per_disc.back();
    }
    return r;
}

AssumptionReport check_assumption(const DiscFamily& family, int boundary_samples) {
    AssumptionReport rep;
    double cap = std::min(0.25, family.delta1);
    double running = 0.0;
    for (const Disc& B : family.discs) {
        double zm = std::abs(B.center);
        if (zm < 4.0) rep.magnitude_ok = false;
        if (B.radius / zm > cap + 1e-15) rep.ratio_ok = false;
        running += B.radius / zm;
        rep.partial_sums.push_back(running);
    }
    double c1 = 1e308;
    for (std::size_t a = 0; a < family.discs.size(); ++a) {
        for (std::size_t b = a + 1; b < family.discs.size(); ++b) {
            const Disc &A = family.discs[a], &B = family.discs[b];
            for (int i = 0; i < boundary_samples; ++i) {
                Cx z = A.center + A.radius * std::exp(Cx(0, kTwoPi * i / boundary_samples));
                for (int j = 0; j < boundary_samples; ++j) {
                    Cx w = B.center + B.radius * std::exp(Cx(0, kTwoPi * j / boundary_samples));
                    double ratio = std::abs(z - w) / std::sqrt(std::abs(z) * std::abs(w));
                    c1 = std::min(c1, ratio);
                }
            }
        }
    }
    rep.C1 = family.discs.size() > 1 ? c1 : 0.0;
    return rep;
}

bool paper_separation_log(const Schedule& s, int n_lo, int n_hi) {
    // The separation |z - z'| >= (1/2) sqrt(|z z'|) for points of 3D_n and
    // 3D_m reduces, after bounding |z| <= h(1 + 3 eps) with eps = R/h
    // <= 1.01 pi / x_n, to coefficient inequalities plus tower-ratio
    // comparisons; the coefficient part is sound once eps < 1/50.
    if (s.mode != ScheduleMode::true_scale)
        throw DomainError("paper_separation_log: true-scale schedule required");
    auto orbit = reference_orbit(n_hi + 1);
    auto eps = [&](int n) {
        try {
            return 1.01 * kPi / orbit[n].to_double();
        } catch (const RangeError&) {
            return 1e-300;
        }
    };
    const ScaledReal ten = ScaledReal::from_double(10.0);
    for (int n = n_lo; n <= n_hi; ++n) {
        if (eps(n) > 0.02) return false;
        const TrueEntry& en = s.entries[n - 1];
        // +n against -n: |z - z'| >= 2 h_n (1 - 3 eps) and
        // sqrt(|z z'|) <= h_n (1 + 3 eps): the ratio is >= 1/2 once eps < 1/50
        for (int m = n + 1; m <= n_hi; ++m) {
            if (eps(m) > 0.02) return false;
            const TrueEntry& em = s.entries[m - 1];
            // same sign: gap >= h_m(1 - 3 eps_m) - h_n(1 + 3 eps_n)
            //            >= h_m (1 - 3 eps_m - 10^{-1}) when h_m >= 10 h_n,
            // while (1/2) sqrt(|z z'|) <= (1/2) h_m (1 + 3 eps_m) * sqrt(h_n/h_m)
            //            <= h_m / 2: sound once h_m >= 10 h_n.
            if (cmp(em.h, mul(ten, en.h)) <= 0) return false;
            // opposite signs only separate further; covered by the above
        }
    }
    return true;
}

ScaledReal inner_radius_log(int n, double C5, const std::vector<ScaledReal>& orbit) {
    if (int(orbit.size()) < n) throw DomainError("inner_radius_log: orbit too short");
    ScaledReal acc = ScaledReal::from_double(-double(n) * C5);
    for (int j = 0; j <= n - 1; ++j) acc = sub(acc, orbit[j]);
    acc = sub(acc, orbit[n - 1]);
    return acc;
}

bool inclusion_check(int n, double C5, const Schedule& s, const std::vector<ScaledReal>& orbit) {
    if (s.mode != ScheduleMode::true_scale)
        throw DomainError("inclusion_check: true-scale schedule required");
    const TrueEntry& e = s.entries[n - 1];
    ScaledReal lhs = mul(ScaledReal::from_double(2.0 * std::log(2.0)), e.d);
    ScaledReal rhs = ScaledReal::from_double((n + 1) * C5);
    for (int j = 0; j <= n; ++j) rhs = add(rhs, orbit[j]);
    rhs = add(rhs, orbit[n]);
    return cmp(lhs, rhs) > 0;
}

int inclusion_sweep(double C5, const Schedule& s, int n_lo, int n_hi) {
    auto orbit = reference_orbit(n_hi + 1);
    for (int n = n_lo; n <= n_hi; ++n)
        if (inclusion_check(n, C5, s, orbit)) return n;
    return 0;
}

}  // namespace qrwd
