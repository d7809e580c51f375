#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "qrwd/interpolation.hpp"
#include "qrwd/metrics.hpp"
#include "qrwd/base_map.hpp"

using namespace qrwd;

namespace {
const Cx kI(0, 1);

// finite-difference Beltrami quotient of a map given in (s,t) coordinates
Cx fd_mu(const std::function<Cx(double, double)>& f, double s, double t, double h) {
    Cx dxp = f(s + h, t), dxm = f(s - h, t);
    Cx dyp = f(s, t + h), dym = f(s, t - h);
    Cx dx = (dxp - dxm) / (2 * h), dy = (dyp - dym) / (2 * h);
    Cx dz = 0.5 * (dx - kI * dy), dzb = 0.5 * (dx + kI * dy);
    return dzb / dz;
}

}  // namespace

TEST_CASE("theorem constants") {
    auto [s0a, ra] = theorem_constants(0.0, 1, 1, 1, 1);
    CHECK(s0a == doctest::Approx(1.0));
    CHECK(ra == doctest::Approx(0.0));

    auto [s0b, rb] = theorem_constants(kPi / 4, 1, 1, 1, 1);
    CHECK(s0b == doctest::Approx(1.0));
    CHECK(rb == doctest::Approx(2.0 * std::atanh(std::tan(kPi / 8))).epsilon(1e-12));
    CHECK(rb == doctest::Approx(0.8814).epsilon(1e-3));
    // cross-check against the hyperbolic metric directly
    CHECK(rb == doctest::Approx(hyperbolic_distance_H(std::exp(Cx(0, kPi / 2 + kPi / 4)), kI))
                    .epsilon(1e-12));

    auto [s0c, rc] = theorem_constants(kPi / 4, 2, 2, 1, 1);
    CHECK(s0c == doctest::Approx(0.5));
    CHECK(rc > 0.0);
    CHECK_THROWS_AS(theorem_constants(kPi / 2, 1, 1, 1, 1), DomainError);
    CHECK_THROWS_AS(theorem_constants(0.1, -1, 1, 1, 1), DomainError);
}

TEST_CASE("linear interpolation builder") {
    // identity cell
    CurvePair idp{[](double t) { return Cx(0, t); }, [](double t) { return Cx(1, t); }, 1.0};
    InterpolationMap id = build_linear_interp(idp, 1.0);
    for (double s : {0.1, 0.5, 0.9})
        for (double t : {0.2, 0.7})
            CHECK(std::abs(id.eval_st(s, t) - Cx(s, t)) < 1e-12);
    for (double s : {0.2, 0.5, 0.8})
        CHECK(std::abs(fd_mu([&](double a, double b) { return id.eval_st(a, b); }, s, 0.5,
                             1e-5)) < 1e-9);

    // affine case with the theorem's s0
    CurvePair aff{[](double t) { return Cx(0, t); }, [](double t) { return Cx(2, t); }, 1.0};
    InterpolationMap am = build_linear_interp(aff, 2.0);  // s0 = sqrt(l l / v v) = 2
    for (double s : {0.3, 1.7})
        CHECK(std::abs(am.eval_st(s, 0.4) - Cx(s / 2.0 * 2.0, 0.4)) < 1e-12);
    CHECK(am.certified_r < 1e-4);

    // concentric arcs: gamma_j = j e^{it}, t0 = pi/2; the sufficiency formula
    // gives s0 = sqrt(l_min l_max / (v_min v_max)) = 1/sqrt(2) and the bound
    // holds with that same s0 in the map
    CurvePair arcs{[](double t) { return std::exp(Cx(0, t)); },
                   [](double t) { return 2.0 * std::exp(Cx(0, t)); }, kPi / 2};
    auto [s0f, rf] = theorem_constants(1e-9, 1.0, 2.0, 1.0, 1.0);
    CHECK(s0f == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
    InterpolationMap arc = build_linear_interp(arcs, s0f);
    double cap = std::tanh(rf / 2.0);
    double sup = 0.0;
    for (int i = 1; i < 128; ++i)
        for (int j = 1; j < 128; ++j) {
            double s = s0f * i / 128.0, t = (kPi / 2) * j / 128.0;
            sup = std::max(sup, std::abs(fd_mu(
                                    [&](double a, double b) { return arc.eval_st(a, b); }, s,
                                    t, 1e-6)));
        }
    CHECK(sup <= cap + 1e-6);
    CHECK(sup <= std::tanh(arc.certified_r / 2.0) + 1e-6);

    // constructive failures
    CurvePair crossing{[](double t) { return Cx(t, t); }, [](double t) { return Cx(1 - t, t); },
                       1.0};
    CHECK_THROWS_AS(build_linear_interp(crossing, 1.0), ConstructionError);
    CurvePair wrong_side{[](double t) { return Cx(0, t); },
                         [](double t) { return Cx(-1, t); }, 1.0};
    CHECK_THROWS_AS(build_linear_interp(wrong_side, 1.0), ConstructionError);
}

TEST_CASE("phi1 anchors and inverse") {
    for (int d : {1, 3, 5}) {
        Phi1Map m = make_phi1(d);
        double R = m.geo.R, L = m.geo.L;
        CHECK(std::abs(m.forward(Cx(0, 0)) - Cx(R, 0)) < 1e-10);
        CHECK(std::abs(m.forward(Cx(0, R)) - Cx(0, R)) < 1e-10);
        CHECK(std::abs(m.forward(Cx(L, L)) - Cx(L, L)) < 1e-10);
        Cx p1(0.75 * L, R), p2(0.75 * L, 1.5 * R);
        CHECK(std::abs(m.forward(p1) - p2) < 1e-10);
        // arc rule on [0, iR]
        for (double y : {0.2 * R, 0.6 * R, 0.95 * R})
            CHECK(std::abs(m.forward(Cx(0, y)) - R * std::exp(Cx(0, kPi / (2 * R) * y))) <
                  1e-10);
        // round trips
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(0.0, L);
        int done = 0;
        while (done < 200) {
            Cx z(u(rng), u(rng));
            Cx w = m.forward(z);
            CHECK(std::abs(m.backward(w) - z) < 1e-8 * (1.0 + std::abs(z)));
            ++done;
        }
    }
}

TEST_CASE("phi2 boundary rules") {
    for (int d = 1; d <= 4; ++d) {
        Phi2Map m = make_phi2(d);
        double R = m.geo.R, yd = m.geo.yd, Y1 = m.geo.Y1;
        double sign = (d % 2 == 0) ? 1.0 : -1.0;
        CHECK(std::abs(m.forward(Cx(0, R)) - Cx(sign, 0)) < 1e-9);
        CHECK(std::abs(m.forward(Cx(0, Y1)) - Cx(2.0 * std::cos(Y1), 0)) < 1e-9);
        // the exp rule endpoint: exp(i(d - 1/2)pi) = (-1)^{d-1} i
        Cx endpoint = std::exp(Cx(0, (d - 0.5) * kPi));
        CHECK(std::abs(m.forward(Cx(0, yd)) - endpoint) < 1e-9);
        CHECK(std::abs(endpoint - Cx(0, (d % 2 == 1) ? 1.0 : -1.0)) < 1e-12);
        // 2cosh on the top edge
        for (double x : {0.25, 0.75})
            CHECK(std::abs(m.forward(Cx(x, Y1)) - 2.0 * std::cosh(Cx(x, Y1))) < 1e-9);
    }
}

TEST_CASE("phi3 boundary rules") {
    for (int d : {1, 2, 4}) {
        Phi3Map m = make_phi3(d);
        double R = m.geo.R, yd = m.geo.yd;
        CHECK(std::abs(m.forward(Cx(1, 0)) - Cx(2.0 * std::cosh(1.0), 0)) < 1e-9);
        CHECK(std::abs(m.forward(Cx(0, 0)) - Cx(1, 0)) < 1e-9);
        for (double y : {0.2 * yd, 0.5 * yd, 0.9 * yd})
            CHECK(std::abs(m.forward(Cx(0, y)) - std::exp(Cx(0, d * kPi * y / R))) < 1e-9);
    }
}

TEST_CASE("assembled G") {
    std::mt19937_64 rng(33);
    for (int d = 1; d <= 8; ++d) {
        GMap G(d);
        double R = G.geometry().R, L = G.geometry().L;
        double sign = (d % 2 == 0) ? 1.0 : -1.0;
        CHECK(std::abs(G.eval(Cx(0, R)) - Cx(sign, 0)) < 1e-12);
        CHECK(std::abs(G.eval(Cx(L, 0)) - Cx(2.0 * std::cosh(L), 0)) < 1e-9 * std::cosh(L));
        CHECK(std::abs(G.eval(Cx(R / 2, 0)) - Cx(std::pow(0.5, 2.0 * d), 0)) < 1e-14);

        std::uniform_real_distribution<double> u(-L, L);
        for (int i = 0; i < (d <= 2 ? 10000 : 1000); ++i) {
            Cx z(u(rng), u(rng));
            Cx v = G.eval(z);
            CHECK(G.eval(-z) == v);  // exact evenness through the fold
            CHECK(G.eval(std::conj(z)) == std::conj(v));
        }
        // boundary nets
        for (int k = 0; k <= 100; ++k) {
            double t = -L + 2.0 * L * k / 100.0;
            CHECK(rel_diff(G.eval(Cx(L, t)), g_eval(Cx(L, t))) < 1e-9);
            CHECK(rel_diff(G.eval(Cx(t, L)), g_eval(Cx(t, L))) < 1e-9);
            double y = R + (L - R) * k / 100.0;
            CHECK(rel_diff(G.eval(Cx(0, y)), g_eval(Cx(0, y))) < 1e-9);
            Cx on_disc = R * std::exp(Cx(0, kTwoPi * k / 100.0));
            Cx pw = std::pow(on_disc / R, 2.0 * d);
            CHECK(std::abs(G.eval(on_disc) - pw) < 1e-9);
        }
    }
}

TEST_CASE("dilatation estimator basics") {
    QRPiece ident;
    ident.name = "identity";
    ident.bbox = Rectangle(Cx(0, 0), 1, 1);
    ident.inside = [](const Cx&) { return true; };
    ident.eval = [](const Cx& z) { return z; };
    DilatationReport r0 = estimate_dilatation(ident, 64);
    CHECK(r0.sup_K == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r0.orientation_ok);

    QRPiece aff;
    aff.name = "affine";
    aff.bbox = Rectangle(Cx(0, 0), 1, 1);
    aff.inside = [](const Cx&) { return true; };
    aff.eval = [](const Cx& z) { return z + 0.5 * std::conj(z); };
    DilatationReport r1 = estimate_dilatation(aff, 64);
    CHECK(r1.sup_mu == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r1.sup_K == doctest::Approx(3.0).epsilon(1e-6));

    CHECK_THROWS_AS(estimate_dilatation(ident, 32), DomainError);

    // orientation violation is reported
    QRPiece flip;
    flip.name = "flip";
    flip.bbox = Rectangle(Cx(0, 0), 1, 1);
    flip.inside = [](const Cx&) { return true; };
    flip.eval = [](const Cx& z) { return std::conj(z); };
    CHECK_FALSE(estimate_dilatation(flip, 64).orientation_ok);
}

TEST_CASE("G dilatation, declared bound, seams") {
    for (int d : {1, 3}) {
        QRPiece piece = build_G(d, (d - 1.0 / 3.0) * kPi);
        DilatationReport r = estimate_dilatation(piece, 128);
        CHECK(r.orientation_ok);
        CHECK(r.sup_mu < 1.0);
        CHECK(r.sup_K <= piece.declared_dilatation_bound * 1.05);
        CHECK(r.seam_jump_rel < 1e-6);
    }
    CHECK_THROWS_AS(build_G(3, 3.0), DomainError);  // R must be (d - 1/3) pi
}

TEST_CASE("rho_w") {
    CHECK_THROWS_AS(build_rho(Cx(0.8, 0)), DomainError);

    // rho_0 is exactly the identity
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> u(-1, 1);
    int checked = 0;
    while (checked < 5000) {
        Cx z(u(rng), u(rng));
        if (std::abs(z) > 1.0) continue;
        CHECK(std::abs(rho_eval(z, Cx(0, 0)) - z) < 1e-15);
        ++checked;
    }
    for (double wr : {-0.6, -0.3, 0.0, 0.3, 0.6}) {
        for (double wi : {-0.3, 0.0, 0.3}) {
            Cx w(wr, wi);
            if (std::abs(w) >= 0.75) continue;
            // identity on the boundary circle, z + w on the closed 1/8 disc
            for (int k = 0; k < 64; ++k) {
                Cx b = std::exp(Cx(0, kTwoPi * k / 64.0));
                CHECK(std::abs(rho_eval(b, w) - b) < 1e-12);
                Cx in = 0.125 * b;
                CHECK(std::abs(rho_eval(in, w) - (in + w)) < 1e-12);
            }
            // conjugation rule
            for (int k = 0; k < 100; ++k) {
                Cx z(u(rng), u(rng));
                if (std::abs(z) > 1.0) continue;
                CHECK(std::abs(rho_eval(std::conj(z), std::conj(w)) -
                               std::conj(rho_eval(z, w))) < 1e-14);
            }
        }
    }
    // injectivity spot check at |w| = 0.7
    Cx w(0.7, 0.0);
    std::vector<Cx> images;
    std::vector<Cx> points;
    int got = 0;
    while (got < 10000) {
        Cx z(u(rng), u(rng));
        if (std::abs(z) > 1.0) continue;
        points.push_back(z);
        images.push_back(rho_eval(z, w));
        ++got;
    }
    for (int t = 0; t < 20000; ++t) {
        std::uniform_int_distribution<std::size_t> pick(0, images.size() - 1);
        std::size_t a = pick(rng), b = pick(rng);
        if (a == b) continue;
        if (std::abs(images[a] - images[b]) < 1e-10)
            CHECK(std::abs(points[a] - points[b]) < 1e-8);
    }
    DilatationReport r = estimate_dilatation(build_rho(w), 128);
    CHECK(r.orientation_ok);
    CHECK(r.sup_K <= build_rho(w).declared_dilatation_bound * 1.05);
}

TEST_CASE("theorem bound on randomized admissible pairs") {
    // lighter version of the acceptance sweep
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> amp(0.0, 0.25), base(0.8, 1.3), gapd(0.8, 1.6);
    for (int trial = 0; trial < 5; ++trial) {
        double a = base(rng), g = gapd(rng), e1 = amp(rng), e2 = amp(rng);
        int k1 = 1 + trial % 3;
        auto r1 = [=](double t) { return a * (1.0 + e1 * std::cos(k1 * t)); };
        auto r2 = [=](double t) { return a + g * (1.0 + e2 * std::sin(t)); };
        CurvePair cp{[=](double t) { return r1(t) * std::exp(Cx(0, t)); },
                     [=](double t) { return r2(t) * std::exp(Cx(0, t)); }, 1.2};
        // sampled bounds feed the sufficiency formula
        PairBounds b;
        b.v_min = b.l_min = 1e300;
        const int N = 400;
        bool admissible = true;
        for (int i = 0; i <= N && admissible; ++i) {
            double t = 1.2 * i / N;
            Cx g1 = cp.gamma1(t), g2 = cp.gamma2(t);
            Cx d1 = (cp.gamma1(std::min(1.2, t + 1e-6)) - cp.gamma1(std::max(0.0, t - 1e-6))) /
                    (std::min(1.2, t + 1e-6) - std::max(0.0, t - 1e-6));
            Cx d2 = (cp.gamma2(std::min(1.2, t + 1e-6)) - cp.gamma2(std::max(0.0, t - 1e-6))) /
                    (std::min(1.2, t + 1e-6) - std::max(0.0, t - 1e-6));
            Cx gap = g2 - g1;
            b.l_min = std::min(b.l_min, std::abs(gap));
            b.l_max = std::max(b.l_max, std::abs(gap));
            for (Cx dv : {d1, d2}) {
                b.v_min = std::min(b.v_min, std::abs(dv));
                b.v_max = std::max(b.v_max, std::abs(dv));
                double dev = std::abs(std::arg(dv / gap) - kPi / 2);
                if (dev >= kPi / 2 - 0.05) admissible = false;
                b.theta = std::max(b.theta, dev);
            }
        }
        if (!admissible) continue;
        auto [s0, r] = theorem_constants(b.theta, b.v_min, b.v_max, b.l_min, b.l_max);
        InterpolationMap m = build_linear_interp(cp, s0);
        double cap = std::tanh(r / 2.0) + 1e-6;
        for (int i = 1; i < 64; ++i)
            for (int j = 1; j < 64; ++j) {
                double s = s0 * i / 64.0, t = 1.2 * j / 64.0;
                Cx mu = fd_mu([&](double x, double y) { return m.eval_st(x, y); }, s, t,
                              1e-5);
                CHECK(std::abs(mu) <= cap);
            }
    }
}
