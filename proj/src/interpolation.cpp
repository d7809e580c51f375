#include "qrwd/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "json.hpp"
#include "qrwd/base_map.hpp"
#include "qrwd/metrics.hpp"
#include "qrwd/parallel.hpp"

namespace qrwd {

namespace {
const Cx kI(0.0, 1.0);
}

Cx Curve::at(double t) const {
    if (kind == Kind::generic) return fn(t);
    Cx arg = (1.0 - t) * a + t * b;
    switch (kind) {
        case Kind::line: return arg;
        case Kind::cosh_arg: return 2.0 * std::cosh(arg);
        default: return std::exp(arg);
    }
}

Cx Curve::deriv(double t) const {
    if (kind == Kind::generic) {
        const double h = 1e-6;
        double lo = std::max(0.0, t - h), hi = std::min(1.0, t + h);
        return (fn(hi) - fn(lo)) / (hi - lo);
    }
    Cx arg = (1.0 - t) * a + t * b;
    Cx da = b - a;
    switch (kind) {
        case Kind::line: return da;
        case Kind::cosh_arg: return 2.0 * std::sinh(arg) * da;
        default: return std::exp(arg) * da;
    }
}

Curve line_path(Cx a, Cx b) { return Curve{Curve::Kind::line, a, b, nullptr}; }
Curve cosh_path(Cx a, Cx b) { return Curve{Curve::Kind::cosh_arg, a, b, nullptr}; }
Curve exp_path(Cx a, Cx b) { return Curve{Curve::Kind::exp_arg, a, b, nullptr}; }
Curve generic_path(std::function<Cx(double)> fn) {
    return Curve{Curve::Kind::generic, Cx(0, 0), Cx(0, 0), std::move(fn)};
}

std::pair<double, double> theorem_constants(double theta, double v_min, double v_max,
                                            double l_min, double l_max) {
    if (!(theta >= 0.0) || theta >= kPi / 2.0)
        throw DomainError("theorem_constants: theta must lie in [0, pi/2)");
    if (!(v_min > 0.0 && l_min > 0.0) || v_max < v_min || l_max < l_min)
        throw DomainError("theorem_constants: bounds must be positive and ordered");
    double s0 = std::sqrt(l_min * l_max / (v_min * v_max));
    double rho = s0 * v_max / l_min;
    Cx w = rho * std::exp(kI * theta);
    double r = 2.0 * std::atanh(std::abs((w - 1.0) / (w + 1.0)));
    return {s0, r};
}

Cx InterpolationMap::eval_st(double s, double t) const { return eval01(s / s0, t / t_scale); }

Cx InterpolationMap::eval01(double u, double t) const {
    return (1.0 - u) * g1.at(t) + u * g2.at(t);
}

Cx InterpolationMap::d_u(double u, double t) const {
    (void)u;
    return g2.at(t) - g1.at(t);
}

Cx InterpolationMap::d_t(double u, double t) const {
    return (1.0 - u) * g1.deriv(t) + u * g2.deriv(t);
}

PairBounds sample_pair_bounds(const Curve& g1, const Curve& g2, int samples) {
    PairBounds b;
    b.v_min = b.l_min = 1e300;
    for (int i = 0; i <= samples; ++i) {
        double t = double(i) / samples;
        Cx gap = g2.at(t) - g1.at(t);
        double l = std::abs(gap);
        if (l == 0.0) throw ConstructionError("interpolation: curves touch");
        b.l_min = std::min(b.l_min, l);
        b.l_max = std::max(b.l_max, l);
        for (const Curve* g : {&g1, &g2}) {
            Cx d = g->deriv(t);
            double v = std::abs(d);
            if (v == 0.0) throw ConstructionError("interpolation: vanishing derivative");
            b.v_min = std::min(b.v_min, v);
            b.v_max = std::max(b.v_max, v);
            Cx ratio = d / gap;
            if (!(ratio.imag() > 0.0))
                throw ConstructionError("interpolation: derivative ratio left the upper half-plane");
            double dev = std::abs(std::arg(ratio) - kPi / 2.0);
            b.theta = std::max(b.theta, dev);
        }
    }
    return b;
}

namespace {

InterpolationMap certified_interp(const Curve& g1, const Curve& g2, int samples = 256) {
    PairBounds b = sample_pair_bounds(g1, g2, samples);
    auto [s0, r] = theorem_constants(std::min(b.theta, kPi / 2.0 - 1e-9), b.v_min, b.v_max,
                                     b.l_min, b.l_max);
    InterpolationMap m;
    m.g1 = g1;
    m.g2 = g2;
    m.s0 = s0;
    m.certified_r = r * 1.05;
    return m;
}

}  // namespace

InterpolationMap build_linear_interp(const CurvePair& cp, double s0, int samples) {
    if (!(cp.t_end > 0.0)) throw DomainError("build_linear_interp: empty parameter range");
    const double T = cp.t_end;
    auto f1 = cp.gamma1, f2 = cp.gamma2;
    InterpolationMap m;
    m.g1 = generic_path([f1, T](double t) { return f1(t * T); });
    m.g2 = generic_path([f2, T](double t) { return f2(t * T); });
    m.s0 = s0;
    m.t_scale = T;
    // validate the hypotheses and take the enclosing hyperbolic radius
    double r = 0.0;
    for (int i = 0; i <= samples; ++i) {
        double t = double(i) / samples;
        Cx gap = m.g2.at(t) - m.g1.at(t);
        if (std::abs(gap) == 0.0)
            throw ConstructionError("build_linear_interp: curves cross at t=" +
                                    std::to_string(t * T));
        for (const Curve* g : {&m.g1, &m.g2}) {
            Cx d = g->deriv(t);
            if (std::abs(d) == 0.0)
                throw ConstructionError("build_linear_interp: vanishing derivative");
            Cx ratio = s0 * d / gap / T;  // derivative in the original parameter
            if (!(ratio.imag() > 0.0))
                throw ConstructionError(
                    "build_linear_interp: derivative ratio left the upper half-plane at t=" +
                    std::to_string(t * T));
            r = std::max(r, hyperbolic_distance_H(ratio, kI));
        }
    }
    m.certified_r = r * 1.05;
    return m;
}

// ---- cell machinery --------------------------------------------------------

namespace {

bool newton_invert(const InterpolationMap& m, const Cx& w, double u0, double t0, double& u,
                   double& t) {
    double uu = u0, tt = t0;
    double scale = 1.0 + std::abs(w);
    for (int it = 0; it < 60; ++it) {
        Cx F = m.eval01(uu, tt) - w;
        if (std::abs(F) < 1e-13 * scale) {
            u = uu;
            t = tt;
            return uu > -1e-7 && uu < 1.0 + 1e-7 && tt > -1e-7 && tt < 1.0 + 1e-7;
        }
        Cx Ju = m.d_u(uu, tt), Jt = m.d_t(uu, tt);
        double det = Ju.real() * Jt.imag() - Jt.real() * Ju.imag();
        if (std::abs(det) < 1e-280) return false;
        double du = (-F.real() * Jt.imag() + F.imag() * Jt.real()) / det;
        double dt = (-Ju.real() * F.imag() + F.real() * Ju.imag()) / det;
        double len = std::hypot(du, dt);
        if (len > 0.5) {
            du *= 0.5 / len;
            dt *= 0.5 / len;
        }
        uu += du;
        tt += dt;
        uu = std::clamp(uu, -0.5, 1.5);
        tt = std::clamp(tt, -0.5, 1.5);
    }
    return false;
}

}  // namespace

bool CellMap::invert(const InterpolationMap& m, const Cx& w, double& u, double& t) const {
    if (newton_invert(m, w, 0.5, 0.5, u, t)) return true;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (newton_invert(m, w, (i + 0.5) / 4.0, (j + 0.5) / 4.0, u, t)) return true;
    return false;
}

Cx CellMap::forward(const Cx& z) const {
    double u, t;
    if (!invert(src, z, u, t))
        throw ConstructionError("cell '" + name + "': source inversion failed");
    return tgt.eval01(std::clamp(u, 0.0, 1.0), std::clamp(t, 0.0, 1.0));
}

Cx CellMap::backward(const Cx& w) const {
    double u, t;
    if (!invert(tgt, w, u, t))
        throw ConstructionError("cell '" + name + "': target inversion failed");
    return src.eval01(std::clamp(u, 0.0, 1.0), std::clamp(t, 0.0, 1.0));
}

double CellMap::declared_K() const { return std::exp(src.certified_r + tgt.certified_r); }

// ---- the concrete pieces ----------------------------------------------------

GSquareGeometry g_square_geometry(int d) {
    if (d < 1 || d > 64) throw DomainError("g_square_geometry: d in [1, 64]");
    GSquareGeometry g;
    g.d = d;
    g.L = 2.0 * d * kPi;
    g.R = (d - 1.0 / 3.0) * kPi;
    g.yd = (2.0 * d - 1.0) / (2.0 * d) * g.R;
    g.Y1 = (d - 1.0 / 6.0) * kPi;
    g.Y2 = (d - 1.0 / 4.0) * kPi;
    g.Y3 = (d - 1.0 / 2.0) * kPi;
    return g;
}

namespace {

CellMap make_cell(const std::string& name, Curve s1, Curve s2, Curve t1, Curve t2) {
    CellMap c;
    c.name = name;
    c.src = certified_interp(s1, s2);
    c.tgt = certified_interp(t1, t2);
    return c;
}

}  // namespace

Phi1Map make_phi1(int d) {
    GSquareGeometry g = g_square_geometry(d);
    Phi1Map m;
    m.geo = g;
    double L = g.L, R = g.R;
    Cx pb(0.75 * L, 0.0);
    Cx p1(0.75 * L, R);
    Cx p2(0.75 * L, 1.5 * R);
    Cx LL(L, 0.0), LiR(L, R), Lcorner(L, L), topb(0.75 * L, L), iR(0.0, R), iL(0.0, L);

    // collar: left edge onto the quarter circle, swept to the cut [pb, p2]
    m.cells.push_back(make_cell("phi1.collar", line_path(Cx(0, 0), iR), line_path(pb, p1),
                                exp_path(Cx(std::log(R), 0.0), Cx(std::log(R), kPi / 2.0)),
                                line_path(pb, p2)));
    // bottom strip (identity on the bottom and right parts of dQ)
    m.cells.push_back(make_cell("phi1.bottom", line_path(pb, p1), line_path(LL, LiR),
                                line_path(pb, p2), line_path(LL, LiR)));
    // right-top block
    m.cells.push_back(make_cell("phi1.right", line_path(p1, topb), line_path(LiR, Lcorner),
                                line_path(p2, topb), line_path(LiR, Lcorner)));
    // top-left block
    m.cells.push_back(make_cell("phi1.top", line_path(iR, iL), line_path(p1, topb),
                                line_path(iR, iL), line_path(p2, topb)));

    m.target_quads = {
        ConvexQuad{{pb, LL, LiR, p2}},        // bottom
        ConvexQuad{{p2, LiR, Lcorner, topb}}, // right-top
        ConvexQuad{{iR, p2, topb, iL}},       // top-left
    };
    return m;
}

Cx Phi1Map::forward(const Cx& z) const {
    double L = geo.L, R = geo.R;
    double pb = 0.75 * L;
    int idx;
    if (z.real() <= pb && z.imag() <= R)
        idx = 0;
    else if (z.real() > pb && z.imag() <= R)
        idx = 1;
    else if (z.real() > pb)
        idx = 2;
    else
        idx = 3;
    return cells[idx].forward(z);
}

Cx Phi1Map::backward(const Cx& w) const {
    for (int i = 0; i < 3; ++i)
        if (target_quads[i].contains(w, 1e-11)) return cells[i + 1].backward(w);
    return cells[0].backward(w);
}

Phi2Map make_phi2(int d) {
    GSquareGeometry g = g_square_geometry(d);
    Phi2Map m;
    m.geo = g;
    double R = g.R, yd = g.yd, Y1 = g.Y1, Y2 = g.Y2, Y3 = g.Y3;
    double t_corner = (R - yd) / (Y2 - yd);
    double rho_c = Y3 + t_corner * (Y2 - Y3);
    const double xc = 0.25, xcp = 0.75;
    const double ym = Y2 + 0.4 * (Y1 - Y2);

    auto two_cosh = [](const Cx& z) { return 2.0 * std::cosh(z); };
    Cx sigma2 = two_cosh(Cx(0, Y2));
    Cx e2 = two_cosh(Cx(1, Y2));
    auto chord = [&](double x) { return (1.0 - x) * sigma2 + x * e2; };
    auto hyp = [&](double x) { return two_cosh(Cx(x, Y1)); };
    Cx Cimg = chord(xc), Cpimg = chord(xcp);
    Cx Mimg = 0.6 * chord(xc) + 0.4 * hyp(xc);
    Cx Mpimg = 0.6 * chord(xcp) + 0.4 * hyp(xcp);
    Cx mm(xc, ym), mmp(xcp, ym);

    // band below the corner cut: circle arc against the ellipse
    m.cells.push_back(make_cell(
        "phi2.B1", line_path(Cx(0, yd), Cx(0, R)), line_path(Cx(1, Y3), Cx(1, rho_c)),
        exp_path(Cx(0, (d - 0.5) * kPi), Cx(0, d * kPi)), cosh_path(Cx(1, Y3), Cx(1, rho_c))));
    // band up to Y2: real segment against the ellipse
    m.cells.push_back(make_cell(
        "phi2.B2", line_path(Cx(0, R), Cx(0, Y2)), line_path(Cx(1, rho_c), Cx(1, Y2)),
        cosh_path(Cx(0, R), Cx(0, Y2)), cosh_path(Cx(1, rho_c), Cx(1, Y2))));
    // top block fan around (xc, ym), (xcp, ym)
    m.cells.push_back(make_cell("phi2.TL", line_path(Cx(0, Y2), Cx(0, Y1)),
                                line_path(Cx(xc, Y2), mm), cosh_path(Cx(0, Y2), Cx(0, Y1)),
                                line_path(Cimg, Mimg)));
    m.cells.push_back(make_cell("phi2.TT", line_path(Cx(0, Y1), Cx(1, Y1)), line_path(mm, mmp),
                                cosh_path(Cx(0, Y1), Cx(1, Y1)), line_path(Mimg, Mpimg)));
    // swept from the interior cut onto the ellipse edge (keeps orientation)
    m.cells.push_back(make_cell("phi2.TR", line_path(Cx(xcp, Y2), mmp),
                                line_path(Cx(1, Y2), Cx(1, Y1)), line_path(Cpimg, Mpimg),
                                cosh_path(Cx(1, Y2), Cx(1, Y1))));
    m.cells.push_back(make_cell("phi2.TM", line_path(Cx(xc, Y2), mm), line_path(Cx(xcp, Y2), mmp),
                                line_path(Cimg, Mimg), line_path(Cpimg, Mpimg)));
    return m;
}

int Phi2Map::cell_index(const Cx& z) const {
    double R = geo.R, yd = geo.yd, Y2 = geo.Y2, Y3 = geo.Y3, Y1 = geo.Y1;
    const double xc = 0.25, xcp = 0.75;
    const double ym = Y2 + 0.4 * (Y1 - Y2);
    if (z.imag() <= Y2 + 1e-12) {
        // below the corner cut through (0,R)-(1,rho_c)?
        double t_corner = (R - yd) / (Y2 - yd);
        double rho_c = Y3 + t_corner * (Y2 - Y3);
        double cut_y = R + z.real() * (rho_c - R);
        return z.imag() <= cut_y ? 0 : 1;
    }
    ConvexQuad TL{{Cx(0, Y2), Cx(xc, Y2), Cx(xc, ym), Cx(0, Y1)}};
    ConvexQuad TM{{Cx(xc, Y2), Cx(xcp, Y2), Cx(xcp, ym), Cx(xc, ym)}};
    ConvexQuad TR{{Cx(xcp, Y2), Cx(1, Y2), Cx(1, Y1), Cx(xcp, ym)}};
    if (TL.contains(z, 1e-12)) return 2;
    if (TM.contains(z, 1e-12)) return 5;
    if (TR.contains(z, 1e-12)) return 4;
    return 3;  // TT
}

Cx Phi2Map::forward(const Cx& z) const { return cells[cell_index(z)].forward(z); }

Phi3Map make_phi3(int d) {
    GSquareGeometry g = g_square_geometry(d);
    Phi3Map m;
    m.geo = g;
    m.cell = make_cell("phi3", line_path(Cx(0, 0), Cx(0, g.yd)), line_path(Cx(1, 0), Cx(1, g.Y3)),
                       exp_path(Cx(0, 0), Cx(0, g.Y3)), cosh_path(Cx(1, 0), Cx(1, g.Y3)));
    return m;
}

Cx Phi3Map::forward(const Cx& z) const { return cell.forward(z); }

// ---- assembled G ------------------------------------------------------------

GMap::GMap(int d)
    : geo_(g_square_geometry(d)), phi1_(make_phi1(d)), phi2_(make_phi2(d)), phi3_(make_phi3(d)) {
    double yd = geo_.yd, Y1 = geo_.Y1, Y3 = geo_.Y3;
    t_poly_ = ConvexQuad{{Cx(0, yd), Cx(1, Y3), Cx(1, Y1), Cx(0, Y1)}};
    s_poly_ = ConvexQuad{{Cx(0, 0), Cx(1, 0), Cx(1, Y3), Cx(0, yd)}};
}

Cx GMap::power(const Cx& w) const {
    Cx base = w / geo_.R;
    Cx acc(1.0, 0.0);
    int e = 2 * geo_.d;
    while (e) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

Cx GMap::eval_gcheck(const Cx& q) const {
    if (t_poly_.contains(q, 1e-12)) return phi2_.forward(q);
    if (s_poly_.contains(q, 1e-12)) return phi3_.forward(q);
    return g_eval(q);
}

Cx GMap::eval(const Cx& z) const {
    if (!Rectangle(Cx(0, 0), geo_.L, geo_.L).contains(z, 1e-9))
        throw DomainError("GMap: point outside E");
    Cx w = z;
    bool conj_out = false;
    if (w.real() < 0.0) w = -w;
    if (w.imag() < 0.0) {
        w = std::conj(w);
        conj_out = true;
    }
    Cx value;
    if (std::abs(w) <= geo_.R) {
        value = power(w);
    } else {
        Cx q = phi1_.backward(w);
        q = Cx(std::clamp(q.real(), 0.0, geo_.L), std::clamp(q.imag(), 0.0, geo_.L));
        value = eval_gcheck(q);
    }
    return conj_out ? std::conj(value) : value;
}

std::shared_ptr<const GMap> shared_gmap(int d) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const GMap>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
    auto g = std::make_shared<const GMap>(d);
    cache[d] = g;
    return g;
}

namespace {

std::vector<Cx> sample_segment(Cx a, Cx b, int n) {
    std::vector<Cx> pts;
    pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i) pts.push_back(a + (b - a) * (double(i) / n));
    return pts;
}

std::vector<Cx> sample_circle(Cx c, double r, int n, double a0 = 0.0, double a1 = kTwoPi) {
    std::vector<Cx> pts;
    pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        double a = a0 + (a1 - a0) * double(i) / n;
        pts.push_back(c + r * std::exp(kI * a));
    }
    return pts;
}

double max_declared_K(const std::vector<CellMap>& cells) {
    double K = 1.0;
    for (const auto& c : cells) K = std::max(K, c.declared_K());
    return K;
}

}  // namespace

QRPiece build_phi1(int d) {
    auto m = std::make_shared<Phi1Map>(make_phi1(d));
    GSquareGeometry g = m->geo;
    QRPiece p;
    p.name = "phi1";
    p.d = d;
    p.bbox = Rectangle(Cx(g.L / 2.0, g.L / 2.0), g.L / 2.0, g.L / 2.0);
    p.inside = [g](const Cx& z) {
        return z.real() >= 0 && z.imag() >= 0 && z.real() <= g.L && z.imag() <= g.L;
    };
    p.eval = [m](const Cx& z) { return m->forward(z); };
    p.declared_dilatation_bound = max_declared_K(m->cells);
    double pb = 0.75 * g.L;
    p.seams = {sample_segment(Cx(pb, 0), Cx(pb, g.R), 200),
               sample_segment(Cx(pb, g.R), Cx(pb, g.L), 200),
               sample_segment(Cx(0, g.R), Cx(pb, g.R), 200)};
    return p;
}

QRPiece build_phi2(int d) {
    auto m = std::make_shared<Phi2Map>(make_phi2(d));
    GSquareGeometry g = m->geo;
    QRPiece p;
    p.name = "phi2";
    p.d = d;
    double ymid = 0.5 * (g.yd + g.Y1);
    p.bbox = Rectangle(Cx(0.5, ymid), 0.5, (g.Y1 - g.yd) / 2.0);
    ConvexQuad T{{Cx(0, g.yd), Cx(1, g.Y3), Cx(1, g.Y1), Cx(0, g.Y1)}};
    p.inside = [T](const Cx& z) { return T.contains(z, 0.0); };
    p.eval = [m](const Cx& z) { return m->forward(z); };
    p.declared_dilatation_bound = max_declared_K(m->cells);
    double t_corner = (g.R - g.yd) / (g.Y2 - g.yd);
    double rho_c = g.Y3 + t_corner * (g.Y2 - g.Y3);
    const double xc = 0.25, xcp = 0.75;
    double ym = g.Y2 + 0.4 * (g.Y1 - g.Y2);
    p.seams = {sample_segment(Cx(0, g.R), Cx(1, rho_c), 200),
               sample_segment(Cx(0, g.Y2), Cx(1, g.Y2), 200),
               sample_segment(Cx(0, g.Y1), Cx(xc, ym), 100),
               sample_segment(Cx(xc, g.Y2), Cx(xc, ym), 100),
               sample_segment(Cx(xcp, g.Y2), Cx(xcp, ym), 100),
               sample_segment(Cx(xc, ym), Cx(xcp, ym), 100),
               sample_segment(Cx(1, g.Y1), Cx(xcp, ym), 100)};
    return p;
}

QRPiece build_phi3(int d) {
    auto m = std::make_shared<Phi3Map>(make_phi3(d));
    GSquareGeometry g = m->geo;
    QRPiece p;
    p.name = "phi3";
    p.d = d;
    p.bbox = Rectangle(Cx(0.5, g.Y3 / 2.0), 0.5, g.Y3 / 2.0);
    ConvexQuad S{{Cx(0, 0), Cx(1, 0), Cx(1, g.Y3), Cx(0, g.yd)}};
    p.inside = [S](const Cx& z) { return S.contains(z, 0.0); };
    p.eval = [m](const Cx& z) { return m->forward(z); };
    p.declared_dilatation_bound = std::exp(m->cell.src.certified_r + m->cell.tgt.certified_r);
    p.seams = {};
    return p;
}

QRPiece build_G(int d, double R) {
    GSquareGeometry g = g_square_geometry(d);
    if (std::abs(R - g.R) > 1e-9 * g.R)
        throw DomainError("build_G: R must equal (d - 1/3) pi");
    auto m = shared_gmap(d);
    QRPiece p;
    p.name = "G";
    p.d = d;
    p.bbox = Rectangle(Cx(0, 0), g.L, g.L);
    double L = g.L;
    p.inside = [L](const Cx& z) {
        return std::abs(z.real()) <= L && std::abs(z.imag()) <= L;
    };
    p.eval = [m](const Cx& z) { return m->eval(z); };
    double K1 = max_declared_K(m->phi1().cells);
    p.declared_dilatation_bound = K1 * K1;  // phi1 chart composed with the gcheck cells
    // seams: the disc boundary, the fold axes, the phi1 cuts and the
    // phi1-images of dT and dS, mirrored into all four quadrants
    std::vector<std::vector<Cx>> quadrant;
    quadrant.push_back(sample_circle(Cx(0, 0), g.R, 400, 0.0, kPi / 2.0));
    double pb = 0.75 * L;
    quadrant.push_back(sample_segment(Cx(pb, 0), Cx(pb, 1.5 * g.R), 100));
    quadrant.push_back(sample_segment(Cx(pb, 1.5 * g.R), Cx(pb, L), 100));
    quadrant.push_back(sample_segment(Cx(0, g.R), Cx(pb, 1.5 * g.R), 100));
    auto push_image = [&](const std::vector<Cx>& qpts) {
        std::vector<Cx> img;
        img.reserve(qpts.size());
        for (const Cx& q : qpts) img.push_back(m->phi1().forward(q));
        quadrant.push_back(std::move(img));
    };
    // dT and dS inside Q (their images are seams of G in E)
    double t_corner = (g.R - g.yd) / (g.Y2 - g.yd);
    double rho_c = g.Y3 + t_corner * (g.Y2 - g.Y3);
    push_image(sample_segment(Cx(0, g.yd), Cx(1, g.Y3), 150));
    push_image(sample_segment(Cx(1, g.Y3), Cx(1, g.Y1), 100));
    push_image(sample_segment(Cx(0, g.Y1), Cx(1, g.Y1), 100));
    push_image(sample_segment(Cx(1, 0), Cx(1, g.Y3), 100));
    push_image(sample_segment(Cx(0, g.R), Cx(1, rho_c), 100));
    push_image(sample_segment(Cx(0, g.Y2), Cx(1, g.Y2), 100));
    // axes (fold seams)
    quadrant.push_back(sample_segment(Cx(0, 0), Cx(L, 0), 100));
    quadrant.push_back(sample_segment(Cx(0, 0), Cx(0, L), 100));
    for (const auto& pl : quadrant) {
        std::vector<Cx> m1, m2, m3;
        for (const Cx& z : pl) {
            m1.push_back(-z);
            m2.push_back(std::conj(z));
            m3.push_back(-std::conj(z));
        }
        p.seams.push_back(pl);
        p.seams.push_back(std::move(m1));
        p.seams.push_back(std::move(m2));
        p.seams.push_back(std::move(m3));
    }
    return p;
}

Cx rho_eval(const Cx& z, const Cx& w) {
    double m = std::abs(z);
    if (m > 1.0 + 1e-12) throw DomainError("rho_eval: point outside the closed unit disc");
    double lambda = std::clamp((kRhoOuter - m) / (kRhoOuter - kRhoInner), 0.0, 1.0);
    return z + lambda * w;
}

QRPiece build_rho(const Cx& w) {
    if (!(std::abs(w) < 0.75)) throw DomainError("build_rho: |w| >= 3/4 rejected");
    QRPiece p;
    p.name = "rho";
    p.d = 0;
    p.bbox = Rectangle(Cx(0, 0), 1.0, 1.0);
    p.inside = [](const Cx& z) { return std::abs(z) <= 1.0; };
    Cx wc = w;
    p.eval = [wc](const Cx& z) { return rho_eval(z, wc); };
    double a = std::abs(w) / (2.0 * (kRhoOuter - kRhoInner));
    double mu = a / (1.0 - a);
    p.declared_dilatation_bound = (1.0 + mu) / (1.0 - mu);
    p.seams = {sample_circle(Cx(0, 0), kRhoInner, 200), sample_circle(Cx(0, 0), kRhoOuter, 200)};
    return p;
}

// ---- dilatation estimation --------------------------------------------------

Cx wirtinger_mu(const std::function<Cx(const Cx&)>& f, const Cx& z, double h) {
    auto derivs = [&](double hh, Cx& dz, Cx& dzb) {
        Cx fr = f(z + Cx(hh, 0)), fl = f(z - Cx(hh, 0));
        Cx fu = f(z + Cx(0, hh)), fd = f(z - Cx(0, hh));
        Cx dx = (fr - fl) / (2.0 * hh);
        Cx dy = (fu - fd) / (2.0 * hh);
        dz = 0.5 * (dx - kI * dy);
        dzb = 0.5 * (dx + kI * dy);
    };
    Cx dz1, dzb1, dz2, dzb2;
    derivs(h, dz1, dzb1);
    derivs(h / 2.0, dz2, dzb2);
    Cx dz = (4.0 * dz2 - dz1) / 3.0;
    Cx dzb = (4.0 * dzb2 - dzb1) / 3.0;
    if (std::abs(dz) == 0.0) return Cx(2.0, 0.0);  // flagged as orientation violation
    return dzb / dz;
}

DilatationReport estimate_dilatation(const QRPiece& piece, int grid_res) {
    if (grid_res < 64) throw DomainError("estimate_dilatation: grid_res >= 64");
    DilatationReport rep;
    rep.piece = piece.name;
    rep.d = piece.d;
    rep.grid_res = grid_res;

    const Rectangle& B = piece.bbox;
    double dx = 2.0 * B.half_width / grid_res;
    double dy = 2.0 * B.half_height / grid_res;
    double cell = std::min(dx, dy);
    double h = cell / 8.0;

    // seam exclusion mask on the sampling grid (2h neighborhoods)
    std::vector<unsigned char> near_seam(std::size_t(grid_res) * grid_res, 0);
    auto mark = [&](const Cx& p) {
        int pad = int(std::ceil(2.0 * h / dx)) + 1;
        int ci = int((p.real() - B.xmin()) / dx);
        int cj = int((p.imag() - B.ymin()) / dy);
        for (int j = cj - pad; j <= cj + pad; ++j)
            for (int i = ci - pad; i <= ci + pad; ++i)
                if (i >= 0 && j >= 0 && i < grid_res && j < grid_res)
                    near_seam[std::size_t(j) * grid_res + i] = 1;
    };
    for (const auto& polyline : piece.seams) {
        for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
            Cx a = polyline[k], b = polyline[k + 1];
            int steps = std::max(1, int(std::abs(b - a) / (cell / 2.0)));
            for (int s = 0; s <= steps; ++s) mark(a + (b - a) * (double(s) / steps));
        }
        if (polyline.size() == 1) mark(polyline[0]);
    }

    struct RowMax {
        double mu = -1.0;
        Cx at;
        long counted = 0, excl_band = 0, excl_degen = 0;
        bool orient = true;
    };
    std::vector<RowMax> rows(grid_res);

    parallel_for(grid_res, [&](long j) {
        RowMax& rm = rows[j];
        for (int i = 0; i < grid_res; ++i) {
            Cx z(B.xmin() + (i + 0.5) * dx, B.ymin() + (j + 0.5) * dy);
            if (!piece.inside(z)) continue;
            if (near_seam[std::size_t(j) * grid_res + i]) {
                rm.excl_band++;
                continue;
            }
            bool stencil_ok = true;
            for (const Cx off : {Cx(h, 0), Cx(-h, 0), Cx(0, h), Cx(0, -h)})
                if (!piece.inside(z + off)) {
                    stencil_ok = false;
                    break;
                }
            if (!stencil_ok) {
                rm.excl_band++;
                continue;
            }
            Cx dz1, dzb1, dz2, dzb2;
            auto derivs = [&](double hh, Cx& dz, Cx& dzb) {
                Cx fr = piece.eval(z + Cx(hh, 0)), fl = piece.eval(z - Cx(hh, 0));
                Cx fu = piece.eval(z + Cx(0, hh)), fd = piece.eval(z - Cx(0, hh));
                Cx dxv = (fr - fl) / (2.0 * hh);
                Cx dyv = (fu - fd) / (2.0 * hh);
                dz = 0.5 * (dxv - kI * dyv);
                dzb = 0.5 * (dxv + kI * dyv);
            };
            derivs(h, dz1, dzb1);
            derivs(h / 2.0, dz2, dzb2);
            Cx dz = (4.0 * dz2 - dz1) / 3.0;
            Cx dzb = (4.0 * dzb2 - dzb1) / 3.0;
            double fscale = std::abs(piece.eval(z));
            if (std::abs(dz) < 1e-12 * (1.0 + fscale) / h) {
                if (std::abs(dzb) > 1e-6 * (1.0 + fscale) / h) {
                    rm.orient = false;  // anti-conformal: d_z vanishes, d_zbar does not
                    rm.counted++;
                } else {
                    rm.excl_degen++;  // critical point: both derivatives collapse
                }
                continue;
            }
            double mu = std::abs(dzb / dz);
            rm.counted++;
            if (mu >= 1.0) rm.orient = false;
            if (mu > rm.mu) {
                rm.mu = mu;
                rm.at = z;
            }
        }
    });

    for (const auto& rm : rows) {
        rep.counted += rm.counted;
        rep.excluded_band += rm.excl_band;
        rep.excluded_degenerate += rm.excl_degen;
        if (!rm.orient) rep.orientation_ok = false;
        if (rm.mu > rep.sup_mu) {
            rep.sup_mu = rm.mu;
            rep.argmax = rm.at;
        }
    }
    rep.sup_K = rep.sup_mu < 1.0 ? (1.0 + rep.sup_mu) / (1.0 - rep.sup_mu) : 1e308;

    // seam continuity: probe at polyline vertices (on the true curve),
    // one-sided linear extrapolation from both sides removes the smooth
    // drift; vertices near polyline ends are skipped, where the probes
    // would straddle the adjoining seam
    double worst = 0.0;
    for (const auto& polyline : piece.seams) {
        if (polyline.size() < 3) continue;
        for (std::size_t k = 1; k + 1 < polyline.size(); ++k) {
            Cx p = polyline[k];
            Cx tangent = polyline[k + 1] - polyline[k - 1];
            double tl = std::abs(tangent);
            if (tl == 0.0) continue;
            Cx nrm = kI * tangent / tl;
            double eps = 1e-6 * (1.0 + std::abs(p));
            double end_arc = std::min(std::abs(p - polyline.front()),
                                      std::abs(p - polyline.back()));
            if (end_arc < 30.0 * eps) continue;
            Cx q1 = p + eps * nrm, q2 = p + 2.0 * eps * nrm;
            Cx q3 = p - eps * nrm, q4 = p - 2.0 * eps * nrm;
            if (!piece.inside(q2) || !piece.inside(q4)) continue;
            Cx lim_plus = 2.0 * piece.eval(q1) - piece.eval(q2);
            Cx lim_minus = 2.0 * piece.eval(q3) - piece.eval(q4);
            double rel = std::abs(lim_plus - lim_minus) /
                         (1.0 + std::max(std::abs(lim_plus), std::abs(lim_minus)));
            worst = std::max(worst, rel);
        }
    }
    rep.seam_jump_rel = worst;
    return rep;
}

std::string DilatationReport::to_json() const {
    nlohmann::json j;
    j["piece"] = piece;
    j["d"] = d;
    j["grid_res"] = grid_res;
    j["sup_mu"] = sup_mu;
    j["sup_K"] = sup_K;
    j["argmax"] = {argmax.real(), argmax.imag()};
    j["seam_jump"] = seam_jump_rel;
    j["excluded_band"] = excluded_band;
    j["excluded_degenerate"] = excluded_degenerate;
    j["counted"] = counted;
    j["orientation_ok"] = orientation_ok;
    return j.dump(2);
}

}  // namespace qrwd
