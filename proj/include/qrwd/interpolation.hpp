#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qrwd/geometry.hpp"

namespace qrwd {

// Parametric curve on [0, 1]. The argument path (1-t)a + tb feeds one of:
// the identity (straight segment), 2cosh, or exp; generic curves carry a
// callable and differentiate by central differences.
struct Curve {
    enum class Kind { line, cosh_arg, exp_arg, generic };
    Kind kind = Kind::line;
    Cx a, b;
    std::function<Cx(double)> fn;  // generic only, t in [0, 1]

    Cx at(double t) const;
    Cx deriv(double t) const;
};

Curve line_path(Cx a, Cx b);
Curve cosh_path(Cx a, Cx b);  // t -> 2 cosh((1-t)a + t b)
Curve exp_path(Cx a, Cx b);   // t -> exp((1-t)a + t b)
Curve generic_path(std::function<Cx(double)> fn);

// Sampled admissibility data of a curve pair: bounds used by the
// sufficiency formulas.
struct PairBounds {
    double v_min = 0, v_max = 0;  // |gamma_j'|
    double l_min = 0, l_max = 0;  // |gamma_2 - gamma_1|
    double theta = 0;             // max |arg(gamma_j'/(gamma2-gamma1)) - pi/2|
};

// s0 and hyperbolic radius from the sufficiency clause.
std::pair<double, double> theorem_constants(double theta, double v_min, double v_max,
                                            double l_min, double l_max);

// Linear interpolation sweep between two curves with a certified
// dilatation bound |mu| <= tanh(certified_r / 2). Curves are stored on
// [0, 1]; t_scale remembers the original parameter range so the map can
// be evaluated in the theorem's (s, t) coordinates.
struct InterpolationMap {
    Curve g1, g2;
    double s0 = 1.0;
    double t_scale = 1.0;
    double certified_r = 0.0;

    Cx eval01(double u, double t) const;  // (u, t) in [0,1]^2
    Cx eval_st(double s, double t) const; // (s, t) in [0, s0] x [0, t_scale]
    Cx d_u(double u, double t) const;
    Cx d_t(double u, double t) const;
};

PairBounds sample_pair_bounds(const Curve& g1, const Curve& g2, int samples = 1000);

// Public builder: validates the hypotheses at sampled parameters and
// certifies the enclosing hyperbolic radius (plus a 5% margin).
struct CurvePair {
    std::function<Cx(double)> gamma1, gamma2;
    double t_end = 1.0;
};
InterpolationMap build_linear_interp(const CurvePair& cp, double s0, int samples = 1000);

// One subdivision cell: the same parameter rectangle carries a straight
// source chart and the target interpolation; the piece map is
// target o source^{-1}.
struct CellMap {
    std::string name;
    InterpolationMap src, tgt;

    Cx forward(const Cx& z) const;   // z in source cell
    Cx backward(const Cx& w) const;  // w in target cell
    bool invert(const InterpolationMap& m, const Cx& w, double& u, double& t) const;
    double declared_K() const;       // exp(r_src + r_tgt)
};

struct DilatationReport {
    std::string piece;
    int d = 0;
    int grid_res = 0;
    double sup_mu = 0.0;
    double sup_K = 1.0;
    Cx argmax;
    double seam_jump_rel = 0.0;
    long counted = 0;
    long excluded_band = 0;
    long excluded_degenerate = 0;
    bool orientation_ok = true;
    std::string to_json() const;
};

// Region-labeled quasiregular piece.
struct QRPiece {
    std::string name;
    int d = 0;
    Rectangle bbox;
    std::function<bool(const Cx&)> inside;
    std::function<Cx(const Cx&)> eval;
    double declared_dilatation_bound = 1.0;
    std::vector<std::vector<Cx>> seams;  // sampled polylines, excluded from sup-K
};

// Pointwise Wirtinger quotient via central differences at h and h/2 with
// Richardson extrapolation of the derivatives.
Cx wirtinger_mu(const std::function<Cx(const Cx&)>& f, const Cx& z, double h);

DilatationReport estimate_dilatation(const QRPiece& piece, int grid_res);

// ---- The concrete pieces -------------------------------------------------

// Geometry of the interpolation square for a given d.
struct GSquareGeometry {
    int d;
    double L;    // 2 d pi (half side of E)
    double R;    // (d - 1/3) pi
    double yd;   // (2d-1)/(2d) R
    double Y1;   // (d - 1/6) pi, top of T
    double Y2;   // (d - 1/4) pi, interior cut
    double Y3;   // (d - 1/2) pi, right bottom corner of T
};
GSquareGeometry g_square_geometry(int d);

// Quarter-square to quarter-annulus chart (four cells).
struct Phi1Map {
    GSquareGeometry geo;
    std::vector<CellMap> cells;   // collar, bottom, right, top
    std::vector<ConvexQuad> target_quads;  // straight target cells (1..3)

    Cx forward(const Cx& z) const;   // Q -> Omega
    Cx backward(const Cx& w) const;  // Omega -> Q
};
Phi1Map make_phi1(int d);

// Trapezoid T onto the ellipse-annulus sector (six cells).
struct Phi2Map {
    GSquareGeometry geo;
    std::vector<CellMap> cells;  // B1, B2, TL, TT, TR, TM
    Cx forward(const Cx& z) const;
    int cell_index(const Cx& z) const;
};
Phi2Map make_phi2(int d);

// Trapezoid S onto the annulus E_1 \ D via the rectangle chart.
struct Phi3Map {
    GSquareGeometry geo;
    CellMap cell;  // src: rectangle -> S, tgt: rectangle -> annulus
    Cx forward(const Cx& z) const;
};
Phi3Map make_phi3(int d);

// Full interpolation map G on E: 2cosh on the boundary net, power map on
// the disc, interpolation in between; even and conjugation-symmetric.
class GMap {
  public:
    explicit GMap(int d);
    Cx eval(const Cx& z) const;
    Cx eval_gcheck(const Cx& q) const;  // on Q (first-quadrant chart)
    const GSquareGeometry& geometry() const { return geo_; }
    const Phi1Map& phi1() const { return phi1_; }
    QRPiece piece() const;

  private:
    GSquareGeometry geo_;
    Phi1Map phi1_;
    Phi2Map phi2_;
    Phi3Map phi3_;
    ConvexQuad t_poly_, s_poly_;
    Cx power(const Cx& w) const;  // (w/R)^{2d} by squaring
};

std::shared_ptr<const GMap> shared_gmap(int d);  // process-wide cache

QRPiece build_phi1(int d);
QRPiece build_phi2(int d);
QRPiece build_phi3(int d);
QRPiece build_G(int d, double R);  // R must equal (d - 1/3) pi

// Shift map rho_w on the closed unit disc: identity on the boundary,
// z + w on |z| <= kRhoInner (with D_{1/8} inside), radial-affine blend
// in the middle band. rho_0 is exactly the identity.
inline constexpr double kRhoInner = 0.15;
inline constexpr double kRhoOuter = 0.92;

Cx rho_eval(const Cx& z, const Cx& w);
QRPiece build_rho(const Cx& w);  // |w| >= 3/4 rejected

}  // namespace qrwd
