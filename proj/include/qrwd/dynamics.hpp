#pragma once

#include <functional>
#include <memory>

#include "qrwd/beltrami.hpp"
#include "qrwd/quasiregular.hpp"

namespace qrwd {

// A fully built toy realization: quasiregular map, integrating map, and
// the window/chain bookkeeping. Immutable once built.
struct ToyInstance {
    Schedule schedule;
    MapVariant variant = MapVariant::even;
    ParameterSequence w;
    std::shared_ptr<const QuasiregularMap> gw;
    std::shared_ptr<const GridMap> phi;
    bool solver_converged = false;
    std::vector<double> solver_residuals;
    Rectangle solve_box{Cx(0, 0), 1, 1};
    int M = 3;  // pullbacks per return (anchor_level + 1)
    int T = 0;  // number of shooting unknowns
    double mu_scale = 1.0;
    int solver_res = 256;
    SolveOptions solver_opts;
    std::vector<double> Rprime;  // C4 * R_k, filled by containment_suite

    Cx f_eval(const Cx& z) const { return gw->eval(phi->invert(z)); }
    std::function<Cx(const Cx&)> f() const {
        auto g = gw;
        auto p = phi;
        return [g, p](const Cx& z) { return g->eval(p->invert(z)); };
    }
};

struct ToyInstanceConfig {
    Schedule schedule;
    MapVariant variant = MapVariant::even;
    int solver_res = 256;
    SolveOptions solver;
    double mu_scale = 1.0;
    int truncation_T = -1;  // default: squares - 1
};

ToyInstance build_instance(const ToyInstanceConfig& cfg, const ParameterSequence& w);

// default solve box around the (upper) square cluster
Rectangle default_solve_box(const Schedule& s);

struct ContainmentReport {
    bool qm_into_disc = false;  // (phi o g^{-1})^M o phi(Q_M) in D(1/2, 1/8)
    double qm_max_dist = 0.0;   // max |point - 1/2| over samples
    std::vector<std::pair<int, bool>> q_chain;  // phi(Q_{j+1}) in g(Q_j)
    std::vector<bool> discs_in_gq;              // phi(D_k) in g(Q_anchor)
    std::vector<double> C4;                     // per square
    bool pass() const;
};

// Boundary-sampled containment checks; fills inst.Rprime.
ContainmentReport containment_suite(ToyInstance& inst, int boundary_samples = 1000);

struct CenterChain {
    int square = 0;            // equation target: chain of this square
    std::vector<Cx> hat_c;     // anchor-level first, descending
    std::vector<Cx> c;
    Cx terminal;               // c_k in D(1/2, 1/8)
};

CenterChain center_chain(const ToyInstance& inst, int square_index);

// w -> (c_{k+1}(w))_k as one vector (the fixed-point map of the shooting)
std::vector<Cx> shooting_targets(const ToyInstance& inst);

struct ShootResult {
    ParameterSequence w_star;
    double residual = 1e300;       // recomputed from scratch at w_star
    double contraction = 0.0;      // ratio of successive increments
    std::vector<double> increments;
    std::vector<int> excursions;   // iterates leaving closure of D(1/2,1/8)
    int iterations = 0;
    bool converged = false;
};

ShootResult shoot(const ToyInstanceConfig& cfg, const ParameterSequence& w0, double tol,
                  int max_iter);

struct InclusionRow {
    int k = 0;
    double image_radius = 0.0;   // sup |f(boundary of D(phi(ih_k), R'_k)) - w_k|
    double target_radius = 0.0;  // (1/2)^{2 d_k}
    double rho_hat_next = 0.0;   // measured inner radius of U_{k+1}
    double center_gap = 0.0;     // |w_k - c_{k+1}|
    double margin = 0.0;
    bool ok = false;
};

struct InclusionReport {
    std::vector<InclusionRow> rows;
    bool all_ok = true;
};

InclusionReport verify_inclusions(const ToyInstance& inst, int boundary_samples = 256);

// Koebe quarter-bound consistency: measured inner radius against the
// chain-rule derivative product.
struct KoebeRow {
    int k;
    double rho_hat;
    double quarter_bound;  // (1/4)|Psi'(phi(ih_k))| R'_k
    bool ok;               // rho_hat >= 0.95 * quarter_bound
};
std::vector<KoebeRow> koebe_consistency(const ToyInstance& inst);

OrbitRecord iterate_orbit(const std::function<Cx(const Cx&)>& f, const Cx& z0, int max_iter,
                          double bailout);

struct EscapeField {
    Rectangle window{Cx(0, 0), 1, 1};
    int nx = 0, ny = 0;
    int max_iter = 0;
    double bailout = 0.0;
    std::vector<int> counts;  // -1: interior flag at cap
};

EscapeField escape_time_field(const std::function<Cx(const Cx&)>& f, const Rectangle& window,
                              int nx, int ny, int max_iter, double bailout);

}  // namespace qrwd
