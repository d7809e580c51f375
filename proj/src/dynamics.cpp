#include "qrwd/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "qrwd/parallel.hpp"

namespace qrwd {

namespace {
const Cx kHalf(0.5, 0.0);
}

Rectangle default_solve_box(const Schedule& s) {
    if (s.squares.empty()) throw DomainError("default_solve_box: no squares");
    double xmax = 0.0, ylo = 1e308, yhi = -1e308;
    for (const auto& q : s.squares) {
        xmax = std::max(xmax, q.E.half_width);
        ylo = std::min(ylo, q.h - q.E.half_height);
        yhi = std::max(yhi, q.h + q.E.half_height);
    }
    double pad = 0.08 * (yhi - ylo) + 2.0;
    ylo -= pad;
    yhi += pad;
    double half_h = 0.5 * (yhi - ylo);
    double half_w = std::max(xmax + pad, half_h);  // keep cells square-ish
    return Rectangle(Cx(0.0, 0.5 * (ylo + yhi)), half_w, half_h);
}

ToyInstance build_instance(const ToyInstanceConfig& cfg, const ParameterSequence& w) {
    ToyInstance inst;
    inst.schedule = cfg.schedule;
    inst.variant = cfg.variant;
    inst.w = w;
    inst.mu_scale = cfg.mu_scale;
    inst.solver_res = cfg.solver_res;
    inst.solver_opts = cfg.solver;
    inst.solver_opts.mirror =
        cfg.variant == MapVariant::even ? MirrorMode::even : MirrorMode::conj_sym;
    inst.M = cfg.schedule.toy.anchor_level + 1;
    inst.T = cfg.truncation_T >= 0 ? cfg.truncation_T
                                   : std::max(1, int(cfg.schedule.squares.size()) - 1);
    inst.gw = std::make_shared<const QuasiregularMap>(cfg.schedule, w, cfg.variant);
    inst.solve_box = default_solve_box(cfg.schedule);

    const QuasiregularMap& gw = *inst.gw;
    auto field = sample_mu([&gw](const Cx& z) { return gw.eval(z); },
                           [&gw](const Cx& z) { return gw.in_support(z); }, inst.solve_box,
                           cfg.solver_res, cfg.solver_res, cfg.mu_scale);
    SolveResult sr = solve_mrmt(field, inst.solver_opts);
    inst.phi = sr.map;
    inst.solver_converged = sr.converged;
    inst.solver_residuals = sr.residuals;
    return inst;
}

namespace {

// g(Q(x)) = E_{x+1} \ (closure(E_{x-1}) u R_-)
bool in_g_of_q(double x, const Cx& w) {
    EllipseRegion outer = cosh_ellipse(x + 1.0);
    EllipseRegion inner = cosh_ellipse(x - 1.0);
    if (!(outer.residual(w) < 0.0)) return false;
    if (!(inner.residual(w) > 0.0)) return false;
    if (w.real() < 0.0 && std::abs(w.imag()) < 1e-12 * (1.0 + std::abs(w.real()))) return false;
    return true;
}

std::vector<Cx> rect_boundary(const Rectangle& Q, int n) {
    std::vector<Cx> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        double t = 4.0 * i / n;
        double u = t - std::floor(t);
        switch (int(std::floor(t)) % 4) {
            case 0: pts.push_back(Cx(Q.xmin() + 2.0 * Q.half_width * u, Q.ymin())); break;
            case 1: pts.push_back(Cx(Q.xmax(), Q.ymin() + 2.0 * Q.half_height * u)); break;
            case 2: pts.push_back(Cx(Q.xmax() - 2.0 * Q.half_width * u, Q.ymax())); break;
            default: pts.push_back(Cx(Q.xmin(), Q.ymax() - 2.0 * Q.half_height * u)); break;
        }
    }
    return pts;
}

}  // namespace

bool ContainmentReport::pass() const {
    if (!qm_into_disc) return false;
    for (const auto& [j, ok] : q_chain)
        if (!ok) return false;
    for (bool ok : discs_in_gq)
        if (!ok) return false;
    for (double c : C4)
        if (!(c > 0.0)) return false;
    return true;
}

ContainmentReport containment_suite(ToyInstance& inst, int boundary_samples) {
    ContainmentReport rep;
    const auto& xl = inst.schedule.x_levels;  // x_0 .. x_3
    int A = inst.schedule.toy.anchor_level;
    const GridMap& phi = *inst.phi;

    // (phi o g^{-1})^M o phi on dQ(x_{A+1}) lands in D(1/2, 1/8)
    {
        Rectangle QM = q_rect(xl.at(A + 1));
        double worst = 0.0;
        bool ok = true;
        for (const Cx& z : rect_boundary(QM, boundary_samples)) {
            Cx v = phi.eval(z);
            for (int j = 0; j < inst.M; ++j) v = phi.eval(g_inverse_branch(v));
            worst = std::max(worst, std::abs(v - kHalf));
            if (worst > 1.0 / 8.0) ok = false;
        }
        rep.qm_into_disc = ok;
        rep.qm_max_dist = worst;
    }

    // phi(Q_{j+1}) in g(Q_j) for the representable chain levels
    for (int j = 1; j <= A; ++j) {
        bool ok = true;
        for (const Cx& z : rect_boundary(q_rect(xl.at(j + 1)), boundary_samples))
            if (!in_g_of_q(xl.at(j), phi.eval(z))) {
                ok = false;
                break;
            }
        rep.q_chain.push_back({j, ok});
    }

    // phi(D_k) in g(Q_A), both mirror copies
    for (const auto& q : inst.schedule.squares) {
        bool ok = true;
        for (int i = 0; i < boundary_samples && ok; ++i) {
            Cx z = Cx(0.0, q.h) + q.R * std::exp(Cx(0, kTwoPi * i / boundary_samples));
            if (!in_g_of_q(xl.at(A), phi.eval(z))) ok = false;
            Cx zm = inst.variant == MapVariant::even ? -z : std::conj(z);
            if (ok && !in_g_of_q(xl.at(A), phi.eval(zm))) ok = false;
        }
        rep.discs_in_gq.push_back(ok);
    }

    // largest C4 with D(phi(ih_k), C4 R_k) inside phi((1/2) D_k), by radial
    // bisection on sampled directions; a 1% guard band covers the gaps
    // between direction samples
    inst.Rprime.clear();
    for (const auto& q : inst.schedule.squares) {
        Cx center = phi.eval(Cx(0.0, q.h));
        auto contained = [&](double c) {
            for (int i = 0; i < 96; ++i) {
                Cx t = center + c * q.R * std::exp(Cx(0, kTwoPi * i / 96.0));
                Cx pre;
                try {
                    pre = phi.invert(t);
                } catch (const std::exception&) {
                    return false;
                }
                if (std::abs(pre - Cx(0.0, q.h)) > 0.5 * q.R) return false;
            }
            return true;
        };
        double lo = 0.0, hi = 1.0;
        if (contained(0.02)) {
            lo = 0.02;
            for (int it = 0; it < 24; ++it) {
                double mid = 0.5 * (lo + hi);
                (contained(mid) ? lo : hi) = mid;
            }
        }
        lo *= 0.99;
        rep.C4.push_back(lo);
        inst.Rprime.push_back(lo * q.R);
    }
    return rep;
}

CenterChain center_chain(const ToyInstance& inst, int square_index) {
    const auto& xl = inst.schedule.x_levels;
    int A = inst.schedule.toy.anchor_level;
    const ToySquare& q = inst.schedule.squares.at(square_index);
    const GridMap& phi = *inst.phi;
    CenterChain ch;
    ch.square = square_index;
    Cx v = phi.eval(Cx(0.0, q.h));
    for (int level = A; level >= 1; --level) {
        Cx hat = g_inverse_branch(v);
        if (!q_rect(xl.at(level)).contains(hat, 0.05))
            throw ConstructionError("center_chain: hat_c left Q(x_" + std::to_string(level) +
                                    ") for square " + std::to_string(square_index));
        ch.hat_c.push_back(hat);
        v = phi.eval(hat);
        ch.c.push_back(v);
    }
    Cx hat0 = g_inverse_branch(v);
    ch.hat_c.push_back(hat0);
    ch.terminal = phi.eval(hat0);
    return ch;
}

std::vector<Cx> shooting_targets(const ToyInstance& inst) {
    std::vector<Cx> targets(inst.T);
    for (int k = 0; k < inst.T; ++k) targets[k] = center_chain(inst, k + 1).terminal;
    return targets;
}

ShootResult shoot(const ToyInstanceConfig& cfg, const ParameterSequence& w0, double tol,
                  int max_iter) {
    ShootResult res;
    ParameterSequence w = w0;
    ToyInstanceConfig inner = cfg;
    inner.solver.fill_phi_grid = false;
    int T = cfg.truncation_T >= 0 ? cfg.truncation_T
                                  : std::max(1, int(cfg.schedule.squares.size()) - 1);
    w.w.resize(T, w0.fill_value);
    for (int it = 0; it < max_iter; ++it) {
        ToyInstance inst = build_instance(inner, w);
        std::vector<Cx> c = shooting_targets(inst);
        double inc = 0.0;
        for (int k = 0; k < T; ++k) {
            inc = std::max(inc, std::abs(c[k] - w.w[k]));
            if (std::abs(c[k] - kHalf) > 1.0 / 8.0 + 1e-12) res.excursions.push_back(it);
            w.w[k] = c[k];
        }
        res.increments.push_back(inc);
        res.iterations = it + 1;
        if (inc < tol) {
            res.converged = true;
            break;
        }
    }
    res.w_star = w;
    if (res.increments.size() >= 2) {
        double a = res.increments[res.increments.size() - 2];
        double b = res.increments.back();
        res.contraction = a > 0.0 ? b / a : 0.0;
    }
    // residual recomputed from scratch
    ToyInstance fresh = build_instance(cfg, w);
    std::vector<Cx> c = shooting_targets(fresh);
    double r = 0.0;
    for (int k = 0; k < T; ++k) r = std::max(r, std::abs(c[k] - w.w[k]));
    res.residual = r;
    return res;
}

InclusionReport verify_inclusions(const ToyInstance& inst, int boundary_samples) {
    InclusionReport rep;
    const GridMap& phi = *inst.phi;
    int K = int(inst.schedule.squares.size());
    if (int(inst.Rprime.size()) != K)
        throw DomainError("verify_inclusions: run containment_suite first");
    for (int k = 0; k + 1 < K && k < inst.T; ++k) {
        const ToySquare& q = inst.schedule.squares[k];
        const ToySquare& qn = inst.schedule.squares[k + 1];
        InclusionRow row;
        row.k = k;
        row.target_radius = std::pow(0.5, 2.0 * q.d);
        Cx wk = inst.w.at(k);
        Cx center = phi.eval(Cx(0.0, q.h));
        for (int i = 0; i < boundary_samples; ++i) {
            Cx t = center + inst.Rprime[k] * std::exp(Cx(0, kTwoPi * i / boundary_samples));
            Cx img = inst.gw->eval(phi.invert(t));
            row.image_radius = std::max(row.image_radius, std::abs(img - wk));
        }
        CenterChain next = center_chain(inst, k + 1);
        row.center_gap = std::abs(wk - next.terminal);
        // measured inner radius of U_{k+1} by radial bisection: membership
        // tested by running the forward return and landing in the disc
        Cx target_center = phi.eval(Cx(0.0, qn.h));
        auto inside_U = [&](const Cx& u) {
            Cx z = u;
            try {
                for (int j = 0; j < inst.M; ++j) z = g_eval(phi.invert(z));
                // after M pullback inversions the point must sit in the R' disc
                return std::abs(z - target_center) <= inst.Rprime[k + 1];
            } catch (const std::exception&) {
                return false;
            }
        };
        double rho = 1e308;
        for (int dir = 0; dir < 32; ++dir) {
            Cx e = std::exp(Cx(0, kTwoPi * dir / 32.0));
            double lo = 0.0, hi = 2.0 * inst.Rprime[k + 1];  // generous start
            if (!inside_U(next.terminal + lo * e)) {
                rho = 0.0;
                break;
            }
            while (inside_U(next.terminal + hi * e) && hi < 1.0) hi *= 2.0;
            for (int it = 0; it < 40; ++it) {
                double mid = 0.5 * (lo + hi);
                (inside_U(next.terminal + mid * e) ? lo : hi) = mid;
            }
            rho = std::min(rho, lo);
        }
        row.rho_hat_next = rho;
        row.margin = rho - row.center_gap - row.image_radius;
        row.ok = row.image_radius <= row.target_radius * (1.0 + 1e-9) && row.margin > 0.0;
        rep.rows.push_back(row);
        if (!row.ok) rep.all_ok = false;
    }
    return rep;
}

std::vector<KoebeRow> koebe_consistency(const ToyInstance& inst) {
    std::vector<KoebeRow> rows;
    const GridMap& phi = *inst.phi;
    int K = int(inst.schedule.squares.size());
    for (int k = 0; k + 1 < K && k < inst.T; ++k) {
        // chain of square k+1 plays the role of Psi = (f^{M}|_U)^{-1}
        const ToySquare& qn = inst.schedule.squares[k + 1];
        Cx p = phi.eval(Cx(0.0, qn.h));
        auto chain_value = [&](const Cx& start) {
            Cx v = start;
            for (int j = 0; j < inst.M; ++j) v = phi.eval(g_inverse_branch(v));
            return v;
        };
        double delta = 1e-3 * inst.Rprime[k + 1];
        Cx d1 = (chain_value(p + delta) - chain_value(p - delta)) / (2.0 * delta);
        KoebeRow row;
        row.k = k;
        row.quarter_bound = 0.25 * std::abs(d1) * inst.Rprime[k + 1];
        // measured rho via the same bisection as verify_inclusions
        Cx center = chain_value(p);
        auto inside_U = [&](const Cx& u) {
            Cx z = u;
            try {
                for (int j = 0; j < inst.M; ++j) z = g_eval(phi.invert(z));
                return std::abs(z - p) <= inst.Rprime[k + 1];
            } catch (const std::exception&) {
                return false;
            }
        };
        double rho = 1e308;
        for (int dir = 0; dir < 32; ++dir) {
            Cx e = std::exp(Cx(0, kTwoPi * dir / 32.0));
            double lo = 0.0, hi = std::max(1e-12, 4.0 * row.quarter_bound);
            while (inside_U(center + hi * e) && hi < 1.0) hi *= 2.0;
            for (int it = 0; it < 40; ++it) {
                double mid = 0.5 * (lo + hi);
                (inside_U(center + mid * e) ? lo : hi) = mid;
            }
            rho = std::min(rho, lo);
        }
        row.rho_hat = rho;
        row.ok = rho >= 0.95 * row.quarter_bound;
        rows.push_back(row);
    }
    return rows;
}

OrbitRecord iterate_orbit(const std::function<Cx(const Cx&)>& f, const Cx& z0, int max_iter,
                          double bailout) {
    OrbitRecord rec;
    Cx z = z0;
    rec.points.push_back(z);
    for (int k = 1; k <= max_iter; ++k) {
        try {
            z = f(z);
        } catch (const RangeError&) {
            rec.classification = OrbitClass::escaping;  // overflow of 2cosh
            rec.escape_index = k;
            return rec;
        } catch (const std::exception&) {
            rec.classification = OrbitClass::undecided;
            rec.left_window = true;
            return rec;
        }
        rec.points.push_back(z);
        if (!finite(z) || std::abs(z) > bailout) {
            rec.classification = OrbitClass::escaping;
            rec.escape_index = k;
            return rec;
        }
    }
    rec.classification = OrbitClass::undecided;
    return rec;
}

EscapeField escape_time_field(const std::function<Cx(const Cx&)>& f, const Rectangle& window,
                              int nx, int ny, int max_iter, double bailout) {
    EscapeField field;
    field.window = window;
    field.nx = nx;
    field.ny = ny;
    field.max_iter = max_iter;
    field.bailout = bailout;
    field.counts.assign(std::size_t(nx) * ny, -1);
    double dx = 2.0 * window.half_width / nx, dy = 2.0 * window.half_height / ny;
    parallel_for(ny, [&](long j) {
        for (int i = 0; i < nx; ++i) {
            Cx z(window.xmin() + (i + 0.5) * dx, window.ymin() + (j + 0.5) * dy);
            int count = -1;
            for (int k = 1; k <= max_iter; ++k) {
                try {
                    z = f(z);
                } catch (const std::exception&) {
                    count = k;
                    break;
                }
                if (!finite(z) || std::abs(z) > bailout) {
                    count = k;
                    break;
                }
            }
            field.counts[std::size_t(j) * nx + i] = count;
        }
    });
    return field;
}

}  // namespace qrwd
