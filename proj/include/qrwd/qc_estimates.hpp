#pragma once

#include <vector>

#include "qrwd/base_map.hpp"
#include "qrwd/geometry.hpp"
#include "qrwd/scaled_real.hpp"

namespace qrwd {

// Discs B_m = D(zeta_m, r_m) with the quasiconformal constant K.
struct DiscFamily {
    std::vector<Disc> discs;
    double K = 1.5;
    double delta1 = 0.1;  // opaque constant of the key inequality
};

// integral over D(alpha, r) of dx dy / |z - beta|; <= 2 pi r.
double disc_pole_integral(const Cx& alpha, double r, const Cx& beta, double rel_tol = 1e-6);

struct KeyInequalityResult {
    double total = 0.0;
    std::vector<double> per_disc;
    double C = 1.0;
    double K = 1.5;
};

// C(K-1) * sum_m  iint_{B_m} |beta-alpha| dA / (|z-a||z-b||z-c|)
KeyInequalityResult key_inequality_rhs(const Cx& alpha, const Cx& beta, const Cx& gamma,
                                       const DiscFamily& family, double C = 1.0,
                                       double rel_tol = 1e-5);

// single-disc integrand used by the case-bound checks
double key_disc_integral(const Disc& B, const Cx& alpha, const Cx& beta, const Cx& gamma,
                         double rel_tol = 1e-5);

struct AssumptionReport {
    bool magnitude_ok = true;   // |zeta_m| >= 4
    bool ratio_ok = true;       // r_m/|zeta_m| <= min(1/4, delta1)
    std::vector<double> partial_sums;  // of r_m/|zeta_m|
    double C1 = 0.0;            // largest pairwise separation constant
};

AssumptionReport check_assumption(const DiscFamily& family, int boundary_samples = 256);

// Paper discs {3 D_n} at true scale: pairwise |z-z'| >= 1/2 sqrt(|z z'|),
// verified in log scale for n in [n_lo, n_hi].
bool paper_separation_log(const Schedule& true_schedule, int n_lo, int n_hi);

// log rho_n = -n C5 - sum_{j<n} x_j - x_{n-1}
ScaledReal inner_radius_log(int n, double C5, const std::vector<ScaledReal>& orbit);

// 2 d_n log 2 > (n+1) C5 + sum_{j<=n} x_j + x_n  (i.e. (1/2)^{2 d_n} < rho_{n+1})
bool inclusion_check(int n, double C5, const Schedule& true_schedule,
                     const std::vector<ScaledReal>& orbit);

// smallest passing n in [n_lo, n_hi]; 0 if none
int inclusion_sweep(double C5, const Schedule& true_schedule, int n_lo, int n_hi);

}  // namespace qrwd
