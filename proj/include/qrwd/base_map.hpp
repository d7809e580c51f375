#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qrwd/geometry.hpp"
#include "qrwd/scaled_real.hpp"

namespace qrwd {

// g(z) = 2 cosh z = e^z + e^{-z}; exactly even and conjugation-symmetric.
Cx g_eval(const Cx& z);
double g_real(double x);

// Unique preimage in S+ = {Re > 0, |Im| < pi}; domain excludes the slit (-inf, 2].
Cx g_inverse_branch(const Cx& v);

// Q(x) = {|Re z - x| < 1, |Im z| < pi}
inline Rectangle q_rect(double x) {
    if (!(x > 1.0)) throw DomainError("q_rect: requires x > 1");
    return Rectangle(Cx(x, 0.0), 1.0, kPi);
}

enum class OrbitClass { escaping, bounded, undecided };

struct OrbitRecord {
    std::vector<Cx> points;
    OrbitClass classification = OrbitClass::undecided;
    std::optional<std::size_t> escape_index;
    bool left_window = false;
};

// x_0 = 1/2, x_{k+1} = 2 cosh x_k. Doubles while < 700, then log recursion
// (correction log1p(e^{-2x}) dropped once x > 40, flagged in the entries).
std::vector<ScaledReal> reference_orbit(int n_max);
std::vector<ScaledReal> critical_orbit(int n_max);  // v_0 = 0

// Prefix of the reference orbit representable as plain doubles (x_0..x_3).
const std::vector<double>& reference_orbit_doubles();

enum class ScheduleMode { true_scale, toy };

struct TrueEntry {
    int n = 0;
    ScaledReal x;  // x_n
    ScaledReal d;  // d_n = floor(x_{n+1}/x_n); floor skipped for n >= 3
    ScaledReal R;  // (d_n - 1/3) pi
    ScaledReal h;  // 2 pi floor((x_{n+1} + pi)/(2 pi)); floor skipped for n >= 3
    bool floor_skipped = false;
};

struct ToySquare {
    int level = 0;  // dynamical level n
    int j = 0;      // vertical offset index (multi-square variant)
    int d = 1;
    double R = 0.0;
    double h = 0.0;  // center height, j offset included
    Rectangle E;     // upper square; lower mirror implied by symmetry
    Disc D;
};

struct ToyParams {
    std::vector<int> d;
    std::optional<std::vector<double>> heights;  // multiples of 2 pi
    double gap_factor = 1.5;
    int multi_q = 0;      // > 0 switches to the multi-square layout
    int first_level = 3;  // base level for multi counts min(n-2, q)
    int anchor_level = 2; // Q-chain level the squares attach to
};

struct Schedule {
    ScheduleMode mode = ScheduleMode::toy;
    int N = 1;  // first modified index
    // true scale
    std::vector<TrueEntry> entries;
    // toy
    std::vector<ToySquare> squares;
    ToyParams toy;
    std::vector<double> x_levels;  // representable reference prefix x_0..x_3

    const ToySquare& square(int idx) const { return squares.at(idx); }
    int square_count() const { return int(squares.size()); }
};

Schedule build_schedule_true(int n_max);
Schedule build_schedule_toy(const ToyParams& params);

struct GrowthRow {
    int n = 0;
    bool orbit_ratio = false;      // x_{n+1} > (n!)^2 x_n
    bool rh_ratio = false;         // R_n/h_n < 2 pi/(n!)^2
    bool h_growth = false;         // h_{n+1}/h_n > (n!)^2
    bool packed_sum = false;       // h_n + 3R_n + 6nR_n < 6/(n!)^2 (h_{n+1} - 3R_{n+1})
    bool x_factorial = false;      // x_n > (n!)^2
    bool disjoint = false;         // h_{n+1} - 2d_{n+1} pi > h_n + 2d_n pi
};

struct GrowthReport {
    bool applicable = true;  // false for toy schedules
    std::vector<GrowthRow> rows;
    bool cauchy_tail = false;  // sum_{n>5} R_n/h_n < 1e-6
    bool all_pass() const;
};

GrowthReport verify_growth(const Schedule& s, int n_lo, int n_hi);

struct CoveringReport {
    double x = 0.0;
    bool sinh_side = false;   // 2 sinh(x+1) > 2 e^x
    bool cosh_side = false;   // e^x/2 > 2 cosh(x-1)
    bool boundary_clear = false;
    double worst_violation = 0.0;
    bool pass() const { return sinh_side && cosh_side && boundary_clear; }
};

CoveringReport check_rect_covering(double x, int boundary_samples = 1000);

OrbitRecord real_orbit_classify(double x0, const std::function<double(double)>& map,
                                double bailout, int max_iter);

std::string schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const std::string& text);

}  // namespace qrwd
