#include "qrwd/base_map.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace qrwd {

Cx g_eval(const Cx& z) {
    if (std::abs(z.real()) > 700.0)
        throw RangeError("g_eval: |Re z| > 700 overflows 2cosh");
    double cx = std::cosh(z.real()), sx = std::sinh(z.real());
    double cy = std::cos(z.imag()), sy = std::sin(z.imag());
    return Cx(2.0 * cx * cy, 2.0 * sx * sy);
}

double g_real(double x) {
    if (std::abs(x) > 700.0) throw RangeError("g_real: overflow");
    return 2.0 * std::cosh(x);
}

Cx g_inverse_branch(const Cx& v) {
    if (!finite(v)) throw DomainError("g_inverse_branch: non-finite input");
    if (v.imag() == 0.0 && v.real() <= 2.0)
        throw DomainError("g_inverse_branch: argument on the slit (-inf, 2]");
    Cx u = v * 0.5;
    Cx s = std::sqrt(u * u - 1.0);
    Cx w = u + s;
    if (std::abs(w) < 1.0) w = u - s;
    Cx z = std::log(w);
    if (z.real() < 0.0) z = -z;
    // polish; the closed form is already near full precision except close
    // to the slit, one or two Newton steps restore it
    for (int it = 0; it < 3; ++it) {
        Cx der = 2.0 * std::sinh(z);
        if (std::abs(der) < 1e-12) break;
        Cx step = (g_eval(z) - v) / der;
        z -= step;
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) break;
    }
    return z;
}

namespace {

std::vector<ScaledReal> tower_orbit(double start, int n_max) {
    if (n_max < 0 || n_max > 64) throw DomainError("orbit: n_max must be in [0, 64]");
    std::vector<ScaledReal> orbit;
    orbit.reserve(n_max + 1);
    double x = start;
    bool doubles = true;
    for (int n = 0; n <= n_max; ++n) {
        if (doubles) {
            orbit.push_back(ScaledReal::from_double(x));
            if (x < 700.0) {
                x = 2.0 * std::cosh(x);  // exact while representable
            } else {
                // log x_{k+1} = x_k + log1p(e^{-2 x_k}); the correction is
                // below 1e-600 here (x_k >= 700) and is dropped
                doubles = false;
                if (n + 1 <= n_max) {
                    orbit.push_back(ScaledReal::from_log(x));
                    ++n;
                }
            }
        } else {
            orbit.push_back(exp_of(orbit.back()));
        }
    }
    orbit.resize(std::size_t(n_max) + 1);
    return orbit;
}

}  // namespace

std::vector<ScaledReal> reference_orbit(int n_max) { return tower_orbit(0.5, n_max); }

std::vector<ScaledReal> critical_orbit(int n_max) { return tower_orbit(0.0, n_max); }

const std::vector<double>& reference_orbit_doubles() {
    static const std::vector<double> prefix = [] {
        std::vector<double> v;
        double x = 0.5;
        while (x < 700.0) {
            v.push_back(x);
            x = 2.0 * std::cosh(x);
        }
        v.push_back(x);  // x_3 ~ 1.54e4, still a plain double
        return v;
    }();
    return prefix;
}

Schedule build_schedule_true(int n_max) {
    if (n_max < 2 || n_max > 64) throw DomainError("build_schedule_true: n_max in [2, 64]");
    Schedule s;
    s.mode = ScheduleMode::true_scale;
    s.N = 3;
    auto orbit = reference_orbit(n_max + 1);
    const ScaledReal third_pi = ScaledReal::from_double(kPi / 3.0);
    const ScaledReal pi_s = ScaledReal::from_double(kPi);
    for (int n = 1; n <= n_max; ++n) {
        TrueEntry e;
        e.n = n;
        e.x = orbit[n];
        ScaledReal xn1 = orbit[n + 1];
        bool exact = false;
        if (n <= 2) {
            double xn1d = xn1.to_double(), xnd = e.x.to_double();
            double d = std::floor(xn1d / xnd);
            e.d = ScaledReal::from_double(d);
            e.R = ScaledReal::from_double((d - 1.0 / 3.0) * kPi);
            e.h = ScaledReal::from_double(kTwoPi * std::floor((xn1d + kPi) / kTwoPi));
            exact = true;
        } else {
            e.d = div(xn1, e.x);
            e.R = mul(sub(e.d, ScaledReal::from_double(1.0 / 3.0)), pi_s);
            e.h = add(xn1, pi_s);
            e.floor_skipped = true;
        }
        (void)exact;
        (void)third_pi;
        s.entries.push_back(e);
    }
    s.x_levels = reference_orbit_doubles();
    return s;
}

namespace {

double smallest_2pi_multiple_at_least(double v) {
    return kTwoPi * std::ceil(v / kTwoPi - 1e-12);
}

void validate_toy(Schedule& s) {
    std::sort(s.squares.begin(), s.squares.end(),
              [](const ToySquare& a, const ToySquare& b) { return a.h < b.h; });
    double prev_top = kPi;  // squares must clear the strip S+
    for (const auto& q : s.squares) {
        double side = 2.0 * q.d * kPi;
        if (q.h - side < prev_top - 1e-9)
            throw ConstructionError("toy schedule: squares overlap or touch the strip");
        prev_top = q.h + side;
        double rem = std::remainder(q.h, kTwoPi);
        if (std::abs(rem) > 1e-6 * std::max(1.0, q.h))
            throw ConstructionError("toy schedule: height not a multiple of 2 pi");
    }
}

}  // namespace

Schedule build_schedule_toy(const ToyParams& params) {
    if (params.d.empty()) throw DomainError("toy schedule: need at least one d");
    for (int d : params.d)
        if (d < 1) throw DomainError("toy schedule: d_n < 1 rejected");
    Schedule s;
    s.mode = ScheduleMode::toy;
    s.N = 1;
    s.toy = params;
    s.x_levels = reference_orbit_doubles();

    auto mk_square = [](int level, int j, int d, double h) {
        ToySquare q;
        q.level = level;
        q.j = j;
        q.d = d;
        q.R = (d - 1.0 / 3.0) * kPi;
        q.h = h;
        double side = 2.0 * d * kPi;
        q.E = Rectangle(Cx(0.0, h), side, side);
        q.D = Disc(Cx(0.0, h), q.R);
        return q;
    };

    if (params.multi_q > 0) {
        // one column per level n, min(n-2, q) copies offset by 6 R_n
        int L = int(params.d.size());
        double top_center = 0.0;
        for (int i = 0; i < L; ++i) {
            int n = params.first_level + i;
            int d = params.d[i];
            double R = (d - 1.0 / 3.0) * kPi;
            int count = std::min(n - 2, params.multi_q);
            double side = 2.0 * d * kPi;
            double lo = (i == 0) ? side + 2.0 * kPi
                                 : top_center + params.gap_factor *
                                       (2.0 * params.d[i - 1] * kPi + side);
            if (params.heights) lo = std::max(lo, (*params.heights)[i]);
            double base = smallest_2pi_multiple_at_least(lo);
            for (int j = 0; j < count; ++j)
                s.squares.push_back(mk_square(n, j, d, base + j * 6.0 * R));
            top_center = base + (count - 1) * 6.0 * R;
        }
    } else {
        int K = int(params.d.size());
        std::vector<double> hs(K);
        if (params.heights) {
            if (int(params.heights->size()) != K)
                throw DomainError("toy schedule: heights size mismatch");
            hs = *params.heights;
        } else {
            for (int i = 0; i < K; ++i) {
                double lo = (i == 0)
                                ? (2.0 * params.d[0] + 1.0) * kPi
                                : hs[i - 1] + params.gap_factor *
                                      (2.0 * params.d[i - 1] * kPi + 2.0 * params.d[i] * kPi);
                hs[i] = smallest_2pi_multiple_at_least(lo + 1e-9);
            }
        }
        for (int i = 0; i < K; ++i)
            s.squares.push_back(mk_square(s.N + i, 0, params.d[i], hs[i]));
    }
    validate_toy(s);
    return s;
}

bool GrowthReport::all_pass() const {
    if (!applicable) return false;
    if (!cauchy_tail) return false;
    for (const auto& r : rows)
        if (!(r.orbit_ratio && r.rh_ratio && r.h_growth && r.packed_sum && r.x_factorial &&
              r.disjoint))
            return false;
    return true;
}

GrowthReport verify_growth(const Schedule& s, int n_lo, int n_hi) {
    // The inequalities are verified in the log domain. The dominant tower
    // terms are compared as ScaledReals; the bounded coefficient factors are
    // absorbed into one-sided 0.01 slack terms, sound because
    // R_n/h_n <= 1.01 pi / x_n and the slack covers every log1p correction.
    GrowthReport rep;
    if (s.mode != ScheduleMode::true_scale) {
        rep.applicable = false;  // toy inequalities are checked individually elsewhere
        return rep;
    }
    if (n_lo < 1 || n_hi >= int(s.entries.size()))
        throw DomainError("verify_growth: range outside schedule entries");
    auto orbit = reference_orbit(n_hi + 2);
    std::vector<ScaledReal> Lx(orbit.size());
    for (std::size_t k = 0; k < orbit.size(); ++k)
        Lx[k] = orbit[k].is_zero() ? ScaledReal::zero() : log_of(orbit[k]);
    auto x_lower = [&](int n) {  // x_n as double, saturating for towers
        try {
            return orbit[n].to_double();
        } catch (const RangeError&) {
            return 1e300;
        }
    };
    const double slack = 0.01;
    for (int n = n_lo; n <= n_hi; ++n) {
        const TrueEntry& e = s.entries[n - 1];
        const TrueEntry& e1 = s.entries[n];
        GrowthRow row;
        row.n = n;
        double LF = 2.0 * std::lgamma(n + 1.0);  // log (n!)^2
        double eps_n = 1.01 * kPi / x_lower(n);
        double eps_n1 = 1.01 * kPi / x_lower(n + 1);
        if ((3.0 + 6.0 * n) * eps_n > slack || 3.0 * eps_n1 > slack)
            throw DomainError("verify_growth: slack assumption fails at n=" + std::to_string(n));
        ScaledReal Lh_n = log_of(e.h), Lh_n1 = log_of(e1.h);
        row.orbit_ratio = cmp(Lx[n + 1], add(ScaledReal::from_double(LF), Lx[n])) > 0;
        // R/h <= 1.01 pi/x_n, compare with 2pi/(n!)^2
        row.rh_ratio = cmp(sub(ScaledReal::from_double(std::log(1.01 * kPi)), Lx[n]),
                           ScaledReal::from_double(std::log(kTwoPi) - LF)) < 0;
        row.h_growth = cmp(add(sub(Lx[n + 2], Lx[n + 1]), ScaledReal::from_double(-slack)),
                           ScaledReal::from_double(LF)) > 0;
        row.packed_sum = cmp(add(Lh_n, ScaledReal::from_double(slack)),
                             add(Lh_n1, ScaledReal::from_double(std::log(6.0) - LF - slack))) < 0;
        row.x_factorial = cmp(Lx[n], ScaledReal::from_double(LF)) > 0;
        row.disjoint = cmp(add(Lh_n1, ScaledReal::from_double(-slack)),
                           add(Lh_n, ScaledReal::from_double(slack))) > 0;
        rep.rows.push_back(row);
    }
    // tail of sum R_n/h_n past n = 5: each term is at most 1.01 pi/x_n,
    // capped at 1e-300 once x_n leaves double range
    double tail = 0.0;
    for (int n = std::max(6, n_lo); n <= n_hi; ++n)
        tail += std::max(1.01 * kPi / x_lower(n), 1e-300);
    rep.cauchy_tail = tail < 1e-6;
    return rep;
}

CoveringReport check_rect_covering(double x, int boundary_samples) {
    if (!(x > 1.0) || x > 690.0) throw DomainError("check_rect_covering: x in (1, 690]");
    CoveringReport rep;
    rep.x = x;
    double ex = std::exp(x);
    rep.sinh_side = 2.0 * std::sinh(x + 1.0) > 2.0 * ex;
    rep.cosh_side = 0.5 * ex > 2.0 * std::cosh(x - 1.0);
    rep.boundary_clear = true;
    double worst = 0.0;
    Rectangle Q = q_rect(x);
    for (int i = 0; i < boundary_samples; ++i) {
        double t = double(i) / boundary_samples * 4.0;  // perimeter parameter
        Cx z;
        double u = t - std::floor(t);
        switch (int(std::floor(t)) % 4) {
            case 0: z = Cx(Q.xmin() + 2.0 * u, -kPi); break;
            case 1: z = Cx(Q.xmax(), -kPi + 2.0 * kPi * u); break;
            case 2: z = Cx(Q.xmax() - 2.0 * u, kPi); break;
            default: z = Cx(Q.xmin(), kPi - 2.0 * kPi * u); break;
        }
        Cx g = g_eval(z);
        double m = std::abs(g);
        bool inside_annulus = m > 0.5 * ex * (1.0 + 1e-12) && m < 2.0 * ex * (1.0 - 1e-12);
        if (inside_annulus) {
            bool near_cut = g.real() < 0.0 && std::abs(g.imag()) < 1e-9 * (1.0 + m);
            if (!near_cut) {
                rep.boundary_clear = false;
                worst = std::max(worst, std::min(m - 0.5 * ex, 2.0 * ex - m));
            }
        }
    }
    rep.worst_violation = worst;
    return rep;
}

OrbitRecord real_orbit_classify(double x0, const std::function<double(double)>& map,
                                double bailout, int max_iter) {
    if (!(bailout > 10.0)) throw DomainError("real_orbit_classify: bailout must exceed 10");
    OrbitRecord rec;
    double x = x0;
    rec.points.push_back(Cx(x, 0.0));
    for (int k = 1; k <= max_iter; ++k) {
        if (std::abs(x) > 700.0) {  // next step overflows: certainly escaping
            rec.classification = OrbitClass::escaping;
            rec.escape_index = k - 1;
            return rec;
        }
        x = map(x);
        rec.points.push_back(Cx(x, 0.0));
        if (!std::isfinite(x) || std::abs(x) > bailout) {
            rec.classification = OrbitClass::escaping;
            rec.escape_index = k;
            return rec;
        }
        for (std::size_t j = 0; j + 1 < rec.points.size(); ++j) {
            if (std::abs(rec.points[j].real() - x) < 1e-12 * (1.0 + std::abs(x))) {
                rec.classification = OrbitClass::bounded;  // revisited a point: cycle
                return rec;
            }
        }
    }
    rec.classification = OrbitClass::undecided;
    return rec;
}

namespace {

using nlohmann::json;

json logscale_json(const ScaledReal& v) {
    json j;
    ScaledReal c = v.is_zero() ? v : canonical(v);
    j["sign"] = c.sign;
    if (c.sign == 0) {
        j["logmag"] = 0.0;
    } else if (auto l = c.log_as_double()) {
        j["logmag"] = *l;
    } else {
        j["logmag"] = c.base;
        j["depth"] = c.depth;  // iterated-exponential depth of the log itself
    }
    return j;
}

ScaledReal logscale_from_json(const json& j) {
    int sign = j.at("sign").get<int>();
    if (sign == 0) return ScaledReal::zero();
    double lm = j.at("logmag").get<double>();
    if (j.contains("depth")) return canonical({sign, j["depth"].get<int>(), lm});
    return ScaledReal::from_log(lm, sign);
}

}  // namespace

std::string schedule_to_json(const Schedule& s) {
    json j;
    j["mode"] = s.mode == ScheduleMode::true_scale ? "true_scale" : "toy";
    j["N"] = s.N;
    if (s.mode == ScheduleMode::true_scale) {
        json arr = json::array();
        for (const auto& e : s.entries) {
            json je;
            je["n"] = e.n;
            je["x"] = logscale_json(e.x);
            je["d"] = logscale_json(e.d);
            je["R"] = logscale_json(e.R);
            je["h"] = logscale_json(e.h);
            je["floor_skipped"] = e.floor_skipped;
            arr.push_back(je);
        }
        j["entries"] = arr;
    } else {
        json arr = json::array();
        for (const auto& q : s.squares) {
            json jq;
            jq["level"] = q.level;
            jq["j"] = q.j;
            jq["d"] = q.d;
            jq["R"] = q.R;
            jq["h"] = q.h;
            jq["E"] = {{"cx", q.E.center.real()},
                       {"cy", q.E.center.imag()},
                       {"half_width", q.E.half_width},
                       {"half_height", q.E.half_height}};
            jq["D"] = {{"cx", q.D.center.real()}, {"cy", q.D.center.imag()}, {"radius", q.D.radius}};
            arr.push_back(jq);
        }
        j["squares"] = arr;
        j["gap_factor"] = s.toy.gap_factor;
        j["multi_q"] = s.toy.multi_q;
        j["first_level"] = s.toy.first_level;
        j["anchor_level"] = s.toy.anchor_level;
        json ds = json::array();
        for (int d : s.toy.d) ds.push_back(d);
        j["d"] = ds;
    }
    j["x_levels"] = s.x_levels;
    return j.dump(2);
}

Schedule schedule_from_json(const std::string& text) {
    json j = json::parse(text);
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "true_scale") {
        Schedule s;
        s.mode = ScheduleMode::true_scale;
        s.N = j.at("N").get<int>();
        for (const auto& je : j.at("entries")) {
            TrueEntry e;
            e.n = je.at("n").get<int>();
            e.x = logscale_from_json(je.at("x"));
            e.d = logscale_from_json(je.at("d"));
            e.R = logscale_from_json(je.at("R"));
            e.h = logscale_from_json(je.at("h"));
            e.floor_skipped = je.at("floor_skipped").get<bool>();
            s.entries.push_back(e);
        }
        s.x_levels = j.at("x_levels").get<std::vector<double>>();
        return s;
    }
    ToyParams p;
    p.d = j.at("d").get<std::vector<int>>();
    p.gap_factor = j.at("gap_factor").get<double>();
    p.multi_q = j.at("multi_q").get<int>();
    p.first_level = j.at("first_level").get<int>();
    p.anchor_level = j.at("anchor_level").get<int>();
    std::vector<double> hs;
    for (const auto& jq : j.at("squares")) hs.push_back(jq.at("h").get<double>());
    if (p.multi_q == 0) p.heights = hs;
    Schedule s = build_schedule_toy(p);
    s.N = j.at("N").get<int>();
    return s;
}

}  // namespace qrwd
