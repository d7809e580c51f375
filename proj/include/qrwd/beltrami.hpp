#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qrwd/geometry.hpp"

namespace qrwd {

// Complex samples on a cell-centered uniform grid.
struct FieldGrid {
    Rectangle box;
    int nx = 0, ny = 0;
    std::vector<Cx> values;  // row-major, j*nx + i

    double dx() const { return 2.0 * box.half_width / nx; }
    double dy() const { return 2.0 * box.half_height / ny; }
    Cx node(int i, int j) const {
        return Cx(box.xmin() + (i + 0.5) * dx(), box.ymin() + (j + 0.5) * dy());
    }
    Cx& at(int i, int j) { return values[std::size_t(j) * nx + i]; }
    const Cx& at(int i, int j) const { return values[std::size_t(j) * nx + i]; }
    Cx bilinear(const Cx& z) const;
};

struct BeltramiField {
    FieldGrid grid;   // mu samples, 0 outside the declared support
    double k_max = 0.0;  // recorded sup |mu|
};

// Sample mu of `map` at grid nodes inside `support`; aborts when any node
// reaches |mu| >= 0.95 (reported with the location).
BeltramiField sample_mu(const std::function<Cx(const Cx&)>& map,
                        const std::function<bool(const Cx&)>& support, const Rectangle& box,
                        int nx, int ny, double mu_scale = 1.0);

// How the sampled (upper) density extends to the mirrored cluster:
// even:  h(-z) = h(z);  conj:  h(conj z) = conj h(z).
enum class MirrorMode { none, even, conj_sym };

// Normalized approximate integrating map phi with phi(0)=0, phi(1)=1.
class GridMap {
  public:
    FieldGrid phi;            // normalized phi at nodes
    FieldGrid h;              // solved density (phi_raw = z + P[h])
    Cx anchor0, anchor1;      // raw phi at 0 and 1
    bool direct_mode = true;  // exact-kernel direct sums for evaluation
    MirrorMode mirror = MirrorMode::none;

    Cx eval(const Cx& z) const;
    Cx raw_eval(const Cx& z) const;      // z + P[h](z), direct kernel
    Cx invert(const Cx& target) const;   // Newton, real 2x2 with Wirtinger J
    Cx normalize(const Cx& raw) const { return (raw - anchor0) / (anchor1 - anchor0); }

    // nonzero-density cells for the direct Cauchy sums
    struct SupportCell {
        Cx pos;
        Cx hval;
    };
    std::vector<SupportCell> cells;
    double cell_area = 0.0;

    void rebuild_support_cells();
    std::pair<Cx, Cx> wirtinger_at(const Cx& z) const;  // (d_z phi_raw, d_zbar phi_raw)
};

struct SolveOptions {
    double tol = 1e-8;
    int max_terms = 200;
    double k_max = 0.95;
    int pad_factor = 2;           // zero padding per axis for the multipliers
    long direct_limit = 20000;    // support cells allowing direct-kernel mode
    MirrorMode mirror = MirrorMode::none;
    bool fill_phi_grid = true;    // inner shooting iterations skip the node fill
};

struct SolveResult {
    std::shared_ptr<GridMap> map;
    bool converged = false;
    std::vector<double> residuals;  // Neumann iteration sup-differences
};

SolveResult solve_mrmt(const BeltramiField& field, const SolveOptions& opt = {});

// Discrete Beurling transform of a padded field (exposed for the isometry
// and reference tests).
FieldGrid beurling_apply(const FieldGrid& h, int pad_factor = 2);
FieldGrid cauchy_apply(const FieldGrid& h, int pad_factor = 2);  // P[h] on nodes

// f_w = g_w o phi^{-1}
struct ComposedMap {
    std::function<Cx(const Cx&)> gw;
    std::shared_ptr<const GridMap> phi;
    Cx eval(const Cx& z) const { return gw(phi->invert(z)); }
};

// Binary container ("QRWD"): header + row-major float64 pairs.
void write_field_container(const std::string& path, const FieldGrid& g, unsigned kind);
FieldGrid read_field_container(const std::string& path, unsigned* kind_out = nullptr);

}  // namespace qrwd
