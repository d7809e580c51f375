#pragma once

#include <functional>
#include <memory>

#include "qrwd/base_map.hpp"
#include "qrwd/interpolation.hpp"

namespace qrwd {

enum class MapVariant { even, real_symmetric };

struct RegionLabel {
    enum class Kind { outside, annulus, disc };
    Kind kind = Kind::outside;
    int level = 0;  // signed: negative for the mirrored lower square
    int j = 0;
    int square_index = -1;  // index into Schedule::squares
};

// Critical-value parameters, one per schedule square; indices past the
// truncation return fill_value.
struct ParameterSequence {
    std::vector<Cx> w;
    Cx fill_value = Cx(0.5, 0.0);

    Cx at(int idx) const { return idx < int(w.size()) ? w[idx] : fill_value; }
};

// g_w / g~_w: 2cosh outside the squares, the cosh-power interpolation on
// the annuli, shifted power maps on the discs. Immutable after build.
class QuasiregularMap {
  public:
    QuasiregularMap(Schedule s, ParameterSequence w, MapVariant v = MapVariant::even);

    Cx eval(const Cx& z) const;
    RegionLabel classify(const Cx& z) const;
    bool in_support(const Cx& z) const;  // declared support of mu
    double support_inner_radius(int square_index) const;  // (1/8)^{1/(2d)} R

    const Schedule& schedule() const { return s_; }
    const ParameterSequence& params() const { return w_; }
    MapVariant variant() const { return v_; }
    const GMap& gmap(int square_index) const { return *g_[square_index]; }

  private:
    Cx eval_upper(const Cx& z) const;
    Schedule s_;
    ParameterSequence w_;
    MapVariant v_;
    std::vector<std::shared_ptr<const GMap>> g_;
};

// Power variant g_{p,w}(z) = g_w(z^{p/2}), principal branch.
Cx gpw_eval(const QuasiregularMap& m, int p_order, const Cx& z);

// Max of |f| over the circle |z| = r: 4096 samples plus golden-section
// refinement around the best one.
double max_modulus(double r, const std::function<Cx(const Cx&)>& f, int samples = 4096);

}  // namespace qrwd
