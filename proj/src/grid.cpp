#include "llgblow/grid.hpp"

#include <cmath>

namespace llgblow {

void RadialGrid::validate() const {
    if (nodes.size() < 4) throw domain_error("RadialGrid: need at least 4 nodes");
    if (!(nodes.front() > 0.0)) throw domain_error("RadialGrid: first node must be positive");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1])) throw domain_error("RadialGrid: nodes must be strictly increasing");
}

RadialGrid RadialGrid::make_uniform(double rho_min, double rho_max, std::size_t n) {
    RadialGrid g;
    g.spacing = Spacing::uniform;
    g.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        g.nodes[i] = rho_min + (rho_max - rho_min) * static_cast<double>(i) / static_cast<double>(n - 1);
    g.validate();
    return g;
}

RadialGrid RadialGrid::make_graded(double rho_min, double rho_max, std::size_t n, double strength) {
    RadialGrid g;
    g.spacing = Spacing::graded;
    g.nodes.resize(n);
    const double denom = std::expm1(strength);
    for (std::size_t i = 0; i < n; ++i) {
        double s = static_cast<double>(i) / static_cast<double>(n - 1);
        g.nodes[i] = rho_min + (rho_max - rho_min) * std::expm1(strength * s) / denom;
    }
    g.validate();
    return g;
}

void RadialComplexField::validate() const {
    grid.validate();
    if (values.size() != grid.size()) throw domain_error("RadialComplexField: length mismatch");
}

Stencil3 nonuniform_stencil(double hm, double hp) {
    Stencil3 s;
    const double sum = hm + hp;
    s.wm1 = -hp / (hm * sum);
    s.w0 = (hp - hm) / (hm * hp);
    s.wp1 = hm / (hp * sum);
    s.vm1 = 2.0 / (hm * sum);
    s.v0 = -2.0 / (hm * hp);
    s.vp1 = 2.0 / (hp * sum);
    return s;
}

} // namespace llgblow
