#pragma once

#include <vector>

#include "llgblow/types.hpp"

namespace llgblow {

enum class Spacing { uniform, graded };

/// Strictly increasing radial nodes in (0, R]; the origin is never a node.
struct RadialGrid {
    std::vector<double> nodes;
    Spacing spacing = Spacing::uniform;

    std::size_t size() const { return nodes.size(); }
    double rho(std::size_t i) const { return nodes[i]; }
    double inner() const { return nodes.front(); }
    double outer() const { return nodes.back(); }

    void validate() const;

    static RadialGrid make_uniform(double rho_min, double rho_max, std::size_t n);
    /// Geometric stretching: node spacing grows smoothly away from the origin.
    static RadialGrid make_graded(double rho_min, double rho_max, std::size_t n, double strength);
};

/// Tensor polar grid: radial nodes x uniform angular nodes theta_m = 2 pi m / n_theta.
struct PolarGrid {
    RadialGrid radial;
    std::size_t n_theta = 0;

    double theta(std::size_t m) const { return 2.0 * M_PI * static_cast<double>(m) / static_cast<double>(n_theta); }
    std::size_t index(std::size_t i, std::size_t m) const { return i * n_theta + m; }
    std::size_t size() const { return radial.size() * n_theta; }
};

/// Complex samples over a RadialGrid.
struct RadialComplexField {
    RadialGrid grid;
    std::vector<complexd> values;

    void validate() const;
};

/// Three-component samples over a PolarGrid, tangent to the base map at each node.
struct TangentField {
    PolarGrid grid;
    std::vector<Vec3> values;
};

/// Complex scalar samples over a PolarGrid (the complex form of a tangent field).
struct PolarComplexField {
    PolarGrid grid;
    std::vector<complexd> values;
};

/// Second-order first/second derivative weights of a 3-point stencil at
/// spacings (h_minus, h_plus) around the center node.
struct Stencil3 {
    double wm1, w0, wp1; // first derivative
    double vm1, v0, vp1; // second derivative
};
Stencil3 nonuniform_stencil(double h_minus, double h_plus);

} // namespace llgblow
