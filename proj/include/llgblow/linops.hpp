#pragma once

#include <map>
#include <vector>

#include "llgblow/grid.hpp"
#include "llgblow/types.hpp"

namespace llgblow {
namespace linops {

/// Kernel functions Z_{p,q} of the linearized harmonic-map operator L_W,
/// p in {-1,0,1}, q in {1,2}.
Vec3 vector_kernel(int p, int q, const Vec2& y);

/// A pair of closed-form radial kernels of the mode operator L_k with
/// Wronskian Z1 Z2' - Z1' Z2 = 1/rho.
struct ModeKernelPair {
    int k = 0;
    double z1(double rho) const;
    double z2(double rho) const;
    double z1_prime(double rho) const;
    double z2_prime(double rho) const;
    double wronskian(double rho) const { return z1(rho) * z2_prime(rho) - z1_prime(rho) * z2(rho); }
};

ModeKernelPair scalar_kernels(int k);

/// Mode-k potential V_k(rho); pole at rho = 0 except k = 1 where the limit is finite.
double potential_V(int k, double rho);

/// L_k f = f'' + f'/rho + V_k f by centered finite differences (one-sided at the ends).
RadialComplexField apply_mode(int k, const RadialComplexField& f);

/// Linearized harmonic-map operator around W on a polar grid:
///   L_W[phi] = Lap phi + |grad W|^2 phi + 2 (grad W . grad phi) W.
/// Input must be tangent to W at every node.
std::vector<Vec3> apply_LW(const TangentField& phi, double tangency_tol = 1e-8);

/// Inner-problem operator L_in f = Lap f + |grad W|^2 f - 2 grad(W.f) grad W + 2 (grad W . grad f) W.
/// Coincides with L_W on exactly tangent samples.
std::vector<Vec3> apply_Lin_vector(const TangentField& phi);

/// Complexified inner operator on the tangent plane:
///   [d_rr + d_r/rho + d_tt/rho^2 - 1/rho^2 + i (2 cos w / rho^2) d_t + 8/(rho^2+1)^2] Psi.
PolarComplexField apply_Lin_complex(const PolarComplexField& psi);

/// Fourier modes in theta (trapezoid; exact for band-limited data).
/// Throws if n_theta < 4 k_max; warns (via flag) when the k_max band carries
/// more than `alias_tol` of the total energy.
struct ModeDecomposition {
    std::map<int, RadialComplexField> modes;
    bool alias_warning = false;
};
ModeDecomposition fourier_modes(const PolarComplexField& psi, int k_max, double alias_tol = 1e-8);

/// Inverse of fourier_modes on the same grid.
PolarComplexField fourier_reconstruct(const ModeDecomposition& dec, const PolarGrid& grid);

} // namespace linops
} // namespace llgblow
