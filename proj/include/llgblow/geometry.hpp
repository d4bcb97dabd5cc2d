#pragma once

#include <vector>

#include "llgblow/types.hpp"

namespace llgblow {
namespace geometry {

/// Bubble angle w(rho) = pi - 2 arctan(rho) and the closed forms derived from it.
struct ProfileSample {
    double w;
    double w_rho;
    double sin_w;
    double cos_w;
};

ProfileSample profile_w(double rho);

/// Frenet frame of the degree-1 bubble at a point of the rescaled plane.
/// {W, E1, E2} is orthonormal with W ^ E1 = E2, W ^ E2 = -E1, E1 ^ E2 = W.
struct FrameSample {
    Vec3 W;
    Vec3 E1;
    Vec3 E2;
    double w;
    double w_rho;
    double grad_sq; // |grad_y W|^2 = 8/(|y|^2+1)^2
};

/// Frame at y; the angular coordinate at y = 0 is set to 0 by convention.
FrameSample bubble_frame(const Vec2& y);

/// Rotation by gamma around the z-axis.
Vec3 rotate_z(double gamma, const Vec3& v);

/// One bubble: U(x) = Q_gamma W((x - xi)/lambda). Always unit length.
Vec3 bubble_field(const BubbleParams& p, const Vec2& x);

/// Multi-bubble first approximation U*(x) = -(N-1) e3 + sum_j U_j(x).
/// With `strict` set, configurations with min |xi_j - xi_k| < 10 max lambda_j are rejected.
Vec3 ustar_sum(const std::vector<BubbleParams>& bubbles, const Vec2& x, bool strict = false);

enum class ComplexFormDirection { to_complex, from_complex };

/// Tangent vector -> complex scalar against the rotated frame: f = v.(Q E1) + i v.(Q E2).
/// Throws if v fails the tangency test |v.W| <= tol |v|.
complexd complex_form(const Vec3& v, const FrameSample& frame, double gamma, double tol = 1e-8);

/// Complex scalar -> tangent vector: Re f Q E1 + Im f Q E2.
Vec3 complex_form_inverse(const complexd& f, const FrameSample& frame, double gamma);

/// Unit-length corrector A of the ansatz u = (1+A) U* + Phi - (Phi.U*) U*.
/// Requires |U*| >= 1/2 and a nonnegative discriminant.
double corrector_A(const Vec3& ustar, const Vec3& phi);

/// Full ansatz assembly; the result has unit norm for admissible inputs.
Vec3 assemble_u(const std::vector<BubbleParams>& bubbles, const Vec3& phi, const Vec2& x);

} // namespace geometry
} // namespace llgblow
