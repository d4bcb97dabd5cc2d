#include "llgblow/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace llgblow {
namespace geometry {

ProfileSample profile_w(double rho) {
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw domain_error("profile_w: rho must be finite and >= 0");
    const double d = rho * rho + 1.0;
    return {M_PI - 2.0 * std::atan(rho), -2.0 / d, 2.0 * rho / d, (rho * rho - 1.0) / d};
}

FrameSample bubble_frame(const Vec2& y) {
    if (!std::isfinite(y[0]) || !std::isfinite(y[1])) throw domain_error("bubble_frame: y must be finite");
    const double rho = std::hypot(y[0], y[1]);
    const double theta = (rho == 0.0) ? 0.0 : std::atan2(y[1], y[0]);
    const ProfileSample p = profile_w(rho);
    const double ct = std::cos(theta), st = std::sin(theta);
    FrameSample f;
    f.W = {ct * p.sin_w, st * p.sin_w, p.cos_w};
    f.E1 = {ct * p.cos_w, st * p.cos_w, -p.sin_w};
    f.E2 = {-st, ct, 0.0};
    f.w = p.w;
    f.w_rho = p.w_rho;
    f.grad_sq = 2.0 * p.w_rho * p.w_rho;
    return f;
}

Vec3 rotate_z(double gamma, const Vec3& v) {
    const double c = std::cos(gamma), s = std::sin(gamma);
    return {c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]};
}

Vec3 bubble_field(const BubbleParams& p, const Vec2& x) {
    const Vec2 y{(x[0] - p.xi[0]) / p.lambda, (x[1] - p.xi[1]) / p.lambda};
    return rotate_z(p.gamma, bubble_frame(y).W);
}

Vec3 ustar_sum(const std::vector<BubbleParams>& bubbles, const Vec2& x, bool strict) {
    if (bubbles.empty()) throw domain_error("ustar_sum: need at least one bubble");
    if (strict && bubbles.size() > 1) {
        double max_lambda = 0.0;
        for (const auto& b : bubbles) max_lambda = std::max(max_lambda, b.lambda);
        for (size_t j = 0; j < bubbles.size(); ++j)
            for (size_t k = j + 1; k < bubbles.size(); ++k) {
                double sep = std::hypot(bubbles[j].xi[0] - bubbles[k].xi[0],
                                        bubbles[j].xi[1] - bubbles[k].xi[1]);
                if (sep < 10.0 * max_lambda)
                    throw domain_error("ustar_sum: bubble centers closer than 10 max(lambda)");
            }
    }
    Vec3 u = (-(static_cast<double>(bubbles.size()) - 1.0)) * kNorthPole;
    for (const auto& b : bubbles) u += bubble_field(b, x);
    return u;
}

complexd complex_form(const Vec3& v, const FrameSample& frame, double gamma, double tol) {
    const double vn = norm(v);
    // tangency is against the rotated base map U = Q_gamma W
    if (std::abs(dot(v, rotate_z(gamma, frame.W))) > tol * std::max(vn, 1e-300))
        throw domain_error("complex_form: vector is not tangent to the base map");
    return {dot(v, rotate_z(gamma, frame.E1)), dot(v, rotate_z(gamma, frame.E2))};
}

Vec3 complex_form_inverse(const complexd& f, const FrameSample& frame, double gamma) {
    return f.real() * rotate_z(gamma, frame.E1) + f.imag() * rotate_z(gamma, frame.E2);
}

double corrector_A(const Vec3& ustar, const Vec3& phi) {
    const double n2 = dot(ustar, ustar);
    if (!(n2 >= 0.25)) throw domain_error("corrector_A: |U*| below 1/2, degenerate configuration");
    const double pu = dot(phi, ustar);
    const Vec3 perp = phi - pu * ustar;
    const double beta = pu * (1.0 - n2) / n2;
    const double disc = 1.0 + (1.0 - n2 - dot(perp, perp)) / n2 + beta * beta;
    if (!(disc >= 0.0)) throw domain_error("corrector_A: negative discriminant, degenerate configuration");
    return std::sqrt(disc) - 1.0 - beta;
}

Vec3 assemble_u(const std::vector<BubbleParams>& bubbles, const Vec3& phi, const Vec2& x) {
    const Vec3 ustar = ustar_sum(bubbles, x);
    const double A = corrector_A(ustar, phi);
    const double pu = dot(phi, ustar);
    return (1.0 + A) * ustar + phi - pu * ustar;
}

} // namespace geometry
} // namespace llgblow
