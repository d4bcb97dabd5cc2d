#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace llgblow {

using complexd = std::complex<double>;

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) { a[0] += b[0]; a[1] += b[1]; a[2] += b[2]; return a; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
    double n = norm(a);
    return {a[0] / n, a[1] / n, a[2] / n};
}

inline constexpr Vec3 kNorthPole{0.0, 0.0, 1.0};
inline constexpr Vec3 kSouthPole{0.0, 0.0, -1.0};

/// Thrown when an operation's preconditions are violated.
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an iterative method fails to reach its tolerance.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

/// Dissipation/dispersion pair (a, b) on the unit circle, a > 0.
/// Every linear operator in the toolkit is parameterized by it.
struct PhysParams {
    double a = 1.0;
    double b = 0.0;

    PhysParams() = default;

    /// Normalizes (a, b) onto a^2 + b^2 = 1; rejects a <= 0.
    PhysParams(double a_, double b_) {
        if (!(a_ > 0.0)) throw domain_error("PhysParams: dissipation a must be positive");
        double r = std::hypot(a_, b_);
        if (!(r > 0.0) || !std::isfinite(r)) throw domain_error("PhysParams: invalid (a,b)");
        a = a_ / r;
        b = b_ / r;
    }

    /// a + ib, the coefficient of the time derivative in the mode-0 correction PDE.
    complexd c_plus() const { return {a, b}; }
    /// a - ib, the diffusion coefficient of the complexified linearized flow.
    complexd c_minus() const { return {a, -b}; }
};

/// Scale / rotation / center of a single bubble.
struct BubbleParams {
    double lambda = 1.0;
    double gamma = 0.0;
    Vec2 xi{0.0, 0.0};

    BubbleParams() = default;
    BubbleParams(double lambda_, double gamma_, Vec2 xi_) : lambda(lambda_), gamma(gamma_), xi(xi_) {
        if (!(lambda > 0.0)) throw domain_error("BubbleParams: lambda must be positive");
    }

    /// p = lambda * e^{i gamma}.
    complexd p() const { return std::polar(lambda, gamma); }
};

} // namespace llgblow
