#pragma once

#include <functional>
#include <string>
#include <vector>

#include "llgblow/types.hpp"

namespace llgblow {
namespace nonlocal {

/// Volterra kernel K0(zeta) = 2 (1 - e^{-(a+ib) zeta / 4}) / zeta and its first
/// two zeta-derivatives; a Taylor branch avoids cancellation for small zeta.
complexd kernel_K0(double zeta, const PhysParams& pp, int order = 0);

/// Self-similar mode-0 profile q0(xi) = (2 xi / (a+ib)) int_xi^inf (1-e^{-(a+ib)eta^2/4}) eta^-3 deta.
complexd profile_q0(double xi, const PhysParams& pp);

/// Trajectory of one bubble's parameters: p(t) = lambda e^{i gamma} and center xi(t).
/// Samples are interpolated monotonically in t; derivatives fall back to finite
/// differences of p when not supplied.
class ParamHistory {
public:
    ParamHistory() = default;

    /// Sampled history. pdot/xidot may be empty (finite differences then).
    ParamHistory(std::vector<double> t, std::vector<complexd> p, std::vector<Vec2> xi,
                 std::vector<complexd> pdot = {}, std::vector<Vec2> xidot = {});

    /// Analytic history from callables (exact derivatives).
    static ParamHistory analytic(std::function<complexd(double)> p, std::function<complexd(double)> pdot,
                                 std::function<Vec2(double)> xi, std::function<Vec2(double)> xidot,
                                 double t0, double t1);

    /// The type-II rate-law history: p(t) = |ln T| (T-t)/ln^2(T-t) * e^{i gamma0}, xi fixed.
    static ParamHistory rate_ansatz(double T, double gamma0 = 0.0, Vec2 xi = {0.0, 0.0});

    complexd p(double t) const;
    complexd pdot(double t) const;
    Vec2 xi(double t) const;
    Vec2 xidot(double t) const;
    double t_min() const { return t_lo_; }
    double t_max() const { return t_hi_; }

    /// Max relative mismatch between supplied pdot and finite differences of p
    /// (0 when derivatives were derived from p itself).
    double derivative_consistency() const { return consistency_; }

    static ParamHistory load_csv(const std::string& path);

private:
    void require_cover(double t) const;

    std::function<complexd(double)> p_fn_, pdot_fn_;
    std::function<Vec2(double)> xi_fn_, xidot_fn_;
    double t_lo_ = 0.0, t_hi_ = 0.0;
    double consistency_ = 0.0;
};

/// Value and z-derivatives of the history integral Phi0 at one (z, t).
struct CorrectionSample {
    complexd Phi0;
    complexd dz;
    complexd dzz;
    double z;
    double t;
};

/// Phi0(z,t) = -z int_0^t pdot(s)/(t-s) K0(z^2/(t-s)) ds with the printed
/// derivative formulas; the quadrature splits at the zeta = 1 crossover.
CorrectionSample phi0_eval(double z, double t, const ParamHistory& hist, const PhysParams& pp,
                           double quad_tol = 1e-10);

/// Embedded vector correction Phi0*(x,t) = rho^2/(rho^2+1) Phi0(z,t) e^{i theta} in the
/// first two components, with z = sqrt(r^2 + lambda^2), r = |x - xi(t)|.
Vec3 phi0_star_field(const Vec2& x, double t, const ParamHistory& hist, const PhysParams& pp);

/// Radial/angular derivative closed forms of Phi0* (for gradient cross-checks):
/// d/dr component = [2 lambda^-1 rho/(rho^2+1)^2 Phi0 + rho^3/(rho^2+1)^{3/2} dPhi0/dz] e^{i theta}.
struct Phi0StarDerivs {
    complexd value;     // complex slot of Phi0*
    complexd d_r;       // radial derivative of the complex slot
    complexd d_theta;   // angular derivative of the complex slot
};
Phi0StarDerivs phi0_star_derivs(double r, double theta, double t, const ParamHistory& hist,
                                const PhysParams& pp);

/// New error produced by the global correction around a single bubble:
///   S = -dt Phi0* + (a - b U ^)[Lap Phi0* + |grad U|^2 Phi0* - 2 grad(U.Phi0*) grad U] - dt U,
/// with dt U from the analytic modulation identities and the correction derivatives by
/// finite differences in r and t.
Vec3 residual_Sj(const Vec2& x, double t, const ParamHistory& hist, const PhysParams& pp,
                 double h_rel = 1e-4);

/// Complex form of the slow-decay modulation error: (E0)_C = -2 rho/(rho^2+1) (lambdadot/lambda + i gammadot).
complexd mode0_error_complex(double rho, const ParamHistory& hist, double t);

} // namespace nonlocal
} // namespace llgblow
