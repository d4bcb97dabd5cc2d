#pragma once

#include <string>
#include <vector>

#include "llgblow/nonlocal.hpp"
#include "llgblow/types.hpp"

namespace llgblow {
namespace reduced {

/// One orthogonality moment integral with its exact printed value.
struct MomentRow {
    std::string name;
    double computed;
    double expected;
};

/// The six mode-0 / mode-1 moment integrals, evaluated by adaptive quadrature.
std::vector<MomentRow> moment_table(double tol = 1e-10);

/// Non-local reduced operator: B0[p](t) = int_0^{t - lambda^2} pdot(s)/(t - s) ds.
complexd b0_apply(const nonlocal::ParamHistory& hist, double t, double lambda_t);

/// Leading rate profile p_{0,kappa}(t) = kappa |ln T| int_t^T |ln(T-s)|^{-2} ds.
struct RateProfile {
    double T;
    double kappa;
    std::vector<double> t;
    std::vector<double> p;
    std::vector<double> pdot; // analytic: -kappa |ln T| / ln^2(T-t)
};
RateProfile p0_profile(double T, double kappa, std::size_t n_samples = 257);

/// Pointwise evaluation of p_{0,kappa} and its derivative.
double p0_value(double T, double kappa, double t);
double p0_dot(double T, double kappa, double t);

/// Gluing-system parameters; m is always recomputed from the others.
struct GluingParams {
    double Theta, beta, sigma0, delta0, nu, l, alpha, alpha0;
    double m() const { return Theta - alpha * (1.0 - beta); }
};

struct Feasibility {
    bool feasible;
    std::vector<std::string> violations;
};

/// Evaluates the full printed inequality system (the seven-line block plus the
/// non-local parameter restrictions); reports every violated inequality.
Feasibility param_feasible(const GluingParams& gp);

/// Uniform sample from the printed solution box (intervals nested in order
/// Theta, beta, sigma0, delta0, nu, l, alpha0, alpha). u must supply 8 uniforms in [0,1].
GluingParams sample_solution_box(const std::array<double, 8>& u);

} // namespace reduced
} // namespace llgblow
