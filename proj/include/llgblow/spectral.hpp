#pragma once

#include <functional>
#include <vector>

#include "llgblow/grid.hpp"
#include "llgblow/types.hpp"

namespace llgblow {
namespace spectral {

/// Dirichlet-at-R discretization of the quadratic form Q_{R,k}.
struct SpectralProblem {
    int k = 0;
    double R = 50.0;
    std::size_t n = 4000;      // number of quadratic elements
    double grading = 9.0;      // geometric stretching strength
    double rho_min_factor = 1e-5; // innermost element boundary = R * factor

    void validate() const;
};

struct EigenEstimate {
    double lambda_min = 0.0;
    std::vector<double> nodes;   // global FE nodes (vertices + midpoints)
    std::vector<double> eigvec;  // eigenvector samples at the unknown nodes
    std::vector<double> eig_nodes; // coordinates of the unknown nodes
    double residual = 0.0;       // ||K v - lambda M v|| / ||v||_M
    int iterations = 0;
};

/// Principal eigenvalue of Q_{R,k} over X_0(B_R) (H_0^1 for k = 1) by quadratic
/// finite elements and shifted inverse iteration with Rayleigh refinement.
EigenEstimate principal_eigenvalue(const SpectralProblem& prob);

/// Q-value and mass of the cutoff kernel eta_{R/2} Z_{k,1} (upper-bound test function).
/// Only k = 0 and k = 1 carry printed asymptotics.
struct RayleighSample {
    double q_value = 0.0;
    double mass = 0.0;
};
RayleighSample rayleigh_test_function(int k, double R);

/// Weighted norms of an eigenvector: sup |f|, ||f/rho||_2, ||f'||_2, ||f||_X (2 pi weights).
struct SobolevCheck {
    double sup_f = 0.0;
    double l2_f_over_rho = 0.0;
    double l2_fprime = 0.0;
    double x_norm = 0.0;
};
SobolevCheck sobolev_diagnostic(const EigenEstimate& e);

/// Fundamental solution of d_t u = (a - ib) Lap u in R^d (principal branch powers).
complexd heat_kernel_gamma(int d, const std::vector<double>& x, double t, const PhysParams& pp);

/// Inhomogeneous mode-k radial problem d_tau phi = (a-ib)(phi'' + phi'/rho - k^2/rho^2 phi) + h
/// from zero data on a uniform grid [0, R]; h(i_node, tau).
struct DuhamelOptions {
    double R = 8.0;
    std::size_t n = 600;      // nodes including rho = 0
    double cfl = 0.2;         // dt = cfl * a * drho^2
    bool lifted = false;      // solve the (2k+2)-dimensional lifted form
};
std::vector<complexd> duhamel_mode_solve(int k, const std::function<complexd(double, double)>& h,
                                         double tau0, double tau1, const PhysParams& pp,
                                         const DuhamelOptions& opt);

/// Generalized eigenfunction of the half-line mode -1 operator, normalized so the
/// leading rho^{5/2} coefficient is 1; xi = 0 reproduces rho^{5/2}/(1+rho^2).
struct DistortedEig {
    double xi = 0.0;
    std::vector<double> rho;
    std::vector<double> values;
};
DistortedEig distorted_eigenfunction(double xi, const std::vector<double>& rho_nodes);

} // namespace spectral
} // namespace llgblow
