#pragma once

#include <cmath>
#include <complex>
#include <functional>

#include "llgblow/types.hpp"

namespace llgblow {

struct QuadResult {
    complexd value{0.0, 0.0};
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

/// Adaptive Gauss-Kronrod (G7 / K15) on a finite interval.
/// Integrand may be complex-valued; error is controlled on both parts.
QuadResult integrate(const std::function<complexd(double)>& f, double lo, double hi,
                     double abs_tol = 1e-12, double rel_tol = 1e-10, int max_depth = 48);

/// Integral over [lo, inf) with the algebraic-tail substitution x = lo + s/(1-s).
QuadResult integrate_to_infinity(const std::function<complexd(double)>& f, double lo,
                                 double abs_tol = 1e-12, double rel_tol = 1e-10);

/// Real-valued convenience wrappers.
double integrate_real(const std::function<double(double)>& f, double lo, double hi,
                      double abs_tol = 1e-12, double rel_tol = 1e-10);
double integrate_real_to_infinity(const std::function<double(double)>& f, double lo,
                                  double abs_tol = 1e-12, double rel_tol = 1e-10);

} // namespace llgblow
