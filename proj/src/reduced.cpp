#include "llgblow/reduced.hpp"

#include <algorithm>
#include <cmath>

#include "llgblow/quadrature.hpp"

namespace llgblow {
namespace reduced {

std::vector<MomentRow> moment_table(double tol) {
    std::vector<MomentRow> rows;
    auto add = [&](const std::string& name, const std::function<double(double)>& f, double expected) {
        const double v = integrate_real_to_infinity(f, 0.0, tol * 1e-2, tol);
        rows.push_back({name, v, expected});
    };
    add("mode0_leading",
        [](double x) {
            const double x2 = x * x;
            return 0.5 * (-3.0 * x2 - 8.0 * x2 * x2) * std::pow(x2 + 1.0, -3.5);
        },
        -1.0);
    add("mode0_dispersive",
        [](double x) {
            const double x2 = x * x;
            return (3.0 * x2 - 4.0 * x2 * x2) * std::pow(x2 + 1.0, -4.5);
        },
        0.0);
    add("mode0_pdot_direct",
        [](double x) {
            const double x2 = x * x;
            return 2.0 * x * x2 / ((x + std::sqrt(x2 + 1.0)) * std::pow(x2 + 1.0, 2.5));
        },
        5.0 / 3.0 - std::log(4.0));
    add("mode0_lambdadot_direct",
        [](double x) {
            const double x2 = x * x;
            const double root = std::sqrt(x2 + 1.0);
            return 4.0 * x2 * x2 * (x2 + x * root + 1.0) / ((x + root) * std::pow(x2 + 1.0, 4.0));
        },
        0.8);
    add("mode0_outer_coupling",
        [](double x) {
            const double x2 = x * x;
            return 4.0 * x * x2 / std::pow(x2 + 1.0, 3.0);
        },
        1.0);
    add("mode1_outer_coupling",
        [](double x) {
            const double x2 = x * x;
            return -2.0 * x * (x2 - 1.0) / std::pow(x2 + 1.0, 3.0);
        },
        0.0);
    return rows;
}

complexd b0_apply(const nonlocal::ParamHistory& hist, double t, double lambda_t) {
    const double upper = t - lambda_t * lambda_t;
    const double lo = std::max(0.0, hist.t_min());
    if (!(upper > lo)) throw domain_error("b0_apply: empty integration interval");
    auto f = [&](double s) -> complexd { return hist.pdot(s) / (t - s); };
    // geometric clustering of panels toward the upper endpoint
    std::vector<double> pts{lo};
    double gap = t - lo;
    const double gap_end = t - upper;
    while (gap > 2.0 * gap_end) {
        gap *= 0.5;
        pts.push_back(t - gap);
    }
    pts.push_back(upper);
    complexd total{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] <= pts[i]) continue;
        total += integrate(f, pts[i], pts[i + 1], 1e-14, 1e-11).value;
    }
    return total;
}

double p0_value(double T, double kappa, double t) {
    if (!(T > 0.0) || T >= std::exp(-1.0)) throw domain_error("p0_profile: need 0 < T < 1/e");
    if (t >= T) return 0.0;
    const double lnT = std::abs(std::log(T));
    auto f = [&](double sigma) { // sigma = T - s
        const double L = std::log(sigma);
        return 1.0 / (L * L);
    };
    return kappa * lnT * integrate_real(f, 0.0, T - t, 1e-16, 1e-12);
}

double p0_dot(double T, double kappa, double t) {
    if (!(T > 0.0) || T >= std::exp(-1.0)) throw domain_error("p0_profile: need 0 < T < 1/e");
    const double L = std::log(T - t);
    return -kappa * std::abs(std::log(T)) / (L * L);
}

RateProfile p0_profile(double T, double kappa, std::size_t n_samples) {
    RateProfile prof;
    prof.T = T;
    prof.kappa = kappa;
    prof.t.resize(n_samples);
    prof.p.resize(n_samples);
    prof.pdot.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = T * (1.0 - 1e-9) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
        prof.t[i] = t;
        prof.p[i] = p0_value(T, kappa, t);
        prof.pdot[i] = p0_dot(T, kappa, t);
    }
    return prof;
}

Feasibility param_feasible(const GluingParams& gp) {
    Feasibility out;
    const double Theta = gp.Theta, beta = gp.beta, sigma0 = gp.sigma0, delta0 = gp.delta0;
    const double nu = gp.nu, l = gp.l, alpha = gp.alpha, alpha0 = gp.alpha0;
    auto check = [&](bool ok, const std::string& name) {
        if (!ok) out.violations.push_back(name);
    };
    // the printed seven-line inequality block
    check(nu - delta0 - 0.5 > 0.0, "nu - delta0 - 1/2 > 0");
    check(Theta + beta + delta0 - nu < 0.0, "Theta + beta + delta0 - nu < 0");
    check(3.0 * beta < 1.0 + Theta, "3 beta < 1 + Theta");
    check(0.0 < delta0 && delta0 < beta && beta < 0.5, "0 < delta0 < beta < 1/2");
    check(beta * (l + 1.0) - 1.0 + nu - delta0 - Theta > 0.0, "beta(l+1) - 1 + nu - delta0 - Theta > 0");
    check(Theta + 2.0 * beta - 1.0 < 0.0, "Theta + 2 beta - 1 < 0");
    check(2.0 * beta + delta0 - nu < 0.0, "2 beta + delta0 - nu < 0");
    check(0.0 < Theta && Theta < beta, "0 < Theta < beta");
    check(0.0 < alpha && alpha < 1.0, "0 < alpha < 1");
    check(Theta + 0.5 - beta - alpha / 2.0 < 0.0, "Theta + 1/2 - beta - alpha/2 < 0");
    check(sigma0 > 0.0, "0 < sigma0");
    check(beta - sigma0 - alpha / 2.0 < 0.0, "beta - sigma0 - alpha/2 < 0");
    check(1.0 - sigma0 - (1.0 + alpha) * (1.0 - beta) < 0.0, "1 - sigma0 - (1+alpha)(1-beta) < 0");
    check(Theta + 2.0 * sigma0 - beta < 0.0, "Theta + 2 sigma0 - beta < 0");
    check(0.0 < nu && nu < 1.0, "0 < nu < 1");
    check(0.0 < l && l < 1.0, "0 < l < 1");
    check(nu + beta * l - 1.0 < 0.0, "nu + beta l - 1 < 0");
    check(0.0 < alpha0 && alpha0 < 0.5, "0 < alpha0 < 1/2");
    check(2.0 * beta - 1.0 + alpha0 > 0.0, "2 beta - 1 + alpha0 > 0");
    check(1.0 + Theta - alpha * (1.0 - beta) + (1.0 + alpha0) * alpha / 2.0 - 2.0 * beta > nu - delta0,
          "1 + Theta - alpha(1-beta) + (1+alpha0) alpha/2 - 2 beta > nu - delta0");
    // non-local restrictions not already covered above
    check(2.0 * Theta < alpha, "2 Theta < alpha");
    check(Theta - alpha * (1.0 - beta) < 0.0, "Theta - alpha(1-beta) < 0 (m < 0)");
    out.feasible = out.violations.empty();
    return out;
}

GluingParams sample_solution_box(const std::array<double, 8>& u) {
    auto lerp = [](double lo, double hi, double s) { return lo + (hi - lo) * s; };
    // keep a small safety margin away from the open-interval endpoints
    auto in = [&](double lo, double hi, double s) { return lerp(lo, hi, 0.02 + 0.96 * s); };
    GluingParams g{};
    g.Theta = in(0.0, 0.25, u[0]);
    g.beta = in(0.25, (1.0 + g.Theta) / 4.0, u[1]);
    g.sigma0 = in(0.0, (g.beta - g.Theta) / 2.0, u[2]);
    g.delta0 = in(0.0, (1.0 - 4.0 * g.Theta) / 4.0, u[3]);
    g.nu = in(1.0 - 2.0 * g.beta + g.delta0 + g.Theta,
              0.25 * (3.0 - 4.0 * g.beta + 4.0 * g.delta0 + 4.0 * g.Theta), u[4]);
    g.l = in((1.0 - g.beta + g.delta0 - g.nu + g.Theta) / g.beta, 1.0, u[5]);
    const double a0_lo = std::max(1.0 - 2.0 * g.beta,
                                  2.0 * g.nu - 2.0 * g.delta0 + 2.0 * g.beta - 1.0 - 2.0 * g.Theta);
    g.alpha0 = in(a0_lo, 0.5, u[6]);
    const double al_lo =
        std::max({2.0 * g.Theta + 1.0 - 2.0 * g.beta, 2.0 * g.beta - 2.0 * g.sigma0,
                  (g.beta - g.sigma0) / (1.0 - g.beta),
                  2.0 * (g.nu - g.delta0 + 2.0 * g.beta - 1.0 - g.Theta) / (2.0 * g.beta + g.alpha0 - 1.0)});
    g.alpha = in(al_lo, 1.0, u[7]);
    return g;
}

} // namespace reduced
} // namespace llgblow
