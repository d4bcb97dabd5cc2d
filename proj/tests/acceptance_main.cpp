// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Usage: acceptance [--only N] [--skip N]

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <random>
#include <vector>

#include "llgblow/evolve.hpp"
#include "llgblow/geometry.hpp"
#include "llgblow/linops.hpp"
#include "llgblow/nonlocal.hpp"
#include "llgblow/reduced.hpp"
#include "llgblow/spectral.hpp"

using namespace llgblow;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << detail
              << std::endl;
    if (!pass) ++g_failures;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const auto start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

// --------------------------------------------------------------------------
// 1. moment constants within 1e-8, under one second

void criterion_1() {
    const double t0 = now_seconds();
    const auto rows = reduced::moment_table();
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, std::abs(r.computed - r.expected));
    const double elapsed = now_seconds() - t0;
    report(1, worst <= 1e-8 && elapsed < 1.0 && rows.size() == 6,
           "moment table max |err| = " + std::to_string(worst) + ", " + std::to_string(elapsed) +
               " s");
}

// --------------------------------------------------------------------------
// 2. kernel annihilation on a 2000-node graded grid with slope >= 1.9

double kernel_residual(int k, int which, std::size_t n) {
    const RadialGrid g = RadialGrid::make_graded(1e-3, 10.0, n, 5.0);
    const auto pair = linops::scalar_kernels(k);
    RadialComplexField f;
    f.grid = g;
    f.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        f.values[i] = (which == 1) ? pair.z1(g.rho(i)) : pair.z2(g.rho(i));
    const auto lf = linops::apply_mode(k, f);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double rho = g.rho(i);
        if (rho < 0.05 || rho > 9.0) continue;
        const double fv = std::abs(f.values[i]);
        const double scale =
            std::max(1.0, std::abs(linops::potential_V(k, rho)) * fv + fv / (rho * rho));
        worst = std::max(worst, std::abs(lf.values[i]) / scale);
    }
    return worst;
}

void criterion_2() {
    double worst_resid = 0.0, worst_slope = 1e9, worst_wronskian = 0.0;
    for (int k = -3; k <= 3; ++k) {
        for (int which : {1, 2}) {
            const double r_fine = kernel_residual(k, which, 2000);
            worst_resid = std::max(worst_resid, r_fine);
            const double r_coarse = kernel_residual(k, which, 500);
            worst_slope = std::min(worst_slope, std::log(r_coarse / r_fine) / std::log(4.0));
        }
        const auto pair = linops::scalar_kernels(k);
        for (int i = 1; i <= 200; ++i) {
            const double rho = 0.02 * i;
            worst_wronskian = std::max(worst_wronskian, std::abs(pair.wronskian(rho) - 1.0 / rho));
        }
    }
    report(2, worst_resid <= 1e-4 && worst_slope >= 1.9 && worst_wronskian <= 1e-9,
           "max residual = " + std::to_string(worst_resid) +
               ", slope = " + std::to_string(worst_slope) +
               ", wronskian err = " + std::to_string(worst_wronskian));
}

// --------------------------------------------------------------------------
// 3. vector/complex route equivalence on 20 random tangent fields

void criterion_3() {
    const double t0 = now_seconds();
    const PhysParams pp(0.8, 0.6);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    PolarGrid g;
    g.radial = RadialGrid::make_graded(0.2, 8.0, 220, 3.0);
    g.n_theta = 96;
    double h = 2.0 * M_PI / static_cast<double>(g.n_theta);
    for (std::size_t i = 1; i < g.radial.size(); ++i)
        h = std::max(h, g.radial.rho(i) - g.radial.rho(i - 1));

    bool pass = true;
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<complexd> coef;
        for (int k = -3; k <= 3; ++k) coef.push_back({u(rng), u(rng)});
        auto scalar_at = [&](double rho, double th) {
            complexd s{0.0, 0.0};
            int idx = 0;
            for (int k = -3; k <= 3; ++k, ++idx)
                s += coef[idx] * std::polar(rho / (1.0 + 0.2 * rho * rho), k * th) /
                     (1.0 + 0.3 * rho);
            return s;
        };
        PolarComplexField psi_c;
        psi_c.grid = g;
        psi_c.values.resize(g.size());
        TangentField psi;
        psi.grid = g;
        psi.values.resize(g.size());
        for (std::size_t i = 0; i < g.radial.size(); ++i)
            for (std::size_t m = 0; m < g.n_theta; ++m) {
                const double rho = g.radial.rho(i), th = g.theta(m);
                const complexd s = scalar_at(rho, th);
                psi_c.values[g.index(i, m)] = s;
                psi.values[g.index(i, m)] = geometry::complex_form_inverse(
                    s, geometry::bubble_frame({rho * std::cos(th), rho * std::sin(th)}), 0.0);
            }
        const auto Lv = linops::apply_Lin_vector(psi);
        const auto Lc = linops::apply_Lin_complex(psi_c);

        // C^2 proxy: sup (|Psi| + |d_rho Psi| + |d_rhorho Psi| + |d_theta Psi|/rho + |d_tt Psi|/rho^2)
        double proxy = 0.0, worst = 0.0;
        const double dth = 2.0 * M_PI / static_cast<double>(g.n_theta);
        for (std::size_t i = 2; i + 2 < g.radial.size(); ++i) {
            const double rho = g.radial.rho(i);
            const double hm = rho - g.radial.rho(i - 1), hp = g.radial.rho(i + 1) - rho;
            for (std::size_t m = 0; m < g.n_theta; ++m) {
                const std::size_t id = g.index(i, m);
                const std::size_t mp = (m + 1) % g.n_theta, mm = (m + g.n_theta - 1) % g.n_theta;
                const complexd v = psi_c.values[id];
                const complexd d_r =
                    (psi_c.values[g.index(i + 1, m)] - psi_c.values[g.index(i - 1, m)]) / (hm + hp);
                const complexd d_rr = (psi_c.values[g.index(i + 1, m)] - 2.0 * v +
                                       psi_c.values[g.index(i - 1, m)]) /
                                      (hm * hp);
                const complexd d_t =
                    (psi_c.values[g.index(i, mp)] - psi_c.values[g.index(i, mm)]) / (2.0 * dth);
                const complexd d_tt =
                    (psi_c.values[g.index(i, mp)] - 2.0 * v + psi_c.values[g.index(i, mm)]) /
                    (dth * dth);
                proxy = std::max(proxy, std::abs(v) + std::abs(d_r) + std::abs(d_rr) +
                                            std::abs(d_t) / rho + std::abs(d_tt) / (rho * rho));

                const double th = g.theta(m);
                const auto fr = geometry::bubble_frame({rho * std::cos(th), rho * std::sin(th)});
                const Vec3 lhs_vec = pp.a * Lv[id] - pp.b * cross(fr.W, Lv[id]);
                // the FD output is tangent only to discretization order; read the
                // frame components directly and fold the normal defect into the error
                const complexd lhs{dot(lhs_vec, fr.E1), dot(lhs_vec, fr.E2)};
                const double normal_defect = std::abs(dot(lhs_vec, fr.W));
                worst = std::max(worst,
                                 std::abs(lhs - pp.c_minus() * Lc.values[id]) + normal_defect);
            }
        }
        worst_ratio = std::max(worst_ratio, worst / (10.0 * h * h * proxy));
        if (worst > 10.0 * h * h * proxy) pass = false;
    }
    const double elapsed = now_seconds() - t0;
    report(3, pass && elapsed < 10.0,
           "worst discrepancy / (10 h^2 ||Psi||_C2) = " + std::to_string(worst_ratio) + ", " +
               std::to_string(elapsed) + " s");
}

// --------------------------------------------------------------------------
// 4. eigenvalue scalings

void criterion_4() {
    const std::vector<double> radii{50, 100, 200, 400, 800};
    std::vector<double> lam0, lam1;
    bool nonneg = true;
    for (double R : radii) {
        spectral::SpectralProblem p0;
        p0.k = 0;
        p0.R = R;
        const auto e0 = spectral::principal_eigenvalue(p0);
        spectral::SpectralProblem p1;
        p1.k = 1;
        p1.R = R;
        const auto e1 = spectral::principal_eigenvalue(p1);
        nonneg = nonneg && e0.lambda_min >= 0.0 && e1.lambda_min >= 0.0;
        lam0.push_back(e0.lambda_min);
        lam1.push_back(e1.lambda_min);
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) mean += lam0[i] * radii[i] * radii[i] * std::log(radii[i]);
    mean /= static_cast<double>(radii.size());
    double dev = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double c = lam0[i] * radii[i] * radii[i] * std::log(radii[i]);
        dev = std::max(dev, std::abs(c - mean) / mean);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double x = std::log(radii[i]), y = std::log(lam1[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double n = static_cast<double>(radii.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    report(4, nonneg && dev <= 0.30 && slope >= -4.3 && slope <= -3.7,
           "mode-0 constancy dev = " + std::to_string(dev) + ", mode-1 slope = " +
               std::to_string(slope));
}

// --------------------------------------------------------------------------
// 5. distorted mode -1 eigenfunctions

void criterion_5() {
    std::vector<double> rho;
    for (double r = 0.01; r <= 50.0; r *= 1.12) rho.push_back(r);
    const auto e0 = spectral::distorted_eigenfunction(0.0, rho);
    double worst = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double exact = std::pow(rho[i], 2.5) / (1.0 + rho[i] * rho[i]);
        worst = std::max(worst, std::abs(e0.values[i] - exact) / exact);
    }
    double worst_env = 0.0;
    for (double xi : {0.01, 0.1, 1.0, 10.0}) {
        std::vector<double> sub;
        for (double r : rho)
            if (r * r * xi <= 1.0) sub.push_back(r);
        const auto e = spectral::distorted_eigenfunction(xi, sub);
        for (std::size_t i = 0; i < sub.size(); ++i) {
            const double env = std::pow(sub[i], 2.5) / (1.0 + sub[i] * sub[i]);
            worst_env = std::max(worst_env, std::abs(e.values[i]) / env);
        }
    }
    report(5, worst <= 1e-8 && worst_env <= 5.0,
           "xi=0 rel err = " + std::to_string(worst) + ", envelope constant = " +
               std::to_string(worst_env));
}

// --------------------------------------------------------------------------
// 6. non-local correction certificates against frozen regression constants
//
// The first full run of this suite measured the two ratio maxima below; the
// criterion requires later runs to stay within 1.5x of the recorded values.

constexpr double kFrozenPhiRatio = 10.31;  // max of (Phi-0-j-upp) ratio, T in {1e-3, 1e-4}
constexpr double kFrozenSjRatio = 10.56;   // max of (Sj-est) ratio, same histories

void criterion_6() {
    double worst_phi = 0.0, worst_sj = 0.0;
    for (double T : {1e-3, 1e-4}) {
        const PhysParams pp(1.0, 0.0);
        auto hist = nonlocal::ParamHistory::rate_ansatz(T);
        const double lnT = std::abs(std::log(T));
        for (int i = 0; i < 40; ++i) {
            const double t = T * std::pow(10.0, -3.0 + 3.0 * i / 39.0) * 0.999;
            for (int j = 0; j < 40; ++j) {
                const double z = std::sqrt(T) * std::pow(10.0, -3.0 + 4.0 * j / 39.0);
                const auto c = nonlocal::phi0_eval(z, t, hist, pp);
                const double num = std::abs(c.Phi0) + z * std::abs(c.dz) + z * z * std::abs(c.dzz);
                const double den = (z * z < t) ? z : t / (lnT * z);
                worst_phi = std::max(worst_phi, num / den);
            }
        }
        // (Sj-est): |S| <= C (lambda^-1 <rho>^-2 + |lambdadot| <rho>^-1 + |xidot|)
        for (int i = 0; i < 12; ++i) {
            const double t = T * (0.05 + 0.9 * i / 11.0);
            const double lambda = std::abs(hist.p(t));
            const double lamdot = std::abs(hist.pdot(t));
            for (int j = 0; j < 12; ++j) {
                const double rhoj = std::pow(10.0, -1.0 + 3.0 * j / 11.0);
                const Vec3 s = nonlocal::residual_Sj({rhoj * lambda, 0.0}, t, hist, pp);
                const double rb = 1.0 + rhoj;
                const double den = 1.0 / (lambda * rb * rb) + lamdot / rb;
                worst_sj = std::max(worst_sj, norm(s) / den);
            }
        }
    }
    report(6, worst_phi <= 1.5 * kFrozenPhiRatio && worst_sj <= 1.5 * kFrozenSjRatio &&
               worst_phi < 1e3 && worst_sj < 1e3,
           "Phi ratio = " + std::to_string(worst_phi) + " (frozen " +
               std::to_string(kFrozenPhiRatio) + "), Sj ratio = " + std::to_string(worst_sj) +
               " (frozen " + std::to_string(kFrozenSjRatio) + ")");
}

// --------------------------------------------------------------------------
// 7. reduced operator on the leading profile

void criterion_7() {
    bool pass = true;
    double worst_margin = 0.0;
    for (double T : {1e-3, 1e-5}) {
        const double lnT = std::abs(std::log(T));
        auto hist = nonlocal::ParamHistory::analytic(
            [=](double s) { return complexd{reduced::p0_value(T, 1.0, s), 0.0}; },
            [=](double s) { return complexd{reduced::p0_dot(T, 1.0, s), 0.0}; },
            [](double) { return Vec2{0, 0}; }, [](double) { return Vec2{0, 0}; }, 0.0, T);
        for (double frac : {0.9, 0.99, 0.999}) {
            const double t = frac * T;
            const double L = std::log(T - t);
            const double lam = lnT * (T - t) / (L * L);
            const complexd b0 = reduced::b0_apply(hist, t, lam);
            const double rel = std::abs(b0 - complexd{-1.0, 0.0});
            const double bound = 3.0 * std::log(std::abs(L)) / std::abs(L);
            worst_margin = std::max(worst_margin, rel / bound);
            if (rel > bound) pass = false;
        }
    }
    report(7, pass, "worst rel-err / bound = " + std::to_string(worst_margin));
}

// --------------------------------------------------------------------------
// 8. parameter feasibility sampling

void criterion_8() {
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int ok = 0;
    for (int i = 0; i < 100; ++i) {
        std::array<double, 8> u;
        for (auto& x : u) x = u01(rng);
        if (reduced::param_feasible(reduced::sample_solution_box(u)).feasible) ++ok;
    }
    int violated = 0;
    for (int i = 0; i < 10; ++i) {
        std::array<double, 8> u;
        for (auto& x : u) x = u01(rng);
        auto g = reduced::sample_solution_box(u);
        switch (i % 5) {
            case 0: g.Theta = 0.3; break;
            case 1: g.beta = 0.6; break;
            case 2: g.nu = g.delta0 + 0.4; break;
            case 3: g.alpha = 0.05; break;
            case 4: g.sigma0 = g.beta; break;
        }
        const auto res = reduced::param_feasible(g);
        if (!res.feasible && !res.violations.empty()) ++violated;
    }
    report(8, ok == 100 && violated == 10,
           "box samples feasible " + std::to_string(ok) + "/100, out-of-box flagged " +
               std::to_string(violated) + "/10");
}

// --------------------------------------------------------------------------
// 9. simulator invariants

void criterion_9() {
    // E(W) = 4 pi on a wide mesh
    evolve::SimConfig wide;
    wide.pp = PhysParams(1.0, 0.0);
    wide.r_outer = 2000.0;
    wide.n_nodes = 8000;
    wide.r_first_factor = 0.01;
    const double ew = evolve::energy(evolve::initial_bubble(wide, 1.0));
    const bool energy_ok = std::abs(ew - 4.0 * M_PI) <= 1e-6 * 4.0 * M_PI;

    // stationary residual order
    auto resid = [](std::size_t n) {
        evolve::SimConfig cfg;
        cfg.pp = PhysParams(1.0, 0.0);
        cfg.r_outer = 6.0;
        cfg.n_nodes = n;
        auto st = evolve::initial_bubble(cfg, 1.0);
        const auto F = evolve::equivariant_rhs(st, cfg.pp);
        double worst = 0.0;
        for (std::size_t i = 4; i + 4 < st.r.size(); ++i)
            if (st.r[i] < 4.0) worst = std::max(worst, norm(F[i]));
        return worst;
    };
    const double order = std::log(resid(300) / resid(600)) / std::log(2.0);

    // constraint drift and per-step energy monotonicity along dissipative runs
    bool drift_ok = true, monotone_ok = true;
    for (auto [a, b] : {std::pair{1.0, 0.0}, std::pair{0.8, 0.6}}) {
        evolve::SimConfig cfg;
        cfg.pp = PhysParams(a, b);
        cfg.r_outer = 4.0;
        cfg.n_nodes = 500;
        cfg.allow_refine = false;
        auto st = evolve::initial_twisted_bubble(cfg, 0.4, 0.15);
        double prev_e = evolve::energy(st);
        const double slack = 1e-8 * prev_e;
        for (int i = 0; i < 1500; ++i) {
            evolve::step(st, cfg);
            if (evolve::constraint_drift(st) > 1e-10) drift_ok = false;
            const double e = evolve::energy(st);
            if (e > prev_e + slack) monotone_ok = false;
            prev_e = e;
        }
    }
    report(9, energy_ok && order >= 1.9 && drift_ok && monotone_ok,
           "E(W) = " + std::to_string(ew) + " (target 4 pi), S(W) order = " + std::to_string(order) +
               ", drift_ok = " + std::to_string(drift_ok) + ", monotone_ok = " +
               std::to_string(monotone_ok));
}

// --------------------------------------------------------------------------
// 10. blow-up signature

void criterion_10() {
    for (auto [a, b] : {std::pair{1.0, 0.0}, std::pair{0.8, 0.6}}) {
        const double t0 = now_seconds();
        evolve::SimConfig cfg;
        cfg.pp = PhysParams(a, b);
        cfg.r_outer = 1.0;
        cfg.n_nodes = 420;
        cfg.r_first_factor = 1.0 / 12.0;
        cfg.cfl = 0.3;
        cfg.t_max = 1.0;
        cfg.diag_stride = 200;
        const double lambda0 = 0.02;
        cfg.lambda_stop = lambda0 / 100.0;
        auto st = evolve::initial_twisted_bubble(cfg, lambda0, 0.3);
        const auto diag = evolve::run_and_fit(cfg, std::move(st));
        const double elapsed = now_seconds() - t0;

        const double decades =
            std::log10(diag.samples.front().lambda_est / diag.samples.back().lambda_est);
        bool fit_ok = false, typeII = false;
        double alpha = 0.0;
        if (diag.fit) {
            alpha = diag.fit->exponent;
            fit_ok = alpha >= 0.8 && alpha <= 1.2;
            // discriminator lambda/sqrt(T_est - t) decreasing over the fit window
            std::vector<double> disc;
            for (const auto& s : diag.samples)
                if (s.lambda_est <= diag.fit->window_hi && s.t < diag.fit->T_est)
                    disc.push_back(s.lambda_est / std::sqrt(diag.fit->T_est - s.t));
            typeII = disc.size() >= 4 && disc.back() < 0.5 * disc.front();
        }
        report(10, diag.blew_up && decades >= 2.0 && fit_ok && typeII && elapsed <= 600.0,
               "(a,b)=(" + std::to_string(a) + "," + std::to_string(b) + ") decades=" +
                   std::to_string(decades) + " alpha=" + std::to_string(alpha) + " typeII=" +
                   std::to_string(typeII) + " " + std::to_string(elapsed) + " s");
    }
}

} // namespace

int main(int argc, char** argv) {
    int only = 0, skip = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
        if (std::strcmp(argv[i], "--skip") == 0 && i + 1 < argc) skip = std::atoi(argv[++i]);
    }
    auto want = [&](int n) { return (only == 0 || only == n) && skip != n; };
    if (want(1)) criterion_1();
    if (want(2)) criterion_2();
    if (want(3)) criterion_3();
    if (want(4)) criterion_4();
    if (want(5)) criterion_5();
    if (want(6)) criterion_6();
    if (want(7)) criterion_7();
    if (want(8)) criterion_8();
    if (want(9)) criterion_9();
    if (want(10)) criterion_10();
    if (g_failures > 0) {
        std::cout << g_failures << " criterion check(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all criteria passed" << std::endl;
    return 0;
}
