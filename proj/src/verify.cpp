#include "llgblow/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "llgblow/geometry.hpp"
#include "llgblow/io.hpp"
#include "llgblow/linops.hpp"
#include "llgblow/nonlocal.hpp"
#include "llgblow/quadrature.hpp"
#include "llgblow/reduced.hpp"
#include "llgblow/spectral.hpp"

namespace llgblow {
namespace verify {

namespace {

struct Ledger {
    std::ostringstream out;
    int failures = 0;

    void check(const std::string& name, double measured, double bound) {
        const bool ok = measured <= bound;
        if (!ok) ++failures;
        out << (ok ? "PASS" : "FAIL") << " " << name << " measured=" << io::format_double(measured)
            << " bound=" << io::format_double(bound) << "\n";
    }
};

} // namespace

Report run_all(unsigned seed) {
    using namespace geometry;
    Ledger led;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> unif01(0.0, 1.0);

    // frame orthonormality and wedge identities
    {
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const Vec2 y{4.0 * unif(rng), 4.0 * unif(rng)};
            const auto f = bubble_frame(y);
            worst = std::max(worst, std::abs(dot(f.W, f.E1)));
            worst = std::max(worst, std::abs(dot(f.W, f.E2)));
            worst = std::max(worst, std::abs(dot(f.E1, f.E2)));
            worst = std::max(worst, std::abs(norm(f.W) - 1.0));
            worst = std::max(worst, norm(cross(f.W, f.E1) - f.E2));
            worst = std::max(worst, norm(cross(f.W, f.E2) + f.E1));
            worst = std::max(worst, norm(cross(f.E1, f.E2) - f.W));
        }
        led.check("geometry.frame_wedge_identities", worst, 1e-12);
    }

    // |grad W|^2 closed form vs finite differences
    {
        double worst = 0.0;
        const double h = 1e-5;
        for (int i = 0; i < 40; ++i) {
            const Vec2 y{3.0 * unif(rng), 3.0 * unif(rng)};
            double fd = 0.0;
            for (int c = 0; c < 2; ++c) {
                Vec2 yp = y, ym = y;
                yp[c] += h;
                ym[c] -= h;
                const Vec3 d = (1.0 / (2.0 * h)) * (bubble_frame(yp).W - bubble_frame(ym).W);
                fd += dot(d, d);
            }
            worst = std::max(worst, std::abs(fd - bubble_frame(y).grad_sq));
        }
        led.check("geometry.grad_sq_fd", worst, 1e-6);
    }

    // rotation equivariance of the wedge
    {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double g = 3.0 * unif(rng);
            const Vec3 f{unif(rng), unif(rng), unif(rng)};
            const Vec3 h{unif(rng), unif(rng), unif(rng)};
            worst = std::max(worst, norm(cross(rotate_z(g, f), rotate_z(g, h)) - rotate_z(g, cross(f, h))));
        }
        led.check("geometry.rotation_wedge_equivariance", worst, 1e-12);
    }

    // complex form round trip and U ^ f identity
    {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Vec2 y{2.0 * unif(rng), 2.0 * unif(rng)};
            const double g = 3.0 * unif(rng);
            const auto fr = bubble_frame(y);
            const complexd f{unif(rng), unif(rng)};
            const Vec3 v = complex_form_inverse(f, fr, g);
            worst = std::max(worst, std::abs(complex_form(v, fr, g) - f));
            const Vec3 U = rotate_z(g, fr.W);
            worst = std::max(worst,
                             norm(cross(U, v) - complex_form_inverse(f * complexd{0.0, 1.0}, fr, g)));
        }
        led.check("geometry.complex_form_roundtrip", worst, 1e-12);
    }

    // assembled ansatz keeps unit norm
    {
        double worst = 0.0;
        const std::vector<BubbleParams> bubbles{{1e-3, 0.3, {0.0, 0.0}}, {2e-3, -0.8, {1.0, 0.0}}};
        for (int i = 0; i < 100; ++i) {
            const Vec2 x{2.0 * unif(rng), 2.0 * unif(rng)};
            const Vec3 phi = 0.05 * Vec3{unif(rng), unif(rng), unif(rng)};
            worst = std::max(worst, std::abs(norm(assemble_u(bubbles, phi, x)) - 1.0));
        }
        led.check("geometry.unit_norm_ansatz", worst, 1e-12);
    }

    // kernel Wronskians = 1/rho
    {
        double worst = 0.0;
        for (int k = -6; k <= 6; ++k) {
            const auto pair = linops::scalar_kernels(k);
            for (int i = 0; i < 40; ++i) {
                const double rho = 0.05 + 5.0 * unif01(rng);
                worst = std::max(worst, std::abs(pair.wronskian(rho) - 1.0 / rho));
            }
        }
        led.check("linops.wronskian", worst, 1e-9);
    }

    // Fourier modes: isometry and round trip
    {
        PolarGrid g;
        g.radial = RadialGrid::make_graded(0.05, 6.0, 48, 3.0);
        g.n_theta = 32;
        PolarComplexField psi;
        psi.grid = g;
        psi.values.resize(g.size());
        for (std::size_t i = 0; i < g.radial.size(); ++i)
            for (std::size_t m = 0; m < g.n_theta; ++m) {
                const double rho = g.radial.rho(i), th = g.theta(m);
                psi.values[g.index(i, m)] = std::polar(1.0, th) * (rho / (1.0 + rho * rho)) +
                                            std::polar(0.4, -2.0 * th) / (1.0 + rho);
            }
        const auto dec = linops::fourier_modes(psi, 4);
        const auto back = linops::fourier_reconstruct(dec, g);
        double worst = 0.0;
        double e_modes = 0.0, e_field = 0.0;
        for (std::size_t i = 0; i < psi.values.size(); ++i) {
            worst = std::max(worst, std::abs(back.values[i] - psi.values[i]));
            e_field += std::norm(psi.values[i]);
        }
        for (const auto& [k, mode] : dec.modes)
            for (const auto& v : mode.values) e_modes += std::norm(v) * static_cast<double>(g.n_theta);
        led.check("linops.fourier_roundtrip", worst, 1e-12);
        led.check("linops.parseval", std::abs(e_modes - e_field) / e_field, 1e-12);
    }

    const PhysParams pp(0.8, 0.6);

    // K0 expansion endpoints
    {
        const complexd small = nonlocal::kernel_K0(1e-9, pp, 0);
        led.check("nonlocal.K0_small_zeta", std::abs(small - complexd{pp.a / 2.0, pp.b / 2.0}), 1e-8);
        const complexd large = nonlocal::kernel_K0(1e6, PhysParams(1.0, 0.0), 0);
        led.check("nonlocal.K0_large_zeta", std::abs(large - 2e-6), 1e-12);
    }

    // q0 tail and continuity at the xi = 1 crossover
    {
        const PhysParams hm(1.0, 0.0);
        const complexd q100 = nonlocal::profile_q0(100.0, hm);
        led.check("nonlocal.q0_tail", std::abs(q100 * 100.0 - 1.0), 1e-3);
        const complexd lo = nonlocal::profile_q0(1.0 - 1e-12, pp);
        const complexd hi = nonlocal::profile_q0(1.0 + 1e-12, pp);
        led.check("nonlocal.q0_continuity", std::abs(hi - lo), 1e-10);
    }

    // B0 linearity
    {
        const double T = 1e-3;
        auto h1 = nonlocal::ParamHistory::rate_ansatz(T);
        auto h2 = nonlocal::ParamHistory::analytic(
            [](double t) { return complexd{1e-3 + t, 0.0}; }, [](double) { return complexd{1.0, 0.0}; },
            [](double) { return Vec2{0.0, 0.0}; }, [](double) { return Vec2{0.0, 0.0}; }, 0.0, T);
        auto hsum = nonlocal::ParamHistory::analytic(
            [&](double t) { return 2.0 * h1.p(t) + 3.0 * h2.p(t); },
            [&](double t) { return 2.0 * h1.pdot(t) + 3.0 * h2.pdot(t); },
            [](double) { return Vec2{0.0, 0.0}; }, [](double) { return Vec2{0.0, 0.0}; }, 0.0, T);
        const double t = 0.9 * T, lam = 0.05 * std::sqrt(t);
        const complexd lhs = reduced::b0_apply(hsum, t, lam);
        const complexd rhs = 2.0 * reduced::b0_apply(h1, t, lam) + 3.0 * reduced::b0_apply(h2, t, lam);
        led.check("reduced.b0_linearity", std::abs(lhs - rhs) / std::abs(rhs), 1e-8);
    }

    // moment table
    {
        double worst = 0.0;
        for (const auto& row : reduced::moment_table())
            worst = std::max(worst, std::abs(row.computed - row.expected));
        led.check("reduced.moment_table", worst, 1e-8);
    }

    // solution box sampling + deliberate violation
    {
        int bad = 0;
        for (int i = 0; i < 20; ++i) {
            std::array<double, 8> u;
            for (auto& x : u) x = unif01(rng);
            if (!reduced::param_feasible(reduced::sample_solution_box(u)).feasible) ++bad;
        }
        led.check("reduced.box_sampling", static_cast<double>(bad), 0.0);
        reduced::GluingParams g = reduced::sample_solution_box({0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
        g.Theta = 0.5;
        led.check("reduced.box_violation_detected",
                  reduced::param_feasible(g).feasible ? 1.0 : 0.0, 0.0);
    }

    // heat kernel mass in d = 2
    {
        const complexd mass =
            2.0 * M_PI *
            integrate_to_infinity(
                [&](double r) {
                    return spectral::heat_kernel_gamma(2, {r, 0.0}, 0.7, PhysParams(0.6, 0.8)) * r;
                },
                0.0, 1e-12, 1e-10)
                .value;
        led.check("spectral.heat_kernel_mass", std::abs(mass - 1.0), 1e-6);
    }

    // p0 profile endpoints
    {
        const double T = 1e-4;
        led.check("reduced.p0_at_T", std::abs(reduced::p0_value(T, 1.0, T * (1.0 - 1e-12))), 1e-12);
        const double ratio = reduced::p0_value(1e-6, 1.0, 0.0) / (1e-6 / std::abs(std::log(1e-6)));
        led.check("reduced.p0_small_T_ratio", std::abs(ratio - 1.0), 0.2);
    }

    Report rep;
    rep.text = led.out.str();
    rep.failures = led.failures;
    return rep;
}

} // namespace verify
} // namespace llgblow
