#include "llgblow/linops.hpp"

#include <cmath>

#include "llgblow/geometry.hpp"

namespace llgblow {
namespace linops {

using geometry::bubble_frame;
using geometry::profile_w;

namespace {

// Fornberg weights for the m-th derivative at z from nodes x[0..n-1].
void fd_weights(double z, const double* x, int n, int m, double* w) {
    std::vector<double> c(static_cast<std::size_t>(n) * (m + 1), 0.0);
    auto C = [&](int i, int j) -> double& { return c[static_cast<std::size_t>(i) * (m + 1) + j]; };
    double c1 = 1.0;
    double c4 = x[0] - z;
    C(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    for (int i = 0; i < n; ++i) w[i] = C(i, m);
}

} // namespace

Vec3 vector_kernel(int p, int q, const Vec2& y) {
    if (p < -1 || p > 1 || q < 1 || q > 2) throw domain_error("vector_kernel: p in {-1,0,1}, q in {1,2}");
    const auto f = bubble_frame(y);
    const double rho = std::hypot(y[0], y[1]);
    const double theta = (rho == 0.0) ? 0.0 : std::atan2(y[1], y[0]);
    const double ct = std::cos(theta), st = std::sin(theta);
    if (p == 0) {
        const Vec3& e = (q == 1) ? f.E1 : f.E2;
        return (rho * f.w_rho) * e;
    }
    if (p == 1) {
        if (q == 1) return f.w_rho * (ct * f.E1) + f.w_rho * (st * f.E2);
        return f.w_rho * (st * f.E1) + (-f.w_rho * ct) * f.E2;
    }
    // p == -1
    const double s = rho * rho * f.w_rho;
    if (q == 1) return s * (ct * f.E1) + (-s * st) * f.E2;
    return s * (st * f.E1) + (s * ct) * f.E2;
}

double ModeKernelPair::z1(double rho) const {
    const double d = rho * rho + 1.0;
    switch (k) {
        case -1: return rho * rho / d;
        case 0: return rho / d;
        case 1: return 1.0 / d;
        default: return std::pow(rho, 1 - k) / d;
    }
}

double ModeKernelPair::z1_prime(double rho) const {
    const double d = rho * rho + 1.0;
    switch (k) {
        case -1: return 2.0 * rho / (d * d);
        case 0: return (1.0 - rho * rho) / (d * d);
        case 1: return -2.0 * rho / (d * d);
        default:
            return std::pow(rho, -k) * ((1.0 - k) - (1.0 + k) * rho * rho) / (d * d);
    }
}

double ModeKernelPair::z2(double rho) const {
    const double r2 = rho * rho;
    const double d = r2 + 1.0;
    switch (k) {
        case -1: return (4.0 * r2 * (r2 * std::log(rho) - 1.0) - 1.0) / (4.0 * r2 * d);
        case 0: return (r2 * r2 + 4.0 * r2 * std::log(rho) - 1.0) / (2.0 * rho * d);
        case 1: return (r2 * r2 + 4.0 * r2 + 4.0 * std::log(rho)) / (4.0 * d);
        default: {
            const double kk = static_cast<double>(k);
            const double g = r2 * r2 / (2.0 * kk + 2.0) + r2 / kk + 1.0 / (2.0 * kk - 2.0);
            return std::pow(rho, k - 1) * g / d;
        }
    }
}

double ModeKernelPair::z2_prime(double rho) const {
    const double r2 = rho * rho;
    const double d = r2 + 1.0;
    switch (k) {
        case -1: {
            const double N = 4.0 * r2 * r2 * std::log(rho) - 4.0 * r2 - 1.0;
            const double Np = 16.0 * r2 * rho * std::log(rho) + 4.0 * r2 * rho - 8.0 * rho;
            const double D = 4.0 * r2 * d;
            const double Dp = 16.0 * r2 * rho + 8.0 * rho;
            return (Np * D - N * Dp) / (D * D);
        }
        case 0: {
            const double N = r2 * r2 + 4.0 * r2 * std::log(rho) - 1.0;
            const double Np = 4.0 * r2 * rho + 8.0 * rho * std::log(rho) + 4.0 * rho;
            const double D = 2.0 * rho * d;
            const double Dp = 6.0 * r2 + 2.0;
            return (Np * D - N * Dp) / (D * D);
        }
        case 1: {
            const double N = r2 * r2 + 4.0 * r2 + 4.0 * std::log(rho);
            const double Np = 4.0 * r2 * rho + 8.0 * rho + 4.0 / rho;
            const double D = 4.0 * d;
            const double Dp = 8.0 * rho;
            return (Np * D - N * Dp) / (D * D);
        }
        default: {
            const double kk = static_cast<double>(k);
            const double g = r2 * r2 / (2.0 * kk + 2.0) + r2 / kk + 1.0 / (2.0 * kk - 2.0);
            const double gp = 2.0 * r2 * rho / (kk + 1.0) + 2.0 * rho / kk;
            return ((kk - 1.0) * std::pow(rho, k - 2) * g + std::pow(rho, k - 1) * gp) / d -
                   2.0 * rho * std::pow(rho, k - 1) * g / (d * d);
        }
    }
}

ModeKernelPair scalar_kernels(int k) { return ModeKernelPair{k}; }

double potential_V(int k, double rho) {
    if (k == 1) {
        // the (k-1)^2/rho^2 piece vanishes; regular everywhere
        const double d = rho * rho + 1.0;
        return -4.0 * (rho * rho - 1.0) / (d * d);
    }
    if (!(rho > 0.0)) throw domain_error("potential_V: pole at rho = 0 for k != 1");
    const double kk = static_cast<double>(k);
    const double r2 = rho * rho;
    const double d = r2 + 1.0;
    return -((kk + 1.0) * (kk + 1.0) * r2 * r2 + (2.0 * kk * kk - 6.0) * r2 + (kk - 1.0) * (kk - 1.0)) /
           (d * d * r2);
}

RadialComplexField apply_mode(int k, const RadialComplexField& f) {
    f.validate();
    const auto& r = f.grid.nodes;
    const std::size_t n = r.size();
    RadialComplexField out;
    out.grid = f.grid;
    out.values.assign(n, complexd{0.0, 0.0});
    double w1[4], w2[4];
    for (std::size_t i = 0; i < n; ++i) {
        complexd d1, d2;
        if (i == 0 || i == n - 1) {
            const std::size_t base = (i == 0) ? 0 : n - 4;
            fd_weights(r[i], r.data() + base, 4, 1, w1);
            fd_weights(r[i], r.data() + base, 4, 2, w2);
            d1 = d2 = {0.0, 0.0};
            for (int j = 0; j < 4; ++j) {
                d1 += w1[j] * f.values[base + j];
                d2 += w2[j] * f.values[base + j];
            }
        } else {
            const Stencil3 s = nonuniform_stencil(r[i] - r[i - 1], r[i + 1] - r[i]);
            d1 = s.wm1 * f.values[i - 1] + s.w0 * f.values[i] + s.wp1 * f.values[i + 1];
            d2 = s.vm1 * f.values[i - 1] + s.v0 * f.values[i] + s.vp1 * f.values[i + 1];
        }
        out.values[i] = d2 + d1 / r[i] + potential_V(k, r[i]) * f.values[i];
    }
    return out;
}

namespace {

// radial/angular first and second derivatives of an arbitrary nodal quantity
template <typename T>
struct PolarDerivs {
    std::vector<T> d_rho, d_rhorho, d_theta, d_thetatheta;
};

template <typename T>
PolarDerivs<T> polar_derivatives(const PolarGrid& g, const std::vector<T>& v, const T& zero) {
    const auto& r = g.radial.nodes;
    const std::size_t nr = r.size(), nt = g.n_theta;
    const double dth = 2.0 * M_PI / static_cast<double>(nt);
    PolarDerivs<T> out;
    out.d_rho.assign(v.size(), zero);
    out.d_rhorho.assign(v.size(), zero);
    out.d_theta.assign(v.size(), zero);
    out.d_thetatheta.assign(v.size(), zero);
    double w1[4], w2[4];
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t m = 0; m < nt; ++m) {
            const std::size_t id = g.index(i, m);
            // theta: periodic centered
            const std::size_t mp = (m + 1) % nt, mm = (m + nt - 1) % nt;
            out.d_theta[id] = (1.0 / (2.0 * dth)) * (v[g.index(i, mp)] - v[g.index(i, mm)]);
            out.d_thetatheta[id] =
                (1.0 / (dth * dth)) * (v[g.index(i, mp)] - 2.0 * v[id] + v[g.index(i, mm)]);
            // rho: centered interior, 4-point one-sided at the ends
            if (i == 0 || i == nr - 1) {
                const std::size_t base = (i == 0) ? 0 : nr - 4;
                fd_weights(r[i], r.data() + base, 4, 1, w1);
                fd_weights(r[i], r.data() + base, 4, 2, w2);
                T a = zero, b = zero;
                for (int j = 0; j < 4; ++j) {
                    a += w1[j] * v[g.index(base + j, m)];
                    b += w2[j] * v[g.index(base + j, m)];
                }
                out.d_rho[id] = a;
                out.d_rhorho[id] = b;
            } else {
                const Stencil3 s = nonuniform_stencil(r[i] - r[i - 1], r[i + 1] - r[i]);
                out.d_rho[id] = s.wm1 * v[g.index(i - 1, m)] + s.w0 * v[id] + s.wp1 * v[g.index(i + 1, m)];
                out.d_rhorho[id] = s.vm1 * v[g.index(i - 1, m)] + s.v0 * v[id] + s.vp1 * v[g.index(i + 1, m)];
            }
        }
    }
    return out;
}

std::vector<Vec3> apply_inner_impl(const TangentField& phi, bool subtract_normal_gradient) {
    const PolarGrid& g = phi.grid;
    if (g.radial.size() < 4) throw domain_error("apply_LW: grid too coarse (< 4 radial nodes)");
    if (g.n_theta < 4) throw domain_error("apply_LW: need at least 4 angular nodes");
    const auto dv = polar_derivatives<Vec3>(g, phi.values, Vec3{0, 0, 0});
    std::vector<double> wdotphi;
    PolarDerivs<double> ds;
    if (subtract_normal_gradient) {
        wdotphi.resize(phi.values.size());
        for (std::size_t i = 0; i < g.radial.size(); ++i)
            for (std::size_t m = 0; m < g.n_theta; ++m) {
                const auto f = bubble_frame({g.radial.rho(i) * std::cos(g.theta(m)),
                                             g.radial.rho(i) * std::sin(g.theta(m))});
                wdotphi[g.index(i, m)] = dot(f.W, phi.values[g.index(i, m)]);
            }
        ds = polar_derivatives<double>(g, wdotphi, 0.0);
    }
    std::vector<Vec3> out(phi.values.size());
    for (std::size_t i = 0; i < g.radial.size(); ++i) {
        const double rho = g.radial.rho(i);
        for (std::size_t m = 0; m < g.n_theta; ++m) {
            const std::size_t id = g.index(i, m);
            const double th = g.theta(m);
            const auto f = bubble_frame({rho * std::cos(th), rho * std::sin(th)});
            const Vec3 lap = dv.d_rhorho[id] + (1.0 / rho) * dv.d_rho[id] +
                             (1.0 / (rho * rho)) * dv.d_thetatheta[id];
            // grad W . grad phi with dW/drho = w_rho E1, dW/dtheta = sin(w) E2
            const double gwgp = f.w_rho * dot(f.E1, dv.d_rho[id]) +
                                (std::sin(f.w) / (rho * rho)) * dot(f.E2, dv.d_theta[id]);
            Vec3 r = lap + f.grad_sq * phi.values[id] + (2.0 * gwgp) * f.W;
            if (subtract_normal_gradient) {
                // -2 grad(W.phi) grad W, component c: grad(W.phi) . grad W_c
                const Vec3 dW_rho = f.w_rho * f.E1;
                const Vec3 dW_theta = std::sin(f.w) * f.E2;
                r += (-2.0 * ds.d_rho[id]) * dW_rho +
                     (-2.0 * ds.d_theta[id] / (rho * rho)) * dW_theta;
            }
            out[id] = r;
        }
    }
    return out;
}

} // namespace

std::vector<Vec3> apply_LW(const TangentField& phi, double tangency_tol) {
    for (std::size_t i = 0; i < phi.grid.radial.size(); ++i)
        for (std::size_t m = 0; m < phi.grid.n_theta; ++m) {
            const double rho = phi.grid.radial.rho(i), th = phi.grid.theta(m);
            const auto f = bubble_frame({rho * std::cos(th), rho * std::sin(th)});
            const Vec3& v = phi.values[phi.grid.index(i, m)];
            if (std::abs(dot(f.W, v)) > tangency_tol * std::max(norm(v), 1e-300))
                throw domain_error("apply_LW: field is not tangent to W");
        }
    return apply_inner_impl(phi, false);
}

std::vector<Vec3> apply_Lin_vector(const TangentField& phi) { return apply_inner_impl(phi, true); }

PolarComplexField apply_Lin_complex(const PolarComplexField& psi) {
    const PolarGrid& g = psi.grid;
    if (g.radial.size() < 4) throw domain_error("apply_Lin_complex: grid too coarse");
    const auto dv = polar_derivatives<complexd>(g, psi.values, complexd{0.0, 0.0});
    PolarComplexField out;
    out.grid = g;
    out.values.resize(psi.values.size());
    const complexd iu{0.0, 1.0};
    for (std::size_t i = 0; i < g.radial.size(); ++i) {
        const double rho = g.radial.rho(i);
        const auto p = profile_w(rho);
        const double r2 = rho * rho;
        for (std::size_t m = 0; m < g.n_theta; ++m) {
            const std::size_t id = g.index(i, m);
            out.values[id] = dv.d_rhorho[id] + dv.d_rho[id] / rho + dv.d_thetatheta[id] / r2 -
                             psi.values[id] / r2 + iu * (2.0 * p.cos_w / r2) * dv.d_theta[id] +
                             (8.0 / ((r2 + 1.0) * (r2 + 1.0))) * psi.values[id];
        }
    }
    return out;
}

ModeDecomposition fourier_modes(const PolarComplexField& psi, int k_max, double alias_tol) {
    const PolarGrid& g = psi.grid;
    if (g.n_theta < 4 * static_cast<std::size_t>(std::max(k_max, 1)))
        throw domain_error("fourier_modes: theta grid needs at least 4*k_max nodes");
    ModeDecomposition dec;
    const std::size_t nr = g.radial.size(), nt = g.n_theta;
    double total_energy = 0.0, edge_energy = 0.0;
    for (int k = -k_max; k <= k_max; ++k) {
        RadialComplexField mode;
        mode.grid = g.radial;
        mode.values.assign(nr, complexd{0.0, 0.0});
        for (std::size_t i = 0; i < nr; ++i) {
            complexd acc{0.0, 0.0};
            for (std::size_t m = 0; m < nt; ++m) {
                const double th = g.theta(m);
                acc += psi.values[g.index(i, m)] * std::polar(1.0, -k * th);
            }
            mode.values[i] = acc / static_cast<double>(nt);
            const double e = std::norm(mode.values[i]);
            total_energy += e;
            if (std::abs(k) == k_max) edge_energy += e;
        }
        dec.modes.emplace(k, std::move(mode));
    }
    dec.alias_warning = (total_energy > 0.0) && (edge_energy > alias_tol * total_energy);
    return dec;
}

PolarComplexField fourier_reconstruct(const ModeDecomposition& dec, const PolarGrid& grid) {
    PolarComplexField out;
    out.grid = grid;
    out.values.assign(grid.size(), complexd{0.0, 0.0});
    for (const auto& [k, mode] : dec.modes) {
        if (mode.values.size() != grid.radial.size())
            throw domain_error("fourier_reconstruct: mode grid mismatch");
        for (std::size_t i = 0; i < grid.radial.size(); ++i)
            for (std::size_t m = 0; m < grid.n_theta; ++m)
                out.values[grid.index(i, m)] += mode.values[i] * std::polar(1.0, k * grid.theta(m));
    }
    return out;
}

} // namespace linops
} // namespace llgblow
