#include "llgblow/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "llgblow/linops.hpp"
#include "llgblow/quadrature.hpp"

namespace llgblow {
namespace spectral {

namespace {

// ---------------------------------------------------------------------------
// banded LU with partial pivoting; band (kl, ku) with kl extra fill rows

template <typename Real>
class BandedLU {
public:
    BandedLU(std::size_t n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), width_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(width_) * n, 0.0),
          piv_(n, 0) {}

    Real& at(int i, int j) { return ab_[static_cast<std::size_t>(kl_ + ku_ + i - j) + width_ * j]; }
    Real get(int i, int j) const { return ab_[static_cast<std::size_t>(kl_ + ku_ + i - j) + width_ * j]; }

    void factor() {
        const int n = static_cast<int>(n_);
        for (int j = 0; j < n; ++j) {
            int ip = j;
            double best = std::abs(get(j, j));
            for (int i = j + 1; i <= std::min(j + kl_, n - 1); ++i)
                if (std::abs(get(i, j)) > best) {
                    best = std::abs(get(i, j));
                    ip = i;
                }
            piv_[j] = ip;
            if (best == 0.0) throw convergence_error("BandedLU: singular pivot");
            if (ip != j)
                for (int c = j; c <= std::min(j + kl_ + ku_, n - 1); ++c) std::swap(at(j, c), at(ip, c));
            for (int i = j + 1; i <= std::min(j + kl_, n - 1); ++i) {
                const Real l = at(i, j) / get(j, j);
                at(i, j) = l;
                for (int c = j + 1; c <= std::min(j + kl_ + ku_, n - 1); ++c) at(i, c) -= l * get(j, c);
            }
        }
    }

    void solve(std::vector<Real>& b) const {
        const int n = static_cast<int>(n_);
        for (int j = 0; j < n; ++j) {
            if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
            for (int i = j + 1; i <= std::min(j + kl_, n - 1); ++i) b[i] -= get(i, j) * b[j];
        }
        for (int i = n - 1; i >= 0; --i) {
            Real s = b[i];
            for (int c = i + 1; c <= std::min(i + kl_ + ku_, n - 1); ++c) s -= get(i, c) * b[c];
            b[i] = s / get(i, i);
        }
    }

private:
    std::size_t n_;
    int kl_, ku_, width_;
    std::vector<Real> ab_;
    std::vector<int> piv_;
};

// symmetric pentadiagonal matrix assembled from P2 elements
template <typename Real>
struct Penta {
    std::size_t n = 0;
    std::vector<Real> d0, d1, d2;

    explicit Penta(std::size_t n_ = 0)
        : n(n_), d0(n_, 0.0), d1(n_ ? n_ - 1 : 0, 0.0), d2(n_ > 1 ? n_ - 2 : 0, 0.0) {}

    void add(std::size_t i, std::size_t j, Real v) {
        if (i == j) {
            d0[i] += v;
            return;
        }
        const std::size_t lo = std::min(i, j);
        if ((i > j ? i - j : j - i) == 1)
            d1[lo] += v;
        else
            d2[lo] += v;
    }

    std::vector<Real> mul(const std::vector<Real>& x) const {
        std::vector<Real> y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            Real s = d0[i] * x[i];
            if (i >= 1) s += d1[i - 1] * x[i - 1];
            if (i + 1 < n) s += d1[i] * x[i + 1];
            if (i >= 2) s += d2[i - 2] * x[i - 2];
            if (i + 2 < n) s += d2[i] * x[i + 2];
            y[i] = s;
        }
        return y;
    }
};

template <typename Real>
Real dot_v(const std::vector<Real>& a, const std::vector<Real>& b) {
    Real s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

constexpr double kGx[6] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                           0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
constexpr double kGw[6] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                           0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

template <typename Real>
struct Assembled {
    Penta<Real> K{0}, M{0};
    std::vector<double> unknown_nodes; // coordinates of the unknowns
    std::vector<double> all_nodes;     // all FE nodes including constrained ones
};

// quadratic finite elements on graded element boundaries [0, R];
// Dirichlet at R always, Dirichlet at 0 unless k == 1 (H^1_0 vs X_0 space)
template <typename Real>
Assembled<Real> assemble(const SpectralProblem& prob) {
    const int k = prob.k;
    const std::size_t nel = prob.n;
    std::vector<double> bnd(nel + 1);
    bnd[0] = 0.0;
    const double rho_min = prob.R * prob.rho_min_factor;
    const double denom = std::expm1(prob.grading);
    for (std::size_t i = 1; i <= nel; ++i) {
        const double s = static_cast<double>(i - 1) / static_cast<double>(nel - 1);
        bnd[i] = rho_min + (prob.R - rho_min) * std::expm1(prob.grading * s) / denom;
    }
    const std::size_t n_nodes = 2 * nel + 1;
    std::vector<double> nodes(n_nodes);
    for (std::size_t e = 0; e < nel; ++e) {
        nodes[2 * e] = bnd[e];
        nodes[2 * e + 1] = 0.5 * (bnd[e] + bnd[e + 1]);
    }
    nodes[2 * nel] = bnd[nel];

    const std::size_t lo = (k == 1) ? 0 : 1; // first unknown node
    const std::size_t m = n_nodes - 1 - lo;  // exclude node at R
    std::vector<std::ptrdiff_t> gi(n_nodes, -1);
    std::vector<double> unknown_nodes;
    unknown_nodes.reserve(m);
    for (std::size_t g = lo; g < n_nodes - 1; ++g) {
        gi[g] = static_cast<std::ptrdiff_t>(g - lo);
        unknown_nodes.push_back(nodes[g]);
    }

    Assembled<Real> out;
    out.K = Penta<Real>(m);
    out.M = Penta<Real>(m);
    out.unknown_nodes = std::move(unknown_nodes);
    out.all_nodes = nodes;

    const Real kk = static_cast<Real>(k);
    for (std::size_t e = 0; e < nel; ++e) {
        const Real ra = bnd[e], rb = bnd[e + 1], h = rb - ra;
        const std::size_t gl[3] = {2 * e, 2 * e + 1, 2 * e + 2};
        Real ke[3][3] = {{0}}, me[3][3] = {{0}};
        for (int q = 0; q < 6; ++q) {
            const Real t = Real(0.5) * (Real(kGx[q]) + Real(1)); // in [0,1]
            const Real x = ra + t * h;
            const Real w = Real(0.5) * Real(kGw[q]) * h;
            const Real N[3] = {(1 - t) * (1 - 2 * t), 4 * t * (1 - t), t * (2 * t - 1)};
            const Real dN[3] = {(4 * t - 3) / h, (4 - 8 * t) / h, (4 * t - 1) / h};
            // -V_k evaluated in Real arithmetic
            const Real x2 = x * x;
            const Real den = (x2 + 1) * (x2 + 1);
            const Real vq = ((kk + 1) * (kk + 1) * x2 * x2 + (2 * kk * kk - 6) * x2 +
                             (kk - 1) * (kk - 1)) /
                            (den * std::max(x2, Real(1e-300)));
            for (int A = 0; A < 3; ++A)
                for (int B = 0; B < 3; ++B) {
                    ke[A][B] += w * (dN[A] * dN[B] + vq * N[A] * N[B]) * x;
                    me[A][B] += w * N[A] * N[B] * x;
                }
        }
        for (int A = 0; A < 3; ++A)
            for (int B = A; B < 3; ++B) { // symmetric storage: each unordered pair once
                const std::ptrdiff_t ia = gi[gl[A]], ib = gi[gl[B]];
                if (ia >= 0 && ib >= 0) {
                    out.K.add(static_cast<std::size_t>(ia), static_cast<std::size_t>(ib),
                              Real(2.0 * M_PI) * ke[A][B]);
                    out.M.add(static_cast<std::size_t>(ia), static_cast<std::size_t>(ib),
                              Real(2.0 * M_PI) * me[A][B]);
                }
            }
    }
    return out;
}

template <typename Real>
BandedLU<Real> shifted_factor(const Penta<Real>& K, const Penta<Real>& M, Real sigma) {
    BandedLU<Real> lu(K.n, 2, 2);
    for (std::size_t i = 0; i < K.n; ++i) {
        lu.at(static_cast<int>(i), static_cast<int>(i)) = K.d0[i] - sigma * M.d0[i];
        if (i + 1 < K.n) {
            lu.at(static_cast<int>(i), static_cast<int>(i + 1)) = K.d1[i] - sigma * M.d1[i];
            lu.at(static_cast<int>(i + 1), static_cast<int>(i)) = K.d1[i] - sigma * M.d1[i];
        }
        if (i + 2 < K.n) {
            lu.at(static_cast<int>(i), static_cast<int>(i + 2)) = K.d2[i] - sigma * M.d2[i];
            lu.at(static_cast<int>(i + 2), static_cast<int>(i)) = K.d2[i] - sigma * M.d2[i];
        }
    }
    lu.factor();
    return lu;
}

} // namespace

void SpectralProblem::validate() const {
    if (!(R >= 10.0)) throw domain_error("SpectralProblem: R must be >= 10");
    if (n < 200) throw domain_error("SpectralProblem: need at least 200 elements");
}

EigenEstimate principal_eigenvalue(const SpectralProblem& prob) {
    prob.validate();
    // extended precision throughout: the interesting eigenvalues sit up to 13
    // orders below ||K|| (lambda_{R,1} ~ R^-4), beyond the double rounding floor
    using Real = long double;
    Assembled<Real> sys = assemble<Real>(prob);
    const std::size_t m = sys.K.n;

    std::vector<Real> x(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double r = sys.unknown_nodes[i];
        x[i] = r / (1.0 + r * r) * (1.0 - r / prob.R);
    }

    Real lambda = 0.0;
    EigenEstimate out;
    // plain inverse iteration at shift 0; the eigenvalue is read off the inverse
    // operator through M-inner products, which stays accurate when lambda_min is
    // many orders below ||K|| (the forward Rayleigh quotient drowns in rounding there)
    BandedLU<Real> lu = shifted_factor<Real>(sys.K, sys.M, Real(0));
    const int max_iter = 400;
    int it = 0;
    Real lambda_prev = -1.0;
    bool settled = false;
    for (; it < max_iter; ++it) {
        std::vector<Real> z = sys.M.mul(x);
        lu.solve(z);
        const std::vector<Real> Mz = sys.M.mul(z);
        lambda = dot_v(x, Mz) / dot_v(z, Mz);
        const Real nrm = std::sqrt(std::max(dot_v(z, Mz), Real(1e-300)));
        for (std::size_t i = 0; i < m; ++i) x[i] = z[i] / nrm;
        if (it >= 2 && std::abs(lambda - lambda_prev) <= Real(1e-12) * std::abs(lambda)) {
            settled = true;
            ++it;
            break;
        }
        lambda_prev = lambda;
    }
    const std::vector<Real> Kx = sys.K.mul(x);
    const std::vector<Real> Mx = sys.M.mul(x);
    Real rn = 0.0, xn = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const Real di = Kx[i] - lambda * Mx[i];
        rn += di * di;
        xn += x[i] * x[i];
    }
    const double resid = static_cast<double>(std::sqrt(rn) / std::sqrt(xn));
    if (!settled || resid > 1e-6)
        throw convergence_error("principal_eigenvalue: inverse iteration did not converge");
    double lambda_d = static_cast<double>(lambda);
    if (lambda_d < -1e-12)
        throw convergence_error("principal_eigenvalue: negative eigenvalue beyond rounding");
    if (lambda_d < 0.0) lambda_d = 0.0;
    out.lambda_min = lambda_d;
    out.eigvec.resize(m);
    const Real xn_sqrt = std::sqrt(xn);
    for (std::size_t i = 0; i < m; ++i) out.eigvec[i] = static_cast<double>(x[i] / xn_sqrt);
    out.eig_nodes = sys.unknown_nodes;
    out.nodes = sys.all_nodes;
    out.residual = resid;
    out.iterations = it;
    return out;
}

namespace {

// C^2 cutoff: 1 on s <= 1, 0 on s >= 2, quintic smoothstep in between
double cutoff(double s) {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double t = s - 1.0;
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double cutoff_prime(double s) {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    const double t = s - 1.0;
    return -(30.0 * t * t - 60.0 * t * t * t + 30.0 * t * t * t * t);
}

} // namespace

RayleighSample rayleigh_test_function(int k, double R) {
    if (k != 0 && k != 1) throw domain_error("rayleigh_test_function: k must be 0 or 1");
    const auto pair = linops::scalar_kernels(k);
    auto f = [&](double rho) { return cutoff(2.0 * rho / R) * pair.z1(rho); };
    auto fp = [&](double rho) {
        return cutoff_prime(2.0 * rho / R) * (2.0 / R) * pair.z1(rho) +
               cutoff(2.0 * rho / R) * pair.z1_prime(rho);
    };
    RayleighSample out;
    out.q_value = 2.0 * M_PI *
                  integrate_real(
                      [&](double rho) {
                          const double v = f(rho), d = fp(rho);
                          return (d * d - linops::potential_V(k, std::max(rho, 1e-300)) * v * v) * rho;
                      },
                      1e-12, R, 1e-13, 1e-11);
    out.mass = 2.0 * M_PI *
               integrate_real([&](double rho) { return f(rho) * f(rho) * rho; }, 0.0, R, 1e-13, 1e-11);
    return out;
}

SobolevCheck sobolev_diagnostic(const EigenEstimate& e) {
    SobolevCheck out;
    const auto& r = e.eig_nodes;
    const auto& f = e.eigvec;
    for (std::size_t i = 0; i < f.size(); ++i) out.sup_f = std::max(out.sup_f, std::abs(f[i]));
    double over_rho = 0.0, grad = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        const double h = r[i + 1] - r[i];
        const double fmid = 0.5 * (f[i] + f[i + 1]);
        const double rmid = 0.5 * (r[i] + r[i + 1]);
        const double d = (f[i + 1] - f[i]) / h;
        over_rho += fmid * fmid / (rmid * rmid) * rmid * h;
        grad += d * d * rmid * h;
    }
    out.l2_f_over_rho = std::sqrt(2.0 * M_PI * over_rho);
    out.l2_fprime = std::sqrt(2.0 * M_PI * grad);
    out.x_norm = std::sqrt(out.l2_f_over_rho * out.l2_f_over_rho + out.l2_fprime * out.l2_fprime);
    return out;
}

complexd heat_kernel_gamma(int d, const std::vector<double>& x, double t, const PhysParams& pp) {
    if (d < 1) throw domain_error("heat_kernel_gamma: d must be >= 1");
    if (!(t > 0.0)) throw domain_error("heat_kernel_gamma: t must be positive");
    double x2 = 0.0;
    for (double xi : x) x2 += xi * xi;
    // a - ib lies on the unit circle; principal branch power
    const double theta = std::atan2(-pp.b, pp.a);
    const complexd pref = std::polar(1.0, -theta * d / 2.0) * std::pow(4.0 * M_PI * t, -0.5 * d);
    // 1/(a - ib) = a + ib
    const complexd expo = -x2 / (4.0 * t) * complexd{pp.a, pp.b};
    return pref * std::exp(expo);
}

std::vector<complexd> duhamel_mode_solve(int k, const std::function<complexd(double, double)>& h,
                                         double tau0, double tau1, const PhysParams& pp,
                                         const DuhamelOptions& opt) {
    if (k < 0) throw domain_error("duhamel_mode_solve: k must be >= 0");
    if (!(tau1 > tau0)) throw domain_error("duhamel_mode_solve: need tau1 > tau0");
    if (opt.cfl > 0.3) throw domain_error("duhamel_mode_solve: dt/drho^2 stability bound violated");
    const std::size_t n = opt.n;
    const double dr = opt.R / static_cast<double>(n - 1);
    const complexd cm = pp.c_minus();

    // parity of the evolved quantity about rho = 0
    const double parity = opt.lifted ? 1.0 : ((k % 2 == 0) ? 1.0 : -1.0);
    const double eps_r = 1e-6 * opt.R;

    auto source = [&](std::size_t i, double tau) -> complexd {
        const double r = dr * static_cast<double>(i);
        if (!opt.lifted) return h(r, tau);
        const double rr = (i == 0) ? eps_r : r;
        return h(rr, tau) / std::pow(rr, k);
    };

    std::vector<complexd> u(n, complexd{0.0, 0.0});
    auto rhs = [&](const std::vector<complexd>& v, double tau, std::vector<complexd>& out) {
        auto val = [&](std::ptrdiff_t i) -> complexd {
            if (i >= 0) return v[static_cast<std::size_t>(i)];
            return parity * v[static_cast<std::size_t>(-i)];
        };
        const double inv12h2 = 1.0 / (12.0 * dr * dr);
        const double inv12h = 1.0 / (12.0 * dr);
        for (std::size_t i = 0; i + 2 < n; ++i) {
            const double r = dr * static_cast<double>(i);
            const std::ptrdiff_t ii = static_cast<std::ptrdiff_t>(i);
            const complexd d2 = (-val(ii - 2) + 16.0 * val(ii - 1) - 30.0 * val(ii) +
                                 16.0 * val(ii + 1) - val(ii + 2)) *
                                inv12h2;
            complexd lap;
            if (i == 0) {
                // f'/rho -> f''(0) (even); k-form at the origin is pinned for k >= 1
                if (!opt.lifted && k >= 1) {
                    out[i] = {0.0, 0.0};
                    continue;
                }
                const double dim = opt.lifted ? (2.0 * k + 2.0) : 2.0;
                lap = dim * d2;
            } else {
                const complexd d1 =
                    (val(ii - 2) - 8.0 * val(ii - 1) + 8.0 * val(ii + 1) - val(ii + 2)) * inv12h;
                if (opt.lifted)
                    lap = d2 + (2.0 * k + 1.0) / r * d1;
                else
                    lap = d2 + d1 / r - static_cast<double>(k) * static_cast<double>(k) / (r * r) * v[i];
            }
            out[i] = cm * lap + source(i, tau);
        }
        out[n - 2] = {0.0, 0.0}; // Dirichlet buffer
        out[n - 1] = {0.0, 0.0};
    };

    const double dt_target = opt.cfl * pp.a * dr * dr;
    const std::size_t steps = static_cast<std::size_t>(std::ceil((tau1 - tau0) / dt_target));
    const double dt = (tau1 - tau0) / static_cast<double>(steps);
    std::vector<complexd> k1(n), k2(n), k3(n), k4(n), tmp(n);
    double tau = tau0;
    for (std::size_t s = 0; s < steps; ++s) {
        rhs(u, tau, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
        rhs(tmp, tau + 0.5 * dt, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
        rhs(tmp, tau + 0.5 * dt, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
        rhs(tmp, tau + dt, k4);
        for (std::size_t i = 0; i < n; ++i)
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        tau += dt;
        if (!std::isfinite(std::abs(u[n / 2])))
            throw convergence_error("duhamel_mode_solve: instability detected");
    }
    if (opt.lifted) {
        for (std::size_t i = 0; i < n; ++i) u[i] *= std::pow(dr * static_cast<double>(i), k);
    }
    return u;
}

DistortedEig distorted_eigenfunction(double xi, const std::vector<double>& rho_nodes) {
    if (xi < 0.0) throw domain_error("distorted_eigenfunction: xi must be >= 0");
    for (std::size_t i = 1; i < rho_nodes.size(); ++i)
        if (!(rho_nodes[i] > rho_nodes[i - 1]))
            throw domain_error("distorted_eigenfunction: nodes must increase");

    // Frobenius series Phi = sum_m c_m rho^{5/2 + 2m}; c_0 = 1,
    // c_m = [ -xi c_{m-1} - sum_{i=0}^{m-1} (-1)^i (8 i + 12) c_{m-1-i} ] / (4 m (m + 2)).
    const int n_coef = 60;
    std::vector<double> c(n_coef, 0.0);
    c[0] = 1.0;
    for (int mm = 1; mm < n_coef; ++mm) {
        double s = -xi * c[mm - 1];
        for (int i = 0; i <= mm - 1; ++i) {
            const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
            s -= sgn * (8.0 * i + 12.0) * c[mm - 1 - i];
        }
        c[mm] = s / (4.0 * mm * (mm + 2.0));
    }
    auto series = [&](double r, double& val, double& deriv) {
        const double r2 = r * r;
        double p = std::pow(r, 2.5);
        val = 0.0;
        deriv = 0.0;
        for (int mm = 0; mm < n_coef; ++mm) {
            val += c[mm] * p;
            deriv += c[mm] * (2.5 + 2.0 * mm) * p / r;
            p *= r2;
        }
    };
    auto Q = [&](double r) {
        const double d = r * r + 1.0;
        return 15.0 / (4.0 * r * r) - 4.0 / d - 8.0 / (d * d) - xi;
    };

    DistortedEig out;
    out.xi = xi;
    out.rho = rho_nodes;
    out.values.assign(rho_nodes.size(), 0.0);

    const double handoff = 0.4;
    std::size_t i = 0;
    for (; i < rho_nodes.size() && rho_nodes[i] <= handoff; ++i) {
        double v, d;
        series(rho_nodes[i], v, d);
        out.values[i] = v;
    }
    if (i == rho_nodes.size()) return out;

    // adaptive RK45 (Cash-Karp) continuation of [Phi, Phi'] from the handoff point
    double r0 = handoff, v0, d0;
    series(r0, v0, d0);
    auto f = [&](double r, double y0, double y1, double& g0, double& g1) {
        g0 = y1;
        g1 = Q(r) * y0;
    };
    const double rtol = 1e-11, atol = 1e-300;
    double hstep = 1e-3;
    for (; i < rho_nodes.size(); ++i) {
        const double target = rho_nodes[i];
        while (r0 < target) {
            double hh = std::min(hstep, target - r0);
            // Cash-Karp embedded pair
            static const double A[6] = {0.0, 1.0 / 5, 3.0 / 10, 3.0 / 5, 1.0, 7.0 / 8};
            static const double B[6][5] = {
                {0, 0, 0, 0, 0},
                {1.0 / 5, 0, 0, 0, 0},
                {3.0 / 40, 9.0 / 40, 0, 0, 0},
                {3.0 / 10, -9.0 / 10, 6.0 / 5, 0, 0},
                {-11.0 / 54, 5.0 / 2, -70.0 / 27, 35.0 / 27, 0},
                {1631.0 / 55296, 175.0 / 512, 575.0 / 13824, 44275.0 / 110592, 253.0 / 4096}};
            static const double C5[6] = {37.0 / 378, 0, 250.0 / 621, 125.0 / 594, 0, 512.0 / 1771};
            static const double C4[6] = {2825.0 / 27648, 0,           18575.0 / 48384,
                                         13525.0 / 55296, 277.0 / 14336, 1.0 / 4};
            double k0[6], k1v[6];
            for (int st = 0; st < 6; ++st) {
                double y0 = v0, y1 = d0;
                for (int j = 0; j < st; ++j) {
                    y0 += hh * B[st][j] * k0[j];
                    y1 += hh * B[st][j] * k1v[j];
                }
                f(r0 + A[st] * hh, y0, y1, k0[st], k1v[st]);
            }
            double y5_0 = v0, y5_1 = d0, y4_0 = v0, y4_1 = d0;
            for (int st = 0; st < 6; ++st) {
                y5_0 += hh * C5[st] * k0[st];
                y5_1 += hh * C5[st] * k1v[st];
                y4_0 += hh * C4[st] * k0[st];
                y4_1 += hh * C4[st] * k1v[st];
            }
            const double sc0 = atol + rtol * std::max(std::abs(v0), std::abs(y5_0));
            const double sc1 = atol + rtol * std::max(std::abs(d0), std::abs(y5_1));
            const double err = std::max(std::abs(y5_0 - y4_0) / sc0, std::abs(y5_1 - y4_1) / sc1);
            if (err <= 1.0 || hh < 1e-12) {
                r0 += hh;
                v0 = y5_0;
                d0 = y5_1;
            }
            const double fac = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
            hstep = hh * std::clamp(fac, 0.2, 5.0);
            if (hstep < 1e-13) throw convergence_error("distorted_eigenfunction: step collapse");
        }
        out.values[i] = v0;
    }
    return out;
}

} // namespace spectral
} // namespace llgblow
