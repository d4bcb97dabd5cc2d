#include "llgblow/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "llgblow/geometry.hpp"
#include "llgblow/quadrature.hpp"

namespace llgblow {
namespace nonlocal {

namespace {

// exp(z) - 1 without cancellation for small |z|
complexd cexpm1(const complexd& z) {
    if (std::abs(z) < 0.5) {
        complexd term = z, sum = z;
        for (int n = 2; n < 24; ++n) {
            term *= z / static_cast<double>(n);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::exp(z) - 1.0;
}

} // namespace

complexd kernel_K0(double zeta, const PhysParams& pp, int order) {
    if (!(zeta > 0.0)) throw domain_error("kernel_K0: zeta must be positive");
    const complexd c = pp.c_plus();
    const complexd x = c * (zeta / 4.0);
    if (std::abs(x) < 0.5) {
        // K0 = sum_{n>=1} (-1)^{n+1} 2 c^n zeta^{n-1} / (4^n n!)
        complexd sum{0.0, 0.0};
        complexd coef = c / 4.0; // c^n / 4^n, starts n=1
        double fact = 1.0;
        for (int n = 1; n < 26; ++n) {
            if (n > 1) {
                coef *= c / 4.0;
                fact *= static_cast<double>(n);
            }
            double deriv_factor = 1.0;
            int power = n - 1 - order;
            if (order >= 1) deriv_factor *= static_cast<double>(n - 1);
            if (order >= 2) deriv_factor *= static_cast<double>(n - 2);
            if (power < 0 || deriv_factor == 0.0) continue;
            const double sign = (n % 2 == 1) ? 1.0 : -1.0;
            sum += sign * 2.0 * coef * deriv_factor * std::pow(zeta, power) / fact;
        }
        return sum;
    }
    const complexd one_minus_e = -cexpm1(-x); // 1 - e^{-c zeta/4}
    const complexd e = 1.0 + cexpm1(-x);      // e^{-c zeta/4}
    switch (order) {
        case 0: return 2.0 * one_minus_e / zeta;
        case 1: return 2.0 * ((c / 4.0) * e * zeta - one_minus_e) / (zeta * zeta);
        case 2:
            return (-2.0 * (c / 4.0) * (c / 4.0) * e * zeta * zeta - 4.0 * (c / 4.0) * e * zeta +
                    4.0 * one_minus_e) /
                   (zeta * zeta * zeta);
        default: throw domain_error("kernel_K0: order must be 0, 1 or 2");
    }
}

complexd profile_q0(double xi, const PhysParams& pp) {
    if (!(xi > 0.0)) throw domain_error("profile_q0: xi must be positive");
    const complexd c = pp.c_plus();
    // substitute eta = xi/s:  q0 = 2/(c xi) * int_0^1 (1 - e^{-c xi^2/(4 s^2)}) s ds
    auto f = [&](double s) -> complexd {
        if (s <= 0.0) return {0.0, 0.0};
        const complexd arg = -c * (xi * xi) / (4.0 * s * s);
        return -cexpm1(arg) * s;
    };
    QuadResult q = integrate(f, 0.0, 1.0, 1e-16, 1e-14);
    if (!q.converged) throw convergence_error("profile_q0: quadrature did not converge");
    return 2.0 / (c * xi) * q.value;
}

// ---------------------------------------------------------------------------
// ParamHistory

namespace {

struct HermiteSeries {
    std::vector<double> t;
    std::vector<complexd> v;
    std::vector<complexd> m; // slopes

    complexd eval(double x) const {
        const auto it = std::upper_bound(t.begin(), t.end(), x);
        std::size_t i = (it == t.begin()) ? 0 : static_cast<std::size_t>(it - t.begin() - 1);
        if (i >= t.size() - 1) i = t.size() - 2;
        const double h = t[i + 1] - t[i];
        const double s = (x - t[i]) / h;
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * v[i] + (s3 - 2 * s2 + s) * h * m[i] +
               (-2 * s3 + 3 * s2) * v[i + 1] + (s3 - s2) * h * m[i + 1];
    }

    complexd deriv(double x) const {
        const auto it = std::upper_bound(t.begin(), t.end(), x);
        std::size_t i = (it == t.begin()) ? 0 : static_cast<std::size_t>(it - t.begin() - 1);
        if (i >= t.size() - 1) i = t.size() - 2;
        const double h = t[i + 1] - t[i];
        const double s = (x - t[i]) / h;
        const double s2 = s * s;
        return ((6 * s2 - 6 * s) * v[i] + (3 * s2 - 4 * s + 1) * h * m[i] +
                (-6 * s2 + 6 * s) * v[i + 1] + (3 * s2 - 2 * s) * h * m[i + 1]) /
               h;
    }
};

std::vector<complexd> fd_slopes(const std::vector<double>& t, const std::vector<complexd>& v) {
    const std::size_t n = t.size();
    std::vector<complexd> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0)
            m[i] = (v[1] - v[0]) / (t[1] - t[0]);
        else if (i == n - 1)
            m[i] = (v[n - 1] - v[n - 2]) / (t[n - 1] - t[n - 2]);
        else {
            const double hm = t[i] - t[i - 1], hp = t[i + 1] - t[i];
            m[i] = (-hp / hm * v[i - 1] + (hp / hm - hm / hp) * v[i] + hm / hp * v[i + 1]) / (hm + hp);
        }
    }
    return m;
}

} // namespace

ParamHistory::ParamHistory(std::vector<double> t, std::vector<complexd> p, std::vector<Vec2> xi,
                           std::vector<complexd> pdot, std::vector<Vec2> xidot) {
    if (t.size() < 2 || p.size() != t.size() || xi.size() != t.size())
        throw domain_error("ParamHistory: need >= 2 consistent samples");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i > 0 && !(t[i] > t[i - 1])) throw domain_error("ParamHistory: time nodes not increasing");
        if (!(std::abs(p[i]) > 0.0)) throw domain_error("ParamHistory: |p| must stay positive");
    }
    t_lo_ = t.front();
    t_hi_ = t.back();

    auto p_slopes = pdot.empty() ? fd_slopes(t, p) : pdot;
    if (!pdot.empty() && pdot.size() != t.size()) throw domain_error("ParamHistory: pdot length mismatch");

    // consistency of supplied derivatives against finite differences
    if (!pdot.empty()) {
        auto fd = fd_slopes(t, p);
        double scale = 0.0, worst = 0.0;
        for (const auto& d : pdot) scale = std::max(scale, std::abs(d));
        for (std::size_t i = 1; i + 1 < t.size(); ++i)
            worst = std::max(worst, std::abs(fd[i] - pdot[i]));
        consistency_ = (scale > 0.0) ? worst / scale : 0.0;
    }

    auto hp = std::make_shared<HermiteSeries>(HermiteSeries{t, p, p_slopes});
    p_fn_ = [hp](double x) { return hp->eval(x); };
    if (pdot.empty()) {
        pdot_fn_ = [hp](double x) { return hp->deriv(x); };
    } else {
        auto hd = std::make_shared<HermiteSeries>(HermiteSeries{t, pdot, fd_slopes(t, pdot)});
        pdot_fn_ = [hd](double x) { return hd->eval(x); };
    }

    std::vector<complexd> xic(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) xic[i] = {xi[i][0], xi[i][1]};
    std::vector<complexd> xidc;
    if (!xidot.empty()) {
        if (xidot.size() != t.size()) throw domain_error("ParamHistory: xidot length mismatch");
        xidc.resize(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) xidc[i] = {xidot[i][0], xidot[i][1]};
    }
    auto hx = std::make_shared<HermiteSeries>(HermiteSeries{t, xic, xidc.empty() ? fd_slopes(t, xic) : xidc});
    xi_fn_ = [hx](double x) {
        complexd v = hx->eval(x);
        return Vec2{v.real(), v.imag()};
    };
    if (xidc.empty()) {
        xidot_fn_ = [hx](double x) {
            complexd v = hx->deriv(x);
            return Vec2{v.real(), v.imag()};
        };
    } else {
        auto hxd = std::make_shared<HermiteSeries>(HermiteSeries{t, xidc, fd_slopes(t, xidc)});
        xidot_fn_ = [hxd](double x) {
            complexd v = hxd->eval(x);
            return Vec2{v.real(), v.imag()};
        };
    }
}

ParamHistory ParamHistory::analytic(std::function<complexd(double)> p, std::function<complexd(double)> pdot,
                                    std::function<Vec2(double)> xi, std::function<Vec2(double)> xidot,
                                    double t0, double t1) {
    if (!(t1 > t0)) throw domain_error("ParamHistory::analytic: need t1 > t0");
    ParamHistory h;
    h.p_fn_ = std::move(p);
    h.pdot_fn_ = std::move(pdot);
    h.xi_fn_ = std::move(xi);
    h.xidot_fn_ = std::move(xidot);
    h.t_lo_ = t0;
    h.t_hi_ = t1;
    return h;
}

ParamHistory ParamHistory::rate_ansatz(double T, double gamma0, Vec2 xi) {
    if (!(T > 0.0) || T >= 0.1) throw domain_error("rate_ansatz: need 0 < T < 0.1");
    const double lnT = std::abs(std::log(T));
    const complexd phase = std::polar(1.0, gamma0);
    auto lam = [T, lnT](double t) {
        const double L = std::log(T - t);
        return lnT * (T - t) / (L * L);
    };
    auto lamdot = [T, lnT](double t) {
        const double L = std::log(T - t);
        return lnT * (-1.0 / (L * L) + 2.0 / (L * L * L));
    };
    return analytic([lam, phase](double t) { return lam(t) * phase; },
                    [lamdot, phase](double t) { return lamdot(t) * phase; },
                    [xi](double) { return xi; }, [](double) { return Vec2{0.0, 0.0}; }, 0.0,
                    T * (1.0 - 1e-9));
}

void ParamHistory::require_cover(double t) const {
    if (!p_fn_) throw domain_error("ParamHistory: empty history");
    if (t < t_lo_ - 1e-15 || t > t_hi_ + 1e-15)
        throw domain_error("ParamHistory: t outside covered interval");
}

complexd ParamHistory::p(double t) const {
    require_cover(t);
    return p_fn_(t);
}
complexd ParamHistory::pdot(double t) const {
    require_cover(t);
    return pdot_fn_(t);
}
Vec2 ParamHistory::xi(double t) const {
    require_cover(t);
    return xi_fn_(t);
}
Vec2 ParamHistory::xidot(double t) const {
    require_cover(t);
    return xidot_fn_(t);
}

ParamHistory ParamHistory::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("ParamHistory::load_csv: cannot open " + path);
    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) {
            cell.erase(0, cell.find_first_not_of(" \t\r"));
            cell.erase(cell.find_last_not_of(" \t\r") + 1);
            cells.push_back(cell);
        }
        if (header.empty()) {
            header = cells;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(std::stod(c));
        rows.push_back(row);
    }
    auto col = [&](const std::string& name) -> int {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    };
    const int ct = col("t"), cre = col("re_p"), cim = col("im_p"), cx1 = col("xi1"), cx2 = col("xi2");
    if (ct < 0 || cre < 0 || cim < 0 || cx1 < 0 || cx2 < 0)
        throw domain_error("ParamHistory::load_csv: need columns t, re_p, im_p, xi1, xi2");
    const int cdre = col("re_pdot"), cdim = col("im_pdot"), cdx1 = col("xidot1"), cdx2 = col("xidot2");
    std::vector<double> t;
    std::vector<complexd> p, pdot;
    std::vector<Vec2> xi, xidot;
    for (const auto& r : rows) {
        t.push_back(r[ct]);
        p.push_back({r[cre], r[cim]});
        xi.push_back({r[cx1], r[cx2]});
        if (cdre >= 0 && cdim >= 0) pdot.push_back({r[cdre], r[cdim]});
        if (cdx1 >= 0 && cdx2 >= 0) xidot.push_back({r[cdx1], r[cdx2]});
    }
    return ParamHistory(std::move(t), std::move(p), std::move(xi), std::move(pdot), std::move(xidot));
}

// ---------------------------------------------------------------------------
// Phi0 and its derivatives

namespace {

complexd history_integral(double z, double t, const ParamHistory& hist,
                          const std::function<complexd(double)>& weight, double quad_tol) {
    // integral over s in [max(0, t_min), t) of pdot(s)/(t-s) * weight(zeta),
    // zeta = z^2/(t-s); panels split geometrically around the zeta = 1 crossover.
    const double lo = std::max(0.0, hist.t_min());
    if (t <= lo) throw domain_error("phi0_eval: t not inside history");
    auto f = [&](double s) -> complexd {
        const double gap = t - s;
        if (gap <= 0.0) return {0.0, 0.0};
        return hist.pdot(s) / gap * weight(z * z / gap);
    };
    // split points where zeta = 4^j
    std::vector<double> pts{lo};
    for (int j = -24; j <= 24; ++j) {
        const double gap = z * z / std::pow(4.0, j);
        const double s = t - gap;
        if (s > lo && s < t) pts.push_back(s);
    }
    pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    complexd total{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] <= pts[i]) continue;
        total += integrate(f, pts[i], pts[i + 1], quad_tol * 1e-2, quad_tol).value;
    }
    return total;
}

} // namespace

CorrectionSample phi0_eval(double z, double t, const ParamHistory& hist, const PhysParams& pp,
                           double quad_tol) {
    if (!(z > 0.0)) throw domain_error("phi0_eval: z must be positive");
    CorrectionSample out;
    out.z = z;
    out.t = t;
    out.Phi0 = -z * history_integral(
                        z, t, hist, [&](double zeta) { return kernel_K0(zeta, pp, 0); }, quad_tol);
    out.dz = -history_integral(
        z, t, hist,
        [&](double zeta) { return kernel_K0(zeta, pp, 0) + 2.0 * zeta * kernel_K0(zeta, pp, 1); },
        quad_tol);
    out.dzz = -(1.0 / z) * history_integral(
                               z, t, hist,
                               [&](double zeta) {
                                   return 6.0 * zeta * kernel_K0(zeta, pp, 1) +
                                          4.0 * zeta * zeta * kernel_K0(zeta, pp, 2);
                               },
                               quad_tol);
    return out;
}

Vec3 phi0_star_field(const Vec2& x, double t, const ParamHistory& hist, const PhysParams& pp) {
    const Vec2 xi = hist.xi(t);
    const double lambda = std::abs(hist.p(t));
    const double r = std::hypot(x[0] - xi[0], x[1] - xi[1]);
    if (r == 0.0) return {0.0, 0.0, 0.0};
    const double theta = std::atan2(x[1] - xi[1], x[0] - xi[0]);
    const double z = std::sqrt(r * r + lambda * lambda);
    const complexd phi0 = phi0_eval(z, t, hist, pp).Phi0;
    const complexd val = (r * r / (r * r + lambda * lambda)) * phi0 * std::polar(1.0, theta);
    return {val.real(), val.imag(), 0.0};
}

Phi0StarDerivs phi0_star_derivs(double r, double theta, double t, const ParamHistory& hist,
                                const PhysParams& pp) {
    const double lambda = std::abs(hist.p(t));
    const double z = std::sqrt(r * r + lambda * lambda);
    const double rho = r / lambda;
    const double d = rho * rho + 1.0;
    const CorrectionSample c = phi0_eval(z, t, hist, pp);
    const complexd phase = std::polar(1.0, theta);
    Phi0StarDerivs out;
    out.value = (rho * rho / d) * c.Phi0 * phase;
    out.d_r = ((2.0 * rho / (lambda * d * d)) * c.Phi0 + (rho * rho * rho / std::pow(d, 1.5)) * c.dz) * phase;
    out.d_theta = (rho * rho / d) * c.Phi0 * complexd{0.0, 1.0} * phase;
    return out;
}

complexd mode0_error_complex(double rho, const ParamHistory& hist, double t) {
    const complexd p = hist.p(t);
    const complexd pd = hist.pdot(t);
    const double lambda = std::abs(p);
    const double gamma = std::arg(p);
    const complexd rel = pd * std::polar(1.0, -gamma); // lambdadot + i lambda gammadot
    const complexd rate{rel.real() / lambda, rel.imag() / lambda};
    return (-2.0 * rho / (rho * rho + 1.0)) * rate;
}

Vec3 residual_Sj(const Vec2& x, double t, const ParamHistory& hist, const PhysParams& pp, double h_rel) {
    const Vec2 xi = hist.xi(t);
    const Vec2 xid = hist.xidot(t);
    const complexd p = hist.p(t);
    const complexd pd = hist.pdot(t);
    const double lambda = std::abs(p);
    const double gamma = std::arg(p);
    const complexd rel = pd * std::polar(1.0, -gamma);
    const double lambdadot = rel.real();
    const double gammadot = rel.imag() / lambda;

    const double r = std::hypot(x[0] - xi[0], x[1] - xi[1]);
    if (!(r > 0.0)) throw domain_error("residual_Sj: x must differ from the bubble center");
    const double theta = std::atan2(x[1] - xi[1], x[0] - xi[0]);
    const double rho = r / lambda;
    const Vec2 y{rho * std::cos(theta), rho * std::sin(theta)};
    const auto frame = geometry::bubble_frame(y);
    const Vec3 U = geometry::rotate_z(gamma, frame.W);

    // complex slot g(r) = rho^2/(rho^2+1) Phi0(z,t); radial FD with step h
    auto g_at = [&](double rr, double tt) -> complexd {
        const double lam = std::abs(hist.p(tt));
        const double zz = std::sqrt(rr * rr + lam * lam);
        const double rh = rr / lam;
        return (rh * rh / (rh * rh + 1.0)) * phi0_eval(zz, tt, hist, pp).Phi0;
    };
    double h = h_rel * std::max(r, lambda);
    if (r > 0.0 && h >= r) h = 0.5 * r;
    const complexd g0 = g_at(r, t);
    const complexd gp = g_at(r + h, t);
    const complexd gm = g_at(r - h, t);
    const complexd dg = (gp - gm) / (2.0 * h);
    const complexd d2g = (gp - 2.0 * g0 + gm) / (h * h);
    // Lap (g e^{i theta}) = (g'' + g'/r - g/r^2) e^{i theta}
    const complexd lap_c = (r > 0.0) ? (d2g + dg / r - g0 / (r * r)) * std::polar(1.0, theta)
                                     : complexd{0.0, 0.0};
    const Vec3 lap_phi{lap_c.real(), lap_c.imag(), 0.0};

    const complexd val_c = g0 * std::polar(1.0, theta);
    const Vec3 phi_star{val_c.real(), val_c.imag(), 0.0};

    // time derivative of the embedded field at fixed x
    const double ht = std::max(h_rel * t, 1e-12);
    if (t - ht < hist.t_min() || t + ht > hist.t_max())
        throw domain_error("residual_Sj: t too close to the history ends for time differencing");
    const Vec3 f_tp = phi0_star_field(x, t + ht, hist, pp);
    const Vec3 f_tm = phi0_star_field(x, t - ht, hist, pp);
    const Vec3 dt_phi = (1.0 / (2.0 * ht)) * (f_tp - f_tm);

    // m(r) = U . Phi0*; theta-independent, FD in r
    auto m_at = [&](double rr) -> double {
        const double rh = rr / lambda;
        const auto prof = geometry::profile_w(rh);
        const complexd g = g_at(rr, t);
        return prof.sin_w * (std::cos(gamma) * g.real() + std::sin(gamma) * g.imag());
    };
    const double mprime = (m_at(r + h) - m_at(r - h)) / (2.0 * h);
    const Vec3 dU_dr = (frame.w_rho / lambda) * geometry::rotate_z(gamma, frame.E1);

    const double grad_U_sq = frame.grad_sq / (lambda * lambda);
    const Vec3 X = lap_phi + grad_U_sq * phi_star + (-2.0 * mprime) * dU_dr;
    const Vec3 aX_bUX = pp.a * X - pp.b * cross(U, X);

    // -dt U from the modulation identities
    const Vec3 E0 = (rho * frame.w_rho) *
                    geometry::rotate_z(gamma, (lambdadot / lambda) * frame.E1 + gammadot * frame.E2);
    const double ct = std::cos(theta), st = std::sin(theta);
    const Vec3 E1v = (frame.w_rho / lambda) *
                     geometry::rotate_z(gamma, (xid[0] * ct + xid[1] * st) * frame.E1 +
                                                   (xid[0] * st - xid[1] * ct) * frame.E2);
    return (-1.0) * dt_phi + aX_bUX + E0 + E1v;
}

} // namespace nonlocal
} // namespace llgblow
