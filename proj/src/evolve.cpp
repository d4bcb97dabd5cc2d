#include "llgblow/evolve.hpp"

#include <algorithm>
#include <cmath>

#include "llgblow/grid.hpp"

namespace llgblow {
namespace evolve {

namespace {

// geometric-ratio mesh: spacings h, h q, h q^2, ... with h = r_first, reaching
// r_outer after n steps (the origin itself is a ghost, not a node)
std::vector<double> make_mesh(double r_outer, std::size_t n, double r_first) {
    std::vector<double> r(n);
    const double nn = static_cast<double>(n);
    if (r_first * nn >= r_outer) {
        // uniform is already fine enough
        for (std::size_t i = 0; i < n; ++i)
            r[i] = r_outer * static_cast<double>(i + 1) / nn;
        return r;
    }
    // solve r_first (q^n - 1)/(q - 1) = r_outer by bisection in q
    double lo = 1.0 + 1e-14, hi = 2.0;
    auto total = [&](double q) {
        // sum of the geometric series, stable for q near 1
        return r_first * std::expm1(nn * std::log(q)) / (q - 1.0);
    };
    while (total(hi) < r_outer) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (total(mid) < r_outer ? lo : hi) = mid;
    }
    const double q = 0.5 * (lo + hi);
    double h = r_first, acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += h;
        r[i] = acc;
        h *= q;
    }
    r[n - 1] = r_outer;
    return r;
}

double min_spacing(const std::vector<double>& r) {
    double m = r[0]; // spacing to the ghost origin
    for (std::size_t i = 1; i < r.size(); ++i) m = std::min(m, r[i] - r[i - 1]);
    return m;
}

// natural cubic spline through (x, y), evaluated at xq
std::vector<double> spline_eval(const std::vector<double>& x, const std::vector<double>& y,
                                const std::vector<double>& xq) {
    const std::size_t n = x.size();
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0), h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x[i + 1] - x[i];
    // solve tridiagonal for second derivatives (natural ends)
    std::vector<double> diag(n, 2.0), rhs(n, 0.0), sub(n, 0.0), sup(n, 0.0), m2(n, 0.0);
    diag[0] = diag[n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        sub[i] = h[i - 1] / (h[i - 1] + h[i]);
        sup[i] = h[i] / (h[i - 1] + h[i]);
        rhs[i] = 6.0 / (h[i - 1] + h[i]) * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m2[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m2[i] = (rhs[i] - sup[i] * m2[i + 1]) / diag[i];
    std::vector<double> out(xq.size());
    for (std::size_t q = 0; q < xq.size(); ++q) {
        const double xv = std::clamp(xq[q], x.front(), x.back());
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(x.begin(), x.end(), xv) - x.begin());
        i = (i == 0) ? 0 : i - 1;
        if (i >= n - 1) i = n - 2;
        const double dx = xv - x[i];
        const double hi = h[i];
        const double A = (x[i + 1] - xv) / hi, B = dx / hi;
        out[q] = A * y[i] + B * y[i + 1] +
                 ((A * A * A - A) * m2[i] + (B * B * B - B) * m2[i + 1]) * hi * hi / 6.0;
    }
    return out;
}

void refine_mesh(SimState& state, const SimConfig& cfg, double lambda_est) {
    const std::size_t n = state.r.size();
    std::vector<double> r_new = make_mesh(cfg.r_outer, n, lambda_est * cfg.r_first_factor);
    std::vector<double> x(n + 1);
    x[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) x[i + 1] = state.r[i];
    std::vector<Vec3> v_new(n);
    for (int c = 0; c < 3; ++c) {
        std::vector<double> y(n + 1);
        y[0] = state.v_origin[c];
        for (std::size_t i = 0; i < n; ++i) y[i + 1] = state.v[i][c];
        const std::vector<double> yi = spline_eval(x, y, r_new);
        for (std::size_t i = 0; i < n; ++i) v_new[i][c] = yi[i];
    }
    for (auto& v : v_new) v = normalized(v);
    v_new.back() = state.v_outer;
    state.r = std::move(r_new);
    state.v = std::move(v_new);
    ++state.refinements;
}

} // namespace

SimState initial_twisted_bubble(const SimConfig& cfg, double lambda0, double twist,
                                double interior_delta) {
    SimState s;
    s.r = make_mesh(cfg.r_outer, cfg.n_nodes, lambda0 * cfg.r_first_factor);
    s.v.resize(s.r.size());
    const double wind = 2.0 * (1.0 + interior_delta);
    const double wbR = M_PI - wind * std::atan(cfg.r_outer / lambda0);
    for (std::size_t i = 0; i < s.r.size(); ++i) {
        const double rr = s.r[i];
        const double w = M_PI - wind * std::atan(rr / lambda0) -
                         (wbR + twist * M_PI) * (rr / cfg.r_outer) * (rr / cfg.r_outer);
        s.v[i] = {std::sin(w), 0.0, std::cos(w)};
    }
    s.v_outer = s.v.back();
    return s;
}

SimState initial_bubble(const SimConfig& cfg, double lambda) {
    SimState s;
    s.r = make_mesh(cfg.r_outer, cfg.n_nodes, lambda * cfg.r_first_factor);
    s.v.resize(s.r.size());
    for (std::size_t i = 0; i < s.r.size(); ++i) {
        const double w = M_PI - 2.0 * std::atan(s.r[i] / lambda);
        s.v[i] = {std::sin(w), 0.0, std::cos(w)};
    }
    s.v_outer = s.v.back();
    return s;
}

namespace {

// core RHS on raw arrays; ghost at r=0 is the south pole, Dirichlet at the outer node
void rhs_impl(const std::vector<double>& r, const std::vector<Vec3>& v, const Vec3& v_origin,
              const PhysParams& pp, std::vector<Vec3>& out) {
    const std::size_t n = r.size();
    out.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Vec3& vm = (i == 0) ? v_origin : v[i - 1];
        const Vec3& vp = v[i + 1];
        const double hm = (i == 0) ? r[0] : r[i] - r[i - 1];
        const double hp = r[i + 1] - r[i];
        const Stencil3 s = nonuniform_stencil(hm, hp);
        Vec3 d1, d2;
        for (int c = 0; c < 3; ++c) {
            d1[c] = s.wm1 * vm[c] + s.w0 * v[i][c] + s.wp1 * vp[c];
            d2[c] = s.vm1 * vm[c] + s.v0 * v[i][c] + s.vp1 * vp[c];
        }
        const double inv_r = 1.0 / r[i];
        const Vec3 J2v{-v[i][0], -v[i][1], 0.0};
        const Vec3 Lv = d2 + inv_r * d1 + (inv_r * inv_r) * J2v;
        const double grad2 = dot(d1, d1) + (v[i][0] * v[i][0] + v[i][1] * v[i][1]) * inv_r * inv_r;
        const Vec3 F = pp.a * (Lv + grad2 * v[i]) - pp.b * cross(v[i], Lv);
        out[i] = F;
    }
    out[n - 1] = {0.0, 0.0, 0.0}; // Dirichlet: outer value held fixed
}

} // namespace

std::vector<Vec3> equivariant_rhs(const SimState& state, const PhysParams& pp) {
    if (state.r.size() < 8) throw domain_error("equivariant_rhs: mesh too coarse");
    std::vector<Vec3> out;
    rhs_impl(state.r, state.v, state.v_origin, pp, out);
    return out;
}

void step(SimState& state, const SimConfig& cfg) {
    const std::size_t n = state.r.size();
    const double dr_min = min_spacing(state.r);
    double dt = cfg.cfl * dr_min * dr_min / std::max(cfg.pp.a, 0.25);
    if (cfg.dt_policy == DtPolicy::self_similar && cfg.dt_self_similar > 0.0) {
        const double lam = lambda_estimate(state);
        dt = std::min(dt, cfg.dt_self_similar * lam * lam);
    }

    static thread_local std::vector<Vec3> k1, k2, k3, k4, tmp;
    rhs_impl(state.r, state.v, state.v_origin, cfg.pp, k1);
    tmp.resize(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = state.v[i] + (0.5 * dt) * k1[i];
    rhs_impl(state.r, tmp, state.v_origin, cfg.pp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = state.v[i] + (0.5 * dt) * k2[i];
    rhs_impl(state.r, tmp, state.v_origin, cfg.pp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = state.v[i] + dt * k3[i];
    rhs_impl(state.r, tmp, state.v_origin, cfg.pp, k4);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        Vec3 vn = state.v[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (cfg.renormalize) {
            const double nn = norm(vn);
            if (!(nn > 0.0) || !std::isfinite(nn))
                throw convergence_error("step: blow-up under-resolved (NaN/overflow)");
            vn = (1.0 / nn) * vn;
        } else if (!std::isfinite(vn[0]) || !std::isfinite(vn[1]) || !std::isfinite(vn[2])) {
            throw convergence_error("step: blow-up under-resolved (NaN/overflow)");
        }
        state.v[i] = vn;
    }
    state.t += dt;
    ++state.steps;
}

double energy(const SimState& state) {
    const std::size_t n = state.r.size();
    double acc = 0.0;
    double r_prev = 0.0;
    Vec3 v_prev = state.v_origin;
    auto density = [](const Vec3& d1, const Vec3& v, double r) {
        const double jv2 = v[0] * v[0] + v[1] * v[1];
        return (dot(d1, d1) + jv2 / (r * r)) * r;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const double h = state.r[i] - r_prev;
        Vec3 d1;
        for (int c = 0; c < 3; ++c) d1[c] = (state.v[i][c] - v_prev[c]) / h;
        const double r_mid = 0.5 * (state.r[i] + r_prev);
        Vec3 v_mid;
        for (int c = 0; c < 3; ++c) v_mid[c] = 0.5 * (state.v[i][c] + v_prev[c]);
        acc += density(d1, v_mid, r_mid) * h;
        r_prev = state.r[i];
        v_prev = state.v[i];
    }
    return M_PI * acc;
}

double max_gradient(const SimState& state) {
    const std::size_t n = state.r.size();
    double worst = 0.0;
    double r_prev = 0.0;
    Vec3 v_prev = state.v_origin;
    for (std::size_t i = 0; i < n; ++i) {
        const double h = state.r[i] - r_prev;
        Vec3 d1;
        for (int c = 0; c < 3; ++c) d1[c] = (state.v[i][c] - v_prev[c]) / h;
        const double r_mid = 0.5 * (state.r[i] + r_prev);
        const double jv2 = 0.25 * (std::pow(state.v[i][0] + v_prev[0], 2) +
                                   std::pow(state.v[i][1] + v_prev[1], 2));
        worst = std::max(worst, dot(d1, d1) + jv2 / (r_mid * r_mid));
        r_prev = state.r[i];
        v_prev = state.v[i];
    }
    return std::sqrt(worst);
}

double lambda_estimate(const SimState& state) { return std::sqrt(8.0) / max_gradient(state); }

double constraint_drift(const SimState& state) {
    double worst = 0.0;
    for (const auto& v : state.v) worst = std::max(worst, std::abs(norm(v) - 1.0));
    return worst;
}

std::optional<BlowupFit> fit_rate(const std::vector<DiagnosticsSample>& samples) {
    if (samples.size() < 8) return std::nullopt;
    const double lam_end = samples.back().lambda_est;
    std::vector<double> ts, ls;
    for (const auto& s : samples)
        if (s.lambda_est <= 10.0 * lam_end) {
            ts.push_back(s.t);
            ls.push_back(s.lambda_est);
        }
    if (ts.size() < 6) return std::nullopt;
    const double t_last = ts.back();
    auto sse = [&](double T, double* alpha_out, double* c_out) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double x = std::log(T - ts[i]);
            const double y = std::log(ls[i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        const double alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double c = (sy - alpha * sx) / n;
        double err = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double d = alpha * std::log(T - ts[i]) + c - std::log(ls[i]);
            err += d * d;
        }
        if (alpha_out) *alpha_out = alpha;
        if (c_out) *c_out = c;
        return err;
    };
    // golden-section search for T_est in (t_last, t_last + span]
    const double span = std::max((ts.back() - ts.front()) * 2.0, 1e-12);
    double lo = t_last + 1e-14, hi = t_last + span;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = sse(x1, nullptr, nullptr), f2 = sse(x2, nullptr, nullptr);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = sse(x1, nullptr, nullptr);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = sse(x2, nullptr, nullptr);
        }
    }
    const double T_best = 0.5 * (lo + hi);
    double alpha = 0.0, c = 0.0;
    sse(T_best, &alpha, &c);
    BlowupFit fit;
    fit.T_est = T_best;
    fit.exponent = alpha;
    fit.prefactor = std::exp(c);
    fit.window_lo = lam_end;
    fit.window_hi = 10.0 * lam_end;
    return fit;
}

BlowupDiagnostics run_and_fit(const SimConfig& cfg, SimState state, SimState* final_state,
                              const std::function<void(const DiagnosticsSample&)>& on_sample) {
    BlowupDiagnostics diag;
    auto record = [&]() {
        diag.samples.push_back({state.t, lambda_estimate(state), energy(state), max_gradient(state)});
        if (on_sample) on_sample(diag.samples.back());
    };
    record();
    while (state.t < cfg.t_max) {
        try {
            step(state, cfg);
        } catch (const convergence_error&) {
            diag.blew_up = true;
            break;
        }
        if (state.steps % cfg.diag_stride == 0) {
            record();
            const double lam = diag.samples.back().lambda_est;
            if (cfg.lambda_stop > 0.0 && lam < cfg.lambda_stop) {
                diag.blew_up = true;
                break;
            }
            if (cfg.allow_refine && lam < 10.0 * state.r.front()) refine_mesh(state, cfg, lam);
        }
    }
    if (diag.blew_up) diag.fit = fit_rate(diag.samples);
    if (final_state != nullptr) *final_state = std::move(state);
    return diag;
}

} // namespace evolve
} // namespace llgblow
