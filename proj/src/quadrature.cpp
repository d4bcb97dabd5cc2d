#include "llgblow/quadrature.hpp"

#include <algorithm>
#include <queue>
#include <vector>

namespace llgblow {

namespace {

// Kronrod-15 abscissae on [-1,1] and weights; Gauss-7 weights on the odd entries.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
    complexd integral;
    double error;
};

PanelEstimate gk15(const std::function<complexd(double)>& f, double lo, double hi, int& evals) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    complexd fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    evals += 15;
    complexd kron{0.0, 0.0};
    complexd gauss{0.0, 0.0};
    for (int i = 0; i < 8; ++i) {
        complexd pair = (i == 7) ? fv[7] : fv[i] + fv[14 - i];
        kron += kWgk[i] * pair;
        if (i % 2 == 1) gauss += kWg[i / 2] * pair;
    }
    kron *= h;
    gauss *= h;
    return {kron, std::abs(kron - gauss)};
}

} // namespace

QuadResult integrate(const std::function<complexd(double)>& f, double lo, double hi,
                     double abs_tol, double rel_tol, int max_depth) {
    QuadResult out;
    if (lo == hi) return out;
    struct Panel {
        double lo, hi, error;
        complexd val;
        int depth;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    int evals = 0;
    PanelEstimate first = gk15(f, lo, hi, evals);
    std::priority_queue<Panel> queue;
    queue.push({lo, hi, first.error, first.integral, 0});
    complexd total = first.integral;
    double total_err = first.error;
    const int max_panels = 4000;
    int panels = 1;
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) && panels < max_panels) {
        Panel worst = queue.top();
        if (worst.depth >= max_depth) break;
        queue.pop();
        double mid = 0.5 * (worst.lo + worst.hi);
        PanelEstimate a = gk15(f, worst.lo, mid, evals);
        PanelEstimate b = gk15(f, mid, worst.hi, evals);
        total += a.integral + b.integral - worst.val;
        total_err += a.error + b.error - worst.error;
        queue.push({worst.lo, mid, a.error, a.integral, worst.depth + 1});
        queue.push({mid, worst.hi, b.error, b.integral, worst.depth + 1});
        ++panels;
    }
    // re-accumulate for a tighter error estimate
    total = {0.0, 0.0};
    total_err = 0.0;
    while (!queue.empty()) {
        total += queue.top().val;
        total_err += queue.top().error;
        queue.pop();
    }
    out.value = total;
    out.error = total_err;
    out.evaluations = evals;
    out.converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total)) * 50.0 + 1e-300;
    return out;
}

QuadResult integrate_to_infinity(const std::function<complexd(double)>& f, double lo,
                                 double abs_tol, double rel_tol) {
    auto g = [&](double s) -> complexd {
        double one_minus = 1.0 - s;
        double x = lo + s / one_minus;
        return f(x) / (one_minus * one_minus);
    };
    return integrate(g, 0.0, 1.0, abs_tol, rel_tol);
}

double integrate_real(const std::function<double(double)>& f, double lo, double hi,
                      double abs_tol, double rel_tol) {
    auto g = [&](double x) -> complexd { return {f(x), 0.0}; };
    return integrate(g, lo, hi, abs_tol, rel_tol).value.real();
}

double integrate_real_to_infinity(const std::function<double(double)>& f, double lo,
                                  double abs_tol, double rel_tol) {
    auto g = [&](double x) -> complexd { return {f(x), 0.0}; };
    return integrate_to_infinity(g, lo, abs_tol, rel_tol).value.real();
}

} // namespace llgblow
