#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "llgblow/types.hpp"

namespace llgblow {
namespace evolve {

enum class DtPolicy { fixed, self_similar };

/// 1-equivariant LLG run configuration. The map is u(r, theta) = e^{theta J} v(r),
/// evolved on a graded radial mesh with the origin pinned at the south pole and
/// Dirichlet data held at the outer boundary.
struct SimConfig {
    PhysParams pp{1.0, 0.0};
    double r_outer = 4.0;
    std::size_t n_nodes = 700;
    double r_first_factor = 1.0 / 25.0; // first node and first spacing = factor * lambda0
    DtPolicy dt_policy = DtPolicy::fixed;
    double cfl = 0.18;             // dt = cfl * min(dr)^2 / a
    double dt_self_similar = 0.0;  // dt = c * lambda_est^2 when policy = self_similar (capped by CFL)
    bool renormalize = true;
    double t_max = 1.0;
    double lambda_stop = 0.0;      // stop when lambda_est falls below (0 = never)
    bool allow_refine = true;      // geometric re-meshing once lambda_est < 10 * first node
    std::size_t diag_stride = 64;  // diagnostics every this many steps
};

struct SimState {
    double t = 0.0;
    std::vector<double> r;    // radial nodes, first > 0
    std::vector<Vec3> v;      // unit profile per node
    Vec3 v_origin = kSouthPole;  // pinned value at the r = 0 ghost (must be a pole)
    Vec3 v_outer{0.0, 0.0, 1.0}; // held Dirichlet value at r_outer
    std::size_t steps = 0;
    std::size_t refinements = 0;
};

/// Near-bubble initial data with an interior overtwist and a boundary ramp:
///   w0(r) = pi - 2 (1 + delta) arctan(r / lambda0) - (w0_tail(R) + twist * pi) (r/R)^2.
/// delta > 0 concentrates extra winding at the core scale (drives immediate
/// collapse); twist > 0 winds the held boundary value past the north pole
/// (sustains an outer pull). Either may be zero.
SimState initial_twisted_bubble(const SimConfig& cfg, double lambda0, double twist,
                                double interior_delta = 0.0);

/// Exact bubble profile v = (sin w, 0, cos w), w = pi - 2 arctan(r / lambda).
SimState initial_bubble(const SimConfig& cfg, double lambda);

/// Tension-field right-hand side F(v) = a(Lv + (|v'|^2 + |Jv|^2/r^2) v) - b v x Lv
/// with Lv = v'' + v'/r + J^2 v / r^2; F is tangent to v up to discretization.
std::vector<Vec3> equivariant_rhs(const SimState& state, const PhysParams& pp);

/// One explicit RK4 step with projection back to the sphere; dt from the config policy.
/// Throws on NaN/overflow with the last good state preserved.
void step(SimState& state, const SimConfig& cfg);

/// Dirichlet energy E = pi int (|v'|^2 + |Jv|^2 / r^2) r dr (trapezoid, ghost origin).
double energy(const SimState& state);

/// Bubble-scale estimate sqrt(8) / max_r |grad u|.
double lambda_estimate(const SimState& state);

double max_gradient(const SimState& state);

/// Worst |(|v| - 1)| over the nodes.
double constraint_drift(const SimState& state);

struct DiagnosticsSample {
    double t;
    double lambda_est;
    double energy;
    double max_grad;
};

struct BlowupFit {
    double T_est;
    double exponent;
    double prefactor;
    double window_lo; // lambda window of the fit, [lambda_end, 10 lambda_end]
    double window_hi;
};

struct BlowupDiagnostics {
    std::vector<DiagnosticsSample> samples;
    std::optional<BlowupFit> fit;
    bool blew_up = false;
};

/// Integrate until lambda_est < cfg.lambda_stop or t_max; fit
/// log lambda = alpha log(T_est - t) + c over the final decade by
/// least squares with a golden-section search in T_est.
/// When `final_state` is supplied, the end-of-run state is copied there;
/// `on_sample` streams each diagnostics row as it is recorded.
BlowupDiagnostics run_and_fit(const SimConfig& cfg, SimState state, SimState* final_state = nullptr,
                              const std::function<void(const DiagnosticsSample&)>& on_sample = {});

/// Fit alone, for pre-recorded series.
std::optional<BlowupFit> fit_rate(const std::vector<DiagnosticsSample>& samples);

} // namespace evolve
} // namespace llgblow
