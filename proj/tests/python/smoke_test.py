"""Smoke tests for the python bindings (run via ctest with PYTHONPATH set)."""

import math
import sys

try:
    import _llgblow as llg
except ImportError:
    import llgblow as llg


def approx(a, b, tol=1e-10):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    pp = llg.PhysParams(0.8, 0.6)
    approx(pp.a**2 + pp.b**2, 1.0, 1e-14)

    w, w_rho, sin_w, cos_w = llg.profile_w(1.0)
    approx(w, math.pi / 2)
    approx(w_rho, -1.0)
    approx(sin_w, 1.0)

    frame = llg.bubble_frame([1.0, 0.0])
    approx(frame["W"][0], 1.0)
    approx(frame["grad_sq"], 2.0)

    b = llg.BubbleParams(2.0, 0.0, [0.0, 0.0])
    U = llg.bubble_field(b, [2.0, 0.0])
    approx(U[0], 1.0, 1e-12)

    # moment table
    rows = llg.moment_table()
    expected = [-1.0, 0.0, 5.0 / 3.0 - math.log(4.0), 0.8, 1.0, 0.0]
    for (name, computed, exp), target in zip(rows, expected):
        approx(exp, target, 1e-14)
        approx(computed, target, 1e-8)

    # K0 closed form
    k0 = llg.kernel_K0(4.0, llg.PhysParams(1.0, 0.0))
    approx(k0.real, (1.0 - math.exp(-1.0)) / 2.0, 1e-13)
    approx(k0.imag, 0.0, 1e-13)

    # feasibility box
    g = llg.sample_solution_box([0.5] * 8)
    ok, violations = llg.param_feasible(g)
    assert ok, violations
    g.Theta = 0.5
    ok, violations = llg.param_feasible(g)
    assert not ok and len(violations) >= 1

    # distorted eigenfunction at xi = 0
    rho = [0.01 * 1.3**i for i in range(30)]
    vals = llg.distorted_eigenfunction(0.0, rho)
    for r, v in zip(rho, vals):
        exact = r**2.5 / (1 + r * r)
        assert abs(v - exact) <= 1e-8 * exact

    # one simulator step keeps the profile on the sphere
    cfg = llg.SimConfig()
    cfg.n_nodes = 300
    cfg.r_outer = 5.0
    st = llg.initial_bubble(cfg, 1.0)
    llg.step(st, cfg)
    for v in st.v:
        approx(v[0] ** 2 + v[1] ** 2 + v[2] ** 2, 1.0, 1e-12)

    # history + B0
    hist = llg.ParamHistory.rate_ansatz(1e-3)
    lam = abs(hist.p(5e-4))
    b0 = llg.b0_apply(hist, 5e-4, lam)
    assert b0.real < 0.0  # shrinking bubble drives a negative mode-0 forcing

    failures, text = llg.verify(7)
    assert failures == 0, text

    print("python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
