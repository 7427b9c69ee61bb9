"""Fast invariant checks runnable without the test suite."""

from __future__ import annotations

import numpy as np

from ..grid import apply_derivative, diff_matrix, make_grid
from ..integrators import SchemeConfig, integrate
from ..linsolve import dense_oracle, solve_cn, solve_stage_system
from ..models import kdv_model, nls_model, sg_model
from ..tableaux import check_symplectic, extrapolation_coeffs, gauss_tableau


def _models():
    g2 = make_grid([(0.0, 2 * np.pi)] * 2, (8, 8))
    X, Y = g2.mesh()
    nls = nls_model(1.0, g2)
    z_nls = 0.5 * np.stack((1 + 0.3 * np.sin(X), 0.2 * np.cos(Y)))
    gs = make_grid([(-7.0, 7.0)] * 2, (8, 8))
    X, Y = gs.mesh()
    sg = sg_model(1.0, gs)
    z_sg = np.stack((4 * np.arctan(np.exp(3 - np.hypot(X, Y))), np.zeros(gs.shape)))
    gk = make_grid((-8.0, 8.0), 16)
    x = gk.points(0)
    kdv = kdv_model(1.0, 1.0, gk)
    z_kdv = (0.5 / np.cosh(x / 2) ** 2)[None]
    return [(nls, z_nls), (sg, z_sg), (kdv, z_kdv)]


def check_tableaux():
    worst = max(check_symplectic(gauss_tableau(s)) for s in (1, 2, 3))
    E = extrapolation_coeffs(gauss_tableau(2).c)
    rows = float(np.max(np.abs(E.sum(axis=1) - 1.0)))
    return worst < 1e-15 and rows < 1e-12, f"symplecticity residual {worst:.1e}"


def check_derivatives():
    g = make_grid((0.0, 2 * np.pi), 16)
    x = g.points(0)
    f = np.sin(3 * x) + np.cos(x)
    err = 0.0
    for order, exact in ((1, 3 * np.cos(3 * x) - np.sin(x)), (2, -9 * np.sin(3 * x) - np.cos(x))):
        err = max(err, np.max(np.abs(apply_derivative(f, g, 0, order) - exact)))
        err = max(err, np.max(np.abs(diff_matrix(g, 0, order) @ f - exact)))
    return err < 1e-11, f"derivative error {err:.1e}"


def check_solvers():
    rng = np.random.default_rng(0)
    worst = 0.0
    for model, _ in _models():
        rhs = rng.standard_normal(model.state_shape)
        worst = max(worst, np.max(np.abs(solve_cn(model, rhs, 0.1, 0.5)
                                         - dense_oracle(model, 0.1, rhs, gamma=0.5))))
        tab = gauss_tableau(2)
        f = rng.standard_normal((2, *model.state_shape))
        got = solve_stage_system(model, tab, 0.1, rhs, f)
        want = dense_oracle(model, 0.1, rhs, tableau=tab, forcing=f)
        worst = max(worst, np.max(np.abs(got - want)))
    return worst < 1e-10, f"FFT vs dense solve {worst:.1e}"


def check_conservation():
    worst = 0.0
    for model, z0 in _models():
        for scheme, s in (("SAV-CN", 2), ("ESAV-CN", 2), ("ESAV-GAUSS", 2), ("ESAV-GAUSS-PC", 3)):
            tr = integrate(model, SchemeConfig(scheme, 0.01, stages=s), z0, 0.5)
            H = np.array([tr.H_mod0, *tr.H_mod])
            worst = max(worst, float(np.max(np.abs(np.diff(H)))) / (1 + abs(H[0])))
    return worst < 1e-11, f"worst per-step relative residual {worst:.1e}"


CHECKS = {
    "tableaux": check_tableaux,
    "derivatives": check_derivatives,
    "solvers": check_solvers,
    "conservation": check_conservation,
}


def run_selftest(echo=print) -> bool:
    ok_all = True
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn()
        except Exception as exc:  # report and keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        ok_all &= ok
        echo(f"{'PASS' if ok else 'FAIL'}  {name:<13} {detail}")
    return ok_all
