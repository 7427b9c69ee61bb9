"""
Linearly implicit energy-preserving time steppers.

Schemes
-------
SAV-CN          Crank-Nicolson on the SAV system, nonlinear field extrapolated
                from ``(3 z^n - z^{n-1}) / 2``; conserves ``H1 + w^2``.
ESAV-CN         Crank-Nicolson on the ESAV system with both ``z`` and ``e``
                extrapolated; conserves ``H1 + C0 ln e``.
ESAV-GAUSS      s-stage Gauss method on the ESAV system, the nonlinear field at
                each stage taken from a Lagrange extrapolation of the previous
                step's solution and stages.
ESAV-GAUSS-PC   Same prediction followed by conservative fixed-point
                corrections; recovers the order of the Gauss method.
GAUSS-IMPLICIT  Fully implicit Gauss method on the ESAV system, fixed-point
                iteration seeded with ``(z^n, e^n)``.

All ESAV steppers work with ``r = ln e``. Two-step schemes are bootstrapped
with one fully implicit step (implicit midpoint for the CN schemes, the
s-stage Gauss method for the RK schemes).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateStepError, InvalidArgumentError, NonConvergenceError
from .grid import inner_h, norm_inf
from .linsolve import solve_cn, stage_solve
from .reformulation import (
    esav_B,
    esav_init,
    modified_energy_esav,
    modified_energy_sav,
    safe_exp,
    sav_A,
    sav_init,
)
from .tableaux import ButcherTableau, gauss_tableau

log = logging.getLogger(__name__)

SCHEMES = ("SAV-CN", "ESAV-CN", "ESAV-GAUSS", "ESAV-GAUSS-PC", "GAUSS-IMPLICIT")
RK_SCHEMES = ("ESAV-GAUSS", "ESAV-GAUSS-PC", "GAUSS-IMPLICIT")
#: Sweep budget of the implicit first step of the two-step schemes (never below ``max_iter``).
BOOTSTRAP_MAX_ITER = 100


@dataclass
class SchemeConfig:
    scheme: str
    tau: float
    stages: int = 2
    tol: float = 1e-12
    max_iter: int = 50
    C0: float | None = None
    sweeps: int | None = None

    def __post_init__(self):
        self.scheme = self.scheme.upper()
        if self.scheme not in SCHEMES:
            raise InvalidArgumentError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if not self.tau > 0:
            raise InvalidArgumentError(f"time step must be positive, got {self.tau}")
        if not self.tol > 0:
            raise InvalidArgumentError(f"tolerance must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise InvalidArgumentError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.scheme in RK_SCHEMES and self.stages not in (1, 2, 3):
            raise InvalidArgumentError(f"stages must be 1, 2 or 3, got {self.stages}")
        if self.sweeps is not None and (self.scheme != "ESAV-GAUSS-PC" or self.sweeps < 1):
            raise InvalidArgumentError("a forced sweep count needs ESAV-GAUSS-PC and sweeps >= 1")

    @property
    def label(self) -> str:
        if self.scheme in RK_SCHEMES:
            return f"{self.scheme}{self.stages}"
        return self.scheme


@dataclass
class StepMemory:
    """What the extrapolating schemes need from the previous step."""

    z_prev: np.ndarray | None = None
    r_prev: float | None = None
    stages: np.ndarray | None = None
    stage_logs: np.ndarray | None = None

    @property
    def valid(self) -> bool:
        return self.z_prev is not None


@dataclass
class StageStep:
    z: np.ndarray
    r: float
    stages: np.ndarray
    stage_logs: np.ndarray
    iterations: int = 1
    converged: bool = True
    residual: float = 0.0


# -- second order ---------------------------------------------------------


def _sav_linear_step(model, z, w, A, tau):
    """One SAV Crank-Nicolson step for a given field ``A`` (rank-one update)."""
    g = model.grid
    DA = model.apply_D(A)
    az = inner_h(A, z, g)
    C = z + 0.5 * tau * model.apply_DL(z) + 0.25 * tau * (4.0 * w - az) * DA
    SC = solve_cn(model, C, tau, 0.5)
    SDA = solve_cn(model, DA, tau, 0.5)
    denom = 1.0 - 0.25 * tau * inner_h(A, SDA, g)
    if abs(denom) < 1e-12:
        raise DegenerateStepError(f"rank-one denominator {denom:.3e} vanished")
    az_new = inner_h(A, SC, g) / denom
    z_new = SC + 0.25 * tau * az_new * SDA
    w_new = w + 0.5 * inner_h(A, z_new - z, g)
    return z_new, w_new


def step_sav_cn(model, z, w, memory: StepMemory, tau, C0):
    if not memory.valid:
        raise InvalidArgumentError("SAV-CN needs z^{n-1}; bootstrap the first step")
    zbar = 0.5 * (3.0 * z - memory.z_prev)
    return _sav_linear_step(model, z, w, sav_A(model, zbar, C0), tau)


def step_sav_midpoint(model, z, w, tau, C0, tol=1e-12, max_iter=50):
    """Implicit midpoint on the SAV system by fixed-point iteration.

    Returns ``(z_new, w_new, iterations)``.
    """
    z_new, w_new = z, w
    for it in range(1, max_iter + 1):
        A = sav_A(model, 0.5 * (z + z_new), C0)
        z_next, w_next = _sav_linear_step(model, z, w, A, tau)
        resid = max(norm_inf(z_next - z_new), abs(w_next - w_new))
        z_new, w_new = z_next, w_next
        if resid < tol:
            return z_new, w_new, it
    raise NonConvergenceError(
        f"SAV midpoint iteration stalled at residual {resid:.3e}", residual=resid, iterations=max_iter
    )


def step_esav_cn(model, z, r, memory: StepMemory, tau, C0):
    if not memory.valid:
        raise InvalidArgumentError("ESAV-CN needs z^{n-1}, r^{n-1}; bootstrap the first step")
    zbar = 0.5 * (3.0 * z - memory.z_prev)
    ebar = 0.5 * (3.0 * safe_exp(r) - safe_exp(memory.r_prev))
    B = esav_B(model, zbar, ebar, C0)
    rhs = z + tau * model.apply_D(0.5 * model.apply_L(z) + B)
    z_new = solve_cn(model, rhs, tau, 0.5)
    r_new = r + inner_h(B, z_new - z, model.grid) / C0
    return z_new, r_new


# -- Runge-Kutta ----------------------------------------------------------


def _stage_solve(model, tableau, tau, z, r, forcing, C0):
    """Linear stage solve with frozen forcing; returns stages, slopes k and stage logs."""
    g = model.grid
    stages, k = stage_solve(model, tableau, tau, z, forcing)
    l = np.array([inner_h(forcing[i], k[i], g) for i in range(tableau.s)]) / C0
    return stages, k, l, r + tau * (tableau.A @ l)


def _finish(tableau, tau, z, r, k, l):
    z_new = z + tau * np.tensordot(tableau.b, k, axes=1)
    return z_new, r + tau * float(tableau.b @ l)


def _forcing(model, zs, es, C0):
    return np.stack([esav_B(model, zs[i], es[i], C0) for i in range(len(es))])


def _fixed_point(model, tableau, tau, z, r, C0, seed_z, seed_e, tol, max_iter):
    zi, ei = seed_z, np.asarray(seed_e, dtype=float)
    resid = np.inf
    for it in range(1, max_iter + 1):
        forcing = _forcing(model, zi, ei, C0)
        stages, k, l, logs = _stage_solve(model, tableau, tau, z, r, forcing, C0)
        e_new = np.array([safe_exp(x) for x in logs])
        resid = max(norm_inf(stages - zi), float(np.max(np.abs(e_new - ei))))
        zi, ei = stages, e_new
        if resid < tol:
            break
    z_new, r_new = _finish(tableau, tau, z, r, k, l)
    return StageStep(z_new, r_new, stages, logs, it, bool(resid < tol), float(resid))


def step_gauss_implicit(model, z, r, tableau: ButcherTableau, tau, C0, tol=1e-12, max_iter=50):
    """Fully implicit Gauss step seeded with ``(z^n, e^n)``; raises if not converged."""
    s = tableau.s
    seed_z = np.broadcast_to(z, (s, *z.shape))
    seed_e = np.full(s, safe_exp(r))
    out = _fixed_point(model, tableau, tau, z, r, C0, seed_z, seed_e, tol, max_iter)
    if not out.converged:
        raise NonConvergenceError(
            f"implicit Gauss iteration stalled at residual {out.residual:.3e} after {max_iter} sweeps",
            residual=out.residual,
            iterations=max_iter,
        )
    return out


def extrapolate_stages(tableau, memory: StepMemory):
    """Predicted stage values ``(z_{s,i}, e_{s,i})`` from the previous step."""
    if not memory.valid or memory.stages is None:
        raise InvalidArgumentError("stage extrapolation needs the previous step's stages")
    E = tableau.extrapolation
    hist_z = np.concatenate((memory.z_prev[None], memory.stages))
    hist_e = np.array([safe_exp(x) for x in (memory.r_prev, *memory.stage_logs)])
    return np.tensordot(E, hist_z, axes=1), E @ hist_e


def step_esav_gauss(model, z, r, tableau: ButcherTableau, memory: StepMemory, tau, C0):
    zs, es = extrapolate_stages(tableau, memory)
    forcing = _forcing(model, zs, es, C0)
    stages, k, l, logs = _stage_solve(model, tableau, tau, z, r, forcing, C0)
    z_new, r_new = _finish(tableau, tau, z, r, k, l)
    return StageStep(z_new, r_new, stages, logs)


def step_esav_gauss_pc(model, z, r, tableau: ButcherTableau, memory: StepMemory, tau, C0,
                       tol=1e-12, max_iter=50, sweeps=None):
    """Extrapolated prediction plus at most ``max_iter`` correction sweeps.

    Hitting ``max_iter`` is not an error: the last iterate is used and
    ``converged`` is False. With ``sweeps`` set, exactly that many sweeps are
    done and the tolerance is ignored.
    """
    zs, es = extrapolate_stages(tableau, memory)
    if sweeps is not None:
        out = _fixed_point(model, tableau, tau, z, r, C0, zs, es, -np.inf, sweeps)
        out.converged = True
        return out
    return _fixed_point(model, tableau, tau, z, r, C0, zs, es, tol, max_iter)


# -- driver ---------------------------------------------------------------


@dataclass
class Trajectory:
    scheme: SchemeConfig
    z: np.ndarray
    aux: float
    C0: float
    H_mod0: float
    H0: float
    times: list = field(default_factory=list)
    H_mod: list = field(default_factory=list)
    H: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    iteration_steps: list = field(default_factory=list)
    bootstrap_iterations: int = 0
    warnings: list = field(default_factory=list)
    steps: int = 0

    @property
    def max_iterations(self) -> int:
        return max(self.iterations, default=0)

    @property
    def max_drift(self) -> float:
        if not self.H_mod:
            return 0.0
        return float(np.max(np.abs(np.asarray(self.H_mod) - self.H_mod0)))


def step_count(t_end: float, tau: float) -> int:
    n = int(round(t_end / tau))
    if abs(n * tau - t_end) > 1e-12 * max(1.0, abs(t_end)):
        raise InvalidArgumentError(f"t_end={t_end} is not an integer multiple of tau={tau}")
    return n


Observer = Callable[[int, float, np.ndarray, float], None]


def integrate(model, scheme: SchemeConfig, z0, t_end: float,
              observers: Sequence[Observer] = (), every: int = 1) -> Trajectory:
    """Advance ``z0`` to ``t_end`` with a fixed step.

    Energies are recorded every ``every`` steps (and at the final step);
    observers are called as ``obs(step, t, z, aux)`` at the same cadence,
    where ``aux`` is ``w`` for SAV-CN and ``ln e`` otherwise.
    """
    n_steps = step_count(t_end, scheme.tau)
    tau, tol, cap = scheme.tau, scheme.tol, scheme.max_iter
    boot_cap = max(cap, BOOTSTRAP_MAX_ITER)
    z = np.array(z0, dtype=float)
    if z.shape != model.state_shape:
        raise InvalidArgumentError(f"initial state shape {z.shape} != {model.state_shape}")
    sav = scheme.scheme == "SAV-CN"
    if sav:
        st = sav_init(model, z, scheme.C0)
        aux = st.w
        menergy = lambda zz, a: modified_energy_sav(model, zz, a)  # noqa: E731
    else:
        st = esav_init(model, z, scheme.C0)
        aux = st.r
        menergy = lambda zz, a: modified_energy_esav(model, zz, a, C0)  # noqa: E731
    C0 = st.C0
    tableau = gauss_tableau(scheme.stages) if scheme.scheme in RK_SCHEMES else gauss_tableau(1)
    traj = Trajectory(scheme, z, aux, C0, H_mod0=menergy(z, aux), H0=model.H1(z) + model.H2(z))
    memory = StepMemory()

    for n in range(n_steps):
        iters = 0
        if sav:
            if n == 0:
                z_new, aux_new, traj.bootstrap_iterations = step_sav_midpoint(
                    model, z, aux, tau, C0, tol, boot_cap)
            else:
                z_new, aux_new = step_sav_cn(model, z, aux, memory, tau, C0)
            memory = StepMemory(z_prev=z)
        elif scheme.scheme == "ESAV-CN":
            if n == 0:
                out = step_gauss_implicit(model, z, aux, tableau, tau, C0, tol, boot_cap)
                z_new, aux_new = out.z, out.r
                traj.bootstrap_iterations = out.iterations
            else:
                z_new, aux_new = step_esav_cn(model, z, aux, memory, tau, C0)
            memory = StepMemory(z_prev=z, r_prev=aux)
        else:
            if n == 0 or scheme.scheme == "GAUSS-IMPLICIT":
                limit = cap if scheme.scheme == "GAUSS-IMPLICIT" else boot_cap
                out = step_gauss_implicit(model, z, aux, tableau, tau, C0, tol, limit)
                if scheme.scheme == "GAUSS-IMPLICIT":
                    iters = out.iterations
                else:
                    traj.bootstrap_iterations = out.iterations
            elif scheme.scheme == "ESAV-GAUSS":
                out = step_esav_gauss(model, z, aux, tableau, memory, tau, C0)
            else:
                out = step_esav_gauss_pc(model, z, aux, tableau, memory, tau, C0, tol, cap,
                                         scheme.sweeps)
                iters = out.iterations
                if not out.converged:
                    msg = f"step {n + 1}: PC correction stopped at residual {out.residual:.3e}"
                    log.warning(msg)
                    traj.warnings.append(msg)
            z_new, aux_new = out.z, out.r
            memory = StepMemory(z_prev=z, r_prev=aux, stages=out.stages, stage_logs=out.stage_logs)
        z, aux = z_new, aux_new
        if not np.all(np.isfinite(z)):
            raise FloatingPointError(f"non-finite state after step {n + 1}")
        if scheme.scheme in ("ESAV-GAUSS-PC", "GAUSS-IMPLICIT") and (n > 0 or iters):
            traj.iterations.append(iters)
            traj.iteration_steps.append(n + 1)
        step = n + 1
        if step % every == 0 or step == n_steps:
            t = step * tau
            traj.times.append(t)
            traj.H_mod.append(menergy(z, aux))
            traj.H.append(model.H1(z) + model.H2(z))
            for obs in observers:
                obs(step, t, z, aux)
    traj.z, traj.aux, traj.steps = z, aux, n_steps
    return traj
