"""Single runs, convergence studies and scheme comparisons."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ..grid import norm_h, norm_inf
from ..integrators import RK_SCHEMES, Trajectory, integrate
from .config import RunConfig, build_grid, build_model, exact_state, initial_state, parse_scheme_label


def state_errors(z, z_exact, grid) -> tuple[float, float]:
    """Discrete L2 and max-norm of ``z - z_exact`` over all components.

    For NLS the components are ``(Re u, Im u)``, so this is the error of the
    complex field.
    """
    diff = np.asarray(z) - np.asarray(z_exact)
    return norm_h(diff, grid), norm_inf(diff)


def observed_order(e_coarse, e_fine, tau_coarse, tau_fine):
    """``log(e_c / e_f) / log(tau_c / tau_f)``; None when undefined."""
    if not (e_coarse > 0 and e_fine > 0) or tau_coarse == tau_fine:
        return None
    return math.log(e_coarse / e_fine) / math.log(tau_coarse / tau_fine)


@dataclass
class ErrorRow:
    tau: float
    n: int
    l2: float
    linf: float
    order_l2: float | None = None
    order_linf: float | None = None
    cpu: float = 0.0


def fill_orders(rows, key="tau"):
    """Orders between adjacent rows, by step size or (``key="n"``) by mesh width."""
    for prev, row in zip(rows, rows[1:]):
        a, b = (prev.tau, row.tau) if key == "tau" else (1.0 / prev.n, 1.0 / row.n)
        row.order_l2 = observed_order(prev.l2, row.l2, a, b)
        row.order_linf = observed_order(prev.linf, row.linf, a, b)
    return rows


@dataclass
class RunResult:
    config: RunConfig
    trajectory: Trajectory | None
    z0: np.ndarray
    cpu: float
    error: ErrorRow | None = None
    failure: str | None = None


def run_single(cfg: RunConfig, snapshot_sink=None) -> RunResult:
    """Integrate one configuration; runtime failures are captured, not raised."""
    grid = build_grid(cfg)
    model = build_model(cfg, grid)
    z0 = initial_state(cfg, grid)
    tau = cfg.scheme.tau
    snap_steps = {int(round(t / tau)) for t in cfg.snapshot_times}
    result = RunResult(cfg, None, z0, 0.0)
    if 0 in snap_steps and snapshot_sink is not None:
        snapshot_sink(0, 0.0, z0)

    observers = []
    if snapshot_sink is not None and snap_steps - {0}:
        def snap(step, t, z, aux):
            if step in snap_steps:
                snapshot_sink(step, t, z)
        observers.append(snap)
        every = 1
    else:
        every = cfg.every

    t0 = time.process_time()
    try:
        traj = integrate(model, cfg.scheme, z0, cfg.t_end, observers=observers, every=every)
    except (ArithmeticError, FloatingPointError, RuntimeError, ValueError) as exc:
        result.cpu = time.process_time() - t0
        result.failure = f"{type(exc).__name__}: {exc}"
        return result
    result.cpu = time.process_time() - t0
    if every != cfg.every:
        _thin(traj, cfg.every)
    result.trajectory = traj
    sol = exact_state(cfg, grid)
    if sol is not None:
        l2, linf = state_errors(traj.z, sol(cfg.t_end), grid)
        result.error = ErrorRow(tau, grid.counts[0], l2, linf, cpu=result.cpu)
    return result


def _thin(traj, every):
    """Keep energy samples at multiples of ``every`` plus the last one."""
    keep = [i for i in range(len(traj.times))
            if (i + 1) % every == 0 or i == len(traj.times) - 1]
    traj.times = [traj.times[i] for i in keep]
    traj.H_mod = [traj.H_mod[i] for i in keep]
    traj.H = [traj.H[i] for i in keep]


@dataclass
class ExperimentReport:
    metadata: dict
    rows: list
    runs: list
    kind: str = "tau"

    @property
    def failed(self):
        return [r for r in self.runs if r.failure]


def convergence_study(cfg: RunConfig, taus) -> ExperimentReport:
    """Run ``cfg`` at each step size and tabulate errors against the exact solution."""
    if exact_state(cfg, build_grid(cfg)) is None:
        raise ValueError(f"no exact solution for initial condition {cfg.initial['kind']!r}")
    runs, rows = [], []
    for tau in taus:
        res = run_single(cfg.with_scheme(tau=float(tau)))
        runs.append(res)
        if res.error is not None:
            rows.append(res.error)
    return ExperimentReport(cfg.metadata(), fill_orders(rows), runs)


def spatial_study(cfg: RunConfig, counts) -> ExperimentReport:
    """Errors at fixed step size over a sequence of grid sizes."""
    if exact_state(cfg, build_grid(cfg)) is None:
        raise ValueError(f"no exact solution for initial condition {cfg.initial['kind']!r}")
    runs, rows = [], []
    for n in counts:
        res = run_single(cfg.with_counts(int(n)))
        runs.append(res)
        if res.error is not None:
            rows.append(res.error)
    return ExperimentReport(cfg.metadata(), fill_orders(rows, key="n"), runs, kind="n")


def compare_schemes(cfg: RunConfig, labels) -> dict:
    """Run the same problem with each scheme label (e.g. ``"ESAV-GAUSS-PC3"``)."""
    out = {}
    for label in labels:
        name, stages = parse_scheme_label(label)
        if name not in RK_SCHEMES:
            stages = cfg.scheme.stages
        out[label] = run_single(cfg.with_scheme(scheme=name, stages=stages))
    return out
