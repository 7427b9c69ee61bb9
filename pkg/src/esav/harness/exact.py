"""Exact solutions and initial conditions for the benchmark problems."""

from __future__ import annotations

import warnings

import numpy as np

from ..errors import InvalidArgumentError
from ..grid import Grid

TWO_PI = 2.0 * np.pi

# -- NLS ------------------------------------------------------------------


def plane_wave_frequency(A, c1, c2, beta):
    return c1 * c1 + c2 * c2 - beta * A * A


def exact_nls_plane_wave(A, c1, c2, beta, x, y, t):
    """``A exp(i (c1 x + c2 y - omega t))`` with ``omega = c1^2 + c2^2 - beta A^2``."""
    omega = plane_wave_frequency(A, c1, c2, beta)
    return A * np.exp(1j * (c1 * np.asarray(x) + c2 * np.asarray(y) - omega * t))


def _integer_phase(grid: Grid, c1, c2):
    """Phase ``c1 x + c2 y`` built from integer indices, or None if not applicable.

    On a 2pi-periodic box with integer wavenumbers the phase at node (j, k)
    is ``(c1 j + c2 k mod N) h`` when both directions share ``N``; computing it
    this way keeps the discrete symmetries of the plane wave exact, which
    matters because the focusing plane wave is modulationally unstable.
    """
    n = grid.counts[0]
    if grid.counts[1] != n or float(c1) != int(c1) or float(c2) != int(c2):
        return None
    if any(abs(L - TWO_PI) > 1e-12 for L in grid.lengths):
        return None
    j = np.arange(n)
    idx = (int(c1) * j[:, None] + int(c2) * j[None, :]) % n
    shift = c1 * grid.bounds[0][0] + c2 * grid.bounds[1][0]
    return idx * (TWO_PI / n) + shift


def nls_plane_wave_state(grid: Grid, A=1.0, c1=1.0, c2=1.0, beta=1.0, t=0.0) -> np.ndarray:
    """Plane wave sampled on the grid as ``(Re u, Im u)``."""
    phase = _integer_phase(grid, c1, c2)
    if phase is None:
        X, Y = grid.mesh()
        phase = c1 * X + c2 * Y
    theta = phase - plane_wave_frequency(A, c1, c2, beta) * t
    return A * np.stack((np.cos(theta), np.sin(theta)))


def nls_singular_state(grid: Grid) -> np.ndarray:
    """``u0 = (1 + sin x)(2 + sin y)``, real."""
    X, Y = grid.mesh()
    return np.stack(((1.0 + np.sin(X)) * (2.0 + np.sin(Y)), np.zeros(grid.shape)))


# -- sine-Gordon ----------------------------------------------------------

SG_DOMAINS = {"ring": ((-7.0, 7.0), (-7.0, 7.0)), "four-collision": ((-30.0, 10.0), (-30.0, 10.0))}


def sg_initial(kind: str, grid: Grid) -> np.ndarray:
    """Initial ``(u, u_t)`` for the ring soliton or the four-ring collision.

    The collision data is a single ring centred at (-3, -7) mirrored across
    ``x = -10`` and ``y = -10``; with the 40-periodic box this gives four
    rings symmetric about the lines ``x = -10`` and ``y = 10``.
    """
    if kind not in SG_DOMAINS:
        raise InvalidArgumentError(f"unknown sine-Gordon initial condition {kind!r}")
    if grid.dim != 2:
        raise InvalidArgumentError("sine-Gordon initial data needs a 2D grid")
    expected = SG_DOMAINS[kind]
    if any(abs(a - b) > 1e-12 for got, want in zip(grid.bounds, expected) for a, b in zip(got, want)):
        warnings.warn(f"{kind} initial data is normally posed on {expected}, got {grid.bounds}",
                      stacklevel=2)
    X, Y = grid.mesh()
    if kind == "ring":
        u = 4.0 * np.arctan(np.exp(3.0 - np.hypot(X, Y)))
        return np.stack((u, np.zeros_like(u)))
    Xm = -10.0 + np.abs(X + 10.0)
    Ym = -10.0 + np.abs(Y + 10.0)
    g = np.exp(3.0 - np.hypot(Xm + 3.0, Ym + 7.0)) / 0.436
    return np.stack((4.0 * np.arctan(g), 4.13 / np.cosh(g)))


# -- KdV ------------------------------------------------------------------

KDV_ONE_ALPHA = 0.0013020833
KDV_ONE_GAMMA = 1.0 / 3.0
KDV_ONE_BOUNDS = (-3.0, 5.0)
KDV_TWO_BOUNDS = (-40.0, 40.0)


def wrap_interval(theta, lo, hi):
    """Map ``theta`` into ``[lo, hi]`` by remainder on the period ``hi - lo``."""
    theta = np.asarray(theta, dtype=float)
    period = hi - lo
    below = hi - np.fmod(hi - theta, period)
    above = lo + np.fmod(theta - lo, period)
    return np.where(theta < lo, below, np.where(theta > hi, above, theta))


def exact_kdv_one_soliton(gamma, alpha, bounds, x, t):
    """Periodically wrapped soliton ``3 gamma sech^2(sqrt(gamma / 4 alpha) (x - gamma t))``."""
    if not (alpha > 0 and gamma > 0):
        raise InvalidArgumentError("one-soliton needs alpha > 0 and gamma > 0")
    lo, hi = bounds
    arg = np.sqrt(gamma / (4.0 * alpha)) * wrap_interval(np.asarray(x) - gamma * t, lo, hi)
    return 3.0 * gamma / np.cosh(arg) ** 2


KDV_TWO = {"k1": 0.4, "k2": 0.6, "shift1": 4.0, "shift2": 15.0}


def exact_kdv_two_soliton(x, t):
    """Two-soliton solution of ``u_t + u_xxx + u u_x = 0``."""
    k1, k2 = KDV_TWO["k1"], KDV_TWO["k2"]
    rho = (k1 - k2) / (k1 + k2)
    x = np.asarray(x, dtype=float)
    e1 = np.exp(k1 * x - k1**3 * t + KDV_TWO["shift1"])
    e2 = np.exp(k2 * x - k2**3 * t + KDV_TWO["shift2"])
    e12 = e1 * e2
    num = k1**2 * e1 + k2**2 * e2 + 2.0 * (k2 - k1) ** 2 * e12 + rho**2 * (k2**2 * e1 + k1**2 * e2) * e12
    den = 1.0 + e1 + e2 + rho**2 * e12
    return 12.0 * num / den**2
