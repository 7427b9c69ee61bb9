"""Gauss collocation tableaux and stage extrapolation coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    name: str = ""

    @property
    def s(self) -> int:
        return len(self.b)

    @cached_property
    def extrapolation(self) -> np.ndarray:
        return extrapolation_coeffs(self.c)

    def key(self):
        return (self.name, self.A.tobytes(), self.b.tobytes())


def _tableau(A, b, name):
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    return ButcherTableau(A=A, b=b, c=A.sum(axis=1), name=name)


def gauss_tableau(s: int) -> ButcherTableau:
    """s-stage Gauss collocation method, s in {1, 2, 3}, in closed form."""
    if s == 1:
        return _tableau([[0.5]], [1.0], "gauss1")
    if s == 2:
        r3 = np.sqrt(3.0)
        return _tableau(
            [[0.25, 0.25 - r3 / 6.0], [0.25 + r3 / 6.0, 0.25]],
            [0.5, 0.5],
            "gauss2",
        )
    if s == 3:
        r15 = np.sqrt(15.0)
        return _tableau(
            [
                [5 / 36, 2 / 9 - r15 / 15, 5 / 36 - r15 / 30],
                [5 / 36 + r15 / 24, 2 / 9, 5 / 36 - r15 / 24],
                [5 / 36 + r15 / 30, 2 / 9 + r15 / 15, 5 / 36],
            ],
            [5 / 18, 4 / 9, 5 / 18],
            "gauss3",
        )
    raise InvalidArgumentError(f"Gauss tableaux are available for s in 1..3, got {s}")


def check_symplectic(t: ButcherTableau) -> float:
    """Max residual of ``b_i a_ij + b_j a_ji - b_i b_j``."""
    b, A = t.b, t.A
    M = b[:, None] * A + (b[:, None] * A).T - np.outer(b, b)
    return float(np.max(np.abs(M)))


def extrapolation_coeffs(c) -> np.ndarray:
    """Lagrange weights predicting stage values of the next step.

    Interpolation abscissae are ``{0, c_1, ..., c_s}`` (in units of the step,
    measured from the start of the previous step); row ``i`` evaluates the
    interpolant at ``1 + c_i``. Column 0 weights the previous step value,
    column ``j`` its ``j``-th stage.
    """
    c = np.asarray(c, dtype=float)
    nodes = np.concatenate(([0.0], c))
    if np.any(c == 0.0):
        raise InvalidArgumentError("extrapolation nodes must be nonzero")
    if len(np.unique(nodes)) != len(nodes):
        raise InvalidArgumentError("extrapolation nodes must be distinct")
    targets = 1.0 + c
    E = np.ones((len(c), len(nodes)))
    for j, xj in enumerate(nodes):
        for k, xk in enumerate(nodes):
            if k != j:
                E[:, j] *= (targets - xk) / (xj - xk)
    return E
