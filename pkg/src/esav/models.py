"""
Hamiltonian PDEs in the split form ``z_t = D mu``, ``mu = L z + N'(z)``.

``D`` is skew-adjoint, ``L`` symmetric non-negative, and both have constant
coefficients, so each is described per Fourier mode by an ``m x m`` block.
Blocks are assembled from a small table of terms so that the same description
yields the FFT symbols and the dense matrices used by the oracle solvers:

    "id"             identity
    ("d", dim, k)    k-th spectral derivative along ``dim``

The energy is ``H = 1/2 (z, L z)_h + (N(z), 1)_h = H1 + H2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError
from .grid import Grid, diff_matrix, fft, ifft, inner_h

ID = "id"


def _d(dim, order):
    return ("d", dim, order)


def _laplacian(grid, coeff=1.0):
    return {_d(k, 2): coeff for k in range(grid.dim)}


@dataclass(frozen=True, eq=False)
class HamiltonianModel:
    """Descriptor bundling ``D``, ``L``, ``N`` and ``N'`` on a grid."""

    name: str
    grid: Grid
    D_terms: tuple
    L_terms: tuple
    density: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.D_terms)

    @property
    def state_shape(self) -> tuple[int, ...]:
        return (self.m, *self.grid.shape)

    def _symbol_blocks(self, terms):
        g = self.grid
        out = np.zeros((g.size, self.m, self.m), dtype=complex)
        for a, row in enumerate(terms):
            for b, entry in enumerate(row):
                acc = np.zeros(g.shape, dtype=complex)
                for term, coeff in entry.items():
                    acc = acc + coeff * (1.0 if term == ID else g.symbol_nd(term[1], term[2]))
                out[:, a, b] = np.broadcast_to(acc, g.shape).ravel()
        return out

    @cached_property
    def D_modes(self) -> np.ndarray:
        """Per-mode blocks of ``D``, shape ``(K, m, m)`` with K modes in FFT order."""
        return self._symbol_blocks(self.D_terms)

    @cached_property
    def L_modes(self) -> np.ndarray:
        return self._symbol_blocks(self.L_terms)

    @cached_property
    def DL_modes(self) -> np.ndarray:
        return self.D_modes @ self.L_modes

    @cached_property
    def blocks(self):
        from .linsolve import ModeBlocks

        return ModeBlocks(self)

    def _apply_modes(self, blocks, z):
        z = np.asarray(z)
        lead = z.shape[: z.ndim - self.grid.dim - 1]
        zh = fft(z, self.grid).reshape(-1, self.m, self.grid.size)
        out = np.einsum("kab,lbk->lak", blocks, zh)
        return ifft(out.reshape(*lead, self.m, *self.grid.shape), self.grid)

    def apply_D(self, z):
        return self._apply_modes(self.D_modes, z)

    def apply_L(self, z):
        return self._apply_modes(self.L_modes, z)

    def apply_DL(self, z):
        return self._apply_modes(self.DL_modes, z)

    def H1(self, z) -> float:
        return 0.5 * inner_h(z, self.apply_L(z), self.grid)

    def H2(self, z) -> float:
        return self.grid.cell * float(np.sum(self.density(z)))

    def _dense(self, terms):
        g = self.grid
        n = g.size
        mats = {}

        def term_matrix(term):
            if term == ID:
                return np.eye(n)
            if term not in mats:
                _, dim, order = term
                factors = [np.eye(c) for c in g.counts]
                factors[dim] = diff_matrix(g, dim, order)
                full = factors[0]
                for f in factors[1:]:
                    full = np.kron(full, f)
                mats[term] = full
            return mats[term]

        out = np.zeros((self.m * n, self.m * n))
        for a, row in enumerate(terms):
            for b, entry in enumerate(row):
                for term, coeff in entry.items():
                    out[a * n:(a + 1) * n, b * n:(b + 1) * n] += coeff * term_matrix(term)
        return out

    def dense_D(self) -> np.ndarray:
        """``D`` as a dense real matrix acting on the flattened state."""
        return self._dense(self.D_terms)

    def dense_L(self) -> np.ndarray:
        return self._dense(self.L_terms)


def energy(model: HamiltonianModel, z) -> tuple[float, float, float]:
    """Return ``(H, H1, H2)``."""
    h1 = model.H1(z)
    h2 = model.H2(z)
    return h1 + h2, h1, h2


def _require_dim(grid, dim, name):
    if grid.dim != dim:
        raise InvalidArgumentError(f"{name} needs a {dim}D grid, got {grid.dim}D")


def nls_model(beta: float, grid: Grid, energy_sign: int = 1) -> HamiltonianModel:
    """``i u_t + Lap u + beta |u|^2 u = 0`` as a real system in ``z = (p, q)``, ``u = p + i q``.

    With ``energy_sign=1`` the energy is ``1/2 |grad u|^2 - beta/4 |u|^4`` and
    ``L = -Lap`` is non-negative. ``energy_sign=-1`` negates the Hamiltonian
    and ``D`` together (same PDE): ``L = Lap``, ``N = beta/4 |u|^4``. The
    auxiliary variables see a different ``H2`` under the two conventions, so
    SAV/ESAV trajectories differ at O(tau^2).
    """
    _require_dim(grid, 2, "NLS")
    if energy_sign not in (1, -1):
        raise InvalidArgumentError(f"energy_sign must be +1 or -1, got {energy_sign!r}")
    beta, sg = float(beta), float(energy_sign)
    lap = _laplacian(grid, -sg)

    def density(z):
        return -sg * 0.25 * beta * (z[0] ** 2 + z[1] ** 2) ** 2

    def gradient(z):
        return -sg * beta * (z[0] ** 2 + z[1] ** 2) * z

    return HamiltonianModel(
        name="nls",
        grid=grid,
        D_terms=(({}, {ID: sg}), ({ID: -sg}, {})),
        L_terms=((lap, {}), ({}, lap)),
        density=density,
        gradient=gradient,
        params={"beta": beta, "energy_sign": int(energy_sign)},
    )


def sg_model(phi, grid: Grid) -> HamiltonianModel:
    """``u_tt - Lap u + phi sin u = 0`` with ``z = (u, u_t)``.

    ``phi`` may be a scalar or an array over the grid.
    """
    _require_dim(grid, 2, "sine-Gordon")
    phi_arr = np.broadcast_to(np.asarray(phi, dtype=float), grid.shape).copy()
    phi_arr.setflags(write=False)

    def density(z):
        return phi_arr * (1.0 - np.cos(z[0]))

    def gradient(z):
        out = np.zeros_like(z)
        out[0] = phi_arr * np.sin(z[0])
        return out

    return HamiltonianModel(
        name="sg",
        grid=grid,
        D_terms=(({}, {ID: 1.0}), ({ID: -1.0}, {})),
        L_terms=((_laplacian(grid, -1.0), {}), ({}, {ID: 1.0})),
        density=density,
        gradient=gradient,
        params={"phi": phi_arr},
    )


def kdv_model(alpha: float, beta: float, grid: Grid) -> HamiltonianModel:
    """``u_t + alpha u_xxx + beta u u_x = 0`` with ``D = d_x`` and ``L = -alpha d_xx``."""
    _require_dim(grid, 1, "KdV")
    if not alpha > 0:
        raise InvalidArgumentError(f"KdV dispersion alpha must be positive, got {alpha}")
    alpha, beta = float(alpha), float(beta)

    def density(z):
        return -(beta / 6.0) * z[0] ** 3

    def gradient(z):
        return -(beta / 2.0) * z**2

    return HamiltonianModel(
        name="kdv",
        grid=grid,
        D_terms=(({_d(0, 1): 1.0},),),
        L_terms=(({_d(0, 2): -alpha},),),
        density=density,
        gradient=gradient,
        params={"alpha": alpha, "beta": beta},
    )
