"""
Linear solves diagonalized by the FFT.

With constant-coefficient ``D`` and ``L`` every Fourier mode decouples, so a
system on the whole grid reduces to one small dense complex solve per mode:

    Crank-Nicolson   (I - g tau D^L^) x^ = r^                      (m x m)
    RK stages        (I - tau A (x) D^L^) Z^ = 1 (x) z^ + tau (A (x) D^) f^   (sm x sm)

Mode-block inverses are cached per step size and rebuilt when it changes.
``dense_oracle`` assembles the same systems from dense differentiation
matrices and solves them directly; it exists for verification.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError, SingularOperatorError
from .grid import fft, ifft

#: Mode blocks with a larger condition number are treated as singular.
MAX_CONDITION = 1e13
#: Unknown count above which the dense oracle refuses to assemble.
DENSE_LIMIT = 4096


def _invert_blocks(mats):
    cond = np.linalg.cond(mats)
    bad = ~np.isfinite(cond) | (cond > MAX_CONDITION)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise SingularOperatorError(f"mode block {k} is singular (cond={cond[k]:.3e})", mode=k)
    return np.linalg.inv(mats)


class ModeBlocks:
    """Cached per-mode inverses for one model."""

    def __init__(self, model):
        self.model = model
        self._cn = {}
        self._stage = {}

    def cn_inverse(self, tau, gamma):
        key = float(tau) * float(gamma)
        inv = self._cn.get(key)
        if inv is None:
            m = self.model.m
            mats = np.eye(m) - key * self.model.DL_modes
            inv = _invert_blocks(mats)
            self._cn = {key: inv}
        return inv

    def stage_inverse(self, tableau, tau):
        key = (tableau.key(), float(tau))
        inv = self._stage.get(key)
        if inv is None:
            mats = stage_blocks(self.model, tableau.A, tau)
            inv = _invert_blocks(mats)
            self._stage = {key: inv}
        return inv


def stage_blocks(model, A, tau):
    """``I - tau kron(A, D^L^)`` for every mode, shape ``(K, s m, s m)``."""
    A = np.asarray(A, dtype=float)
    s, m, K = A.shape[0], model.m, model.grid.size
    kron = np.einsum("ij,kab->kiajb", A, model.DL_modes).reshape(K, s * m, s * m)
    return np.eye(s * m) - tau * kron


def _check_state(model, z, lead=()):
    z = np.asarray(z, dtype=float)
    want = (*lead, *model.state_shape)
    if z.shape != want:
        raise InvalidArgumentError(f"expected array of shape {want}, got {z.shape}")
    return z


def solve_cn(model, rhs, tau: float, gamma: float) -> np.ndarray:
    """Solve ``(I - gamma tau D L) x = rhs`` mode by mode."""
    rhs = _check_state(model, rhs)
    inv = model.blocks.cn_inverse(tau, gamma)
    g = model.grid
    rh = fft(rhs, g).reshape(model.m, g.size)
    xh = np.einsum("kab,bk->ak", inv, rh)
    return ifft(xh.reshape(model.state_shape), g)


def solve_stage_system(model, tableau, tau: float, zn, forcing) -> np.ndarray:
    """Stage values of ``z_i = z^n + tau sum_j a_ij D (L z_j + f_j)``.

    ``forcing`` has shape ``(s, m, *grid.shape)``; the result has the same shape.
    """
    return stage_solve(model, tableau, tau, zn, forcing)[0]


def stage_solve(model, tableau, tau: float, zn, forcing):
    """Stage values and slopes ``k_i = D (L z_i + f_i)`` from one transform pass."""
    s, m, g = tableau.s, model.m, model.grid
    zn = _check_state(model, zn)
    forcing = _check_state(model, forcing, (s,))
    inv = model.blocks.stage_inverse(tableau, tau)
    znh = fft(zn, g).reshape(m, g.size)
    fh = fft(forcing, g).reshape(s, m, g.size)
    dfh = np.einsum("kab,jbk->jak", model.D_modes, fh)
    rh = znh[None] + tau * np.einsum("ij,jak->iak", tableau.A, dfh)
    xh = np.einsum("kpq,qk->pk", inv, rh.reshape(s * m, g.size)).reshape(s, m, g.size)
    kh = np.einsum("kab,jbk->jak", model.DL_modes, xh) + dfh
    both = ifft(np.stack((xh, kh)).reshape(2, s, m, *g.shape), g)
    return both[0], both[1]


def dense_oracle(model, tau: float, rhs, *, gamma: float | None = None, tableau=None,
                 forcing=None) -> np.ndarray:
    """Reference solution of the CN system (``gamma``) or the stage system (``tableau``).

    Assembles the full real matrix from dense differentiation matrices and
    solves directly; no structure of the operator is assumed. ``rhs`` (and
    ``forcing``) may carry one extra leading batch axis; the matrix is then
    factored once for the whole batch.
    """
    if (gamma is None) == (tableau is None):
        raise InvalidArgumentError("pass exactly one of gamma or tableau")
    n = model.m * model.grid.size
    s = 1 if tableau is None else tableau.s
    if s * n > DENSE_LIMIT:
        raise InvalidArgumentError(f"dense oracle refuses {s * n} unknowns (limit {DENSE_LIMIT})")
    rhs = np.asarray(rhs, dtype=float)
    batched = rhs.ndim == len(model.state_shape) + 1
    zn = rhs if batched else rhs[None]
    zn = _check_state(model, zn, (zn.shape[0],)).reshape(-1, n)
    D, L = model.dense_D(), model.dense_L()
    DL = D @ L
    if tableau is None:
        out = np.linalg.solve(np.eye(n) - gamma * tau * DL, zn.T).T.reshape(-1, *model.state_shape)
    else:
        f = np.asarray(forcing, dtype=float)
        f = f if batched else f[None]
        f = _check_state(model, f, (zn.shape[0], s)).reshape(-1, s * n)
        b = np.tile(zn, (1, s)) + tau * f @ np.kron(tableau.A, D).T
        mat = np.eye(s * n) - tau * np.kron(tableau.A, DL)
        out = np.linalg.solve(mat, b.T).T.reshape(-1, s, *model.state_shape)
    return out if batched else out[0]
