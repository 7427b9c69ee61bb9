"""
Periodic tensor-product grids and Fourier pseudo-spectral differentiation.

A grid on ``[x_R, x_L) x [y_R, y_L)`` carries ``N`` points per dimension,
mesh size ``h = (x_L - x_R) / N`` and correction factor ``mu = 2 pi / (x_L - x_R)``.
Grid functions are numpy arrays of shape ``grid.shape``; multi-component
states stack components along a leading axis, shape ``(m, *grid.shape)``.

Differentiation is available in two forms that must agree:

    * dense matrices built entrywise from the cot / csc^2 formulas, and
    * FFT application, ``D = F^H diag(lambda) F`` with the eigenvalues
      ``lambda_w = i w mu`` (order 1, Nyquist set to 0) or
      ``lambda_w = -(w mu)^2`` (order 2, Nyquist kept).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidArgumentError

#: Largest tolerated imaginary residue (relative to the field magnitude) after
#: an inverse transform of a real field.
IMAG_TOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid in one or two dimensions."""

    bounds: tuple[tuple[float, float], ...]
    counts: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.counts)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @cached_property
    def lengths(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in self.bounds)

    @cached_property
    def h(self) -> tuple[float, ...]:
        return tuple(l / n for l, n in zip(self.lengths, self.counts))

    @cached_property
    def mu(self) -> tuple[float, ...]:
        return tuple(2.0 * np.pi / l for l in self.lengths)

    @cached_property
    def cell(self) -> float:
        """Product of mesh sizes, the weight of the discrete inner product."""
        return float(np.prod(self.h))

    def points(self, dim: int = 0) -> np.ndarray:
        """1D coordinates ``x_R + (j-1) h`` for ``j = 1..N``; the right end is excluded."""
        a, _ = self.bounds[dim]
        return a + np.arange(self.counts[dim]) * self.h[dim]

    def mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*(self.points(d) for d in range(self.dim)), indexing="ij"))

    def wavenumbers(self, dim: int = 0) -> np.ndarray:
        """Integer wavenumbers in FFT order, ``0, 1, ..., N/2 - 1, -N/2, ..., -1``."""
        n = self.counts[dim]
        return np.fft.fftfreq(n, d=1.0 / n)

    def symbol(self, dim: int, order: int) -> np.ndarray:
        """Eigenvalues of the order-``order`` differentiation matrix along ``dim``."""
        _check_order(order)
        return self._symbols[(dim, order)]

    def symbol_nd(self, dim: int, order: int) -> np.ndarray:
        """``symbol`` reshaped to broadcast against arrays of ``grid.shape``."""
        shape = [1] * self.dim
        shape[dim] = self.counts[dim]
        return self.symbol(dim, order).reshape(shape)

    @cached_property
    def _symbols(self) -> dict[tuple[int, int], np.ndarray]:
        table = {}
        for d in range(self.dim):
            w = self.wavenumbers(d)
            mu = self.mu[d]
            first = 1j * w * mu
            first[self.counts[d] // 2] = 0.0
            table[(d, 1)] = first
            table[(d, 2)] = -((w * mu) ** 2) + 0j
        return table


def _check_order(order):
    if order not in (1, 2):
        raise InvalidArgumentError(f"derivative order must be 1 or 2, got {order!r}")


def make_grid(bounds, counts) -> Grid:
    """Build a grid from per-dimension ``(x_R, x_L)`` bounds and point counts.

    A single pair and a single integer are accepted for 1D grids.
    """
    if np.isscalar(counts):
        counts = (counts,)
    if len(bounds) == 2 and np.isscalar(bounds[0]):
        bounds = (bounds,)
    counts = tuple(int(n) for n in counts)
    bounds = tuple((float(a), float(b)) for a, b in bounds)
    if len(bounds) != len(counts) or len(counts) not in (1, 2):
        raise InvalidArgumentError("grid must be 1D or 2D with one bound pair per dimension")
    for (a, b), n in zip(bounds, counts):
        if not b > a:
            raise InvalidArgumentError(f"right endpoint {b} must exceed left endpoint {a}")
        if n < 4 or n % 2:
            raise InvalidArgumentError(f"point count must be even and >= 4, got {n}")
    return Grid(bounds, counts)


def diff_matrix(grid: Grid, dim: int, order: int) -> np.ndarray:
    """Dense Fourier pseudo-spectral differentiation matrix (order 1 or 2)."""
    _check_order(order)
    n = grid.counts[dim]
    mu, h = grid.mu[dim], grid.h[dim]
    idx = np.arange(n)
    diff = idx[:, None] - idx[None, :]
    sign = np.where(diff % 2 == 0, 1.0, -1.0)
    off = diff != 0
    arg = np.where(off, diff * mu * h / 2.0, 1.0)
    out = np.zeros((n, n))
    if order == 1:
        out[off] = (sign * (mu / 2.0) / np.tan(arg))[off]
    else:
        out[off] = (-sign * (mu**2 / 2.0) / np.sin(arg) ** 2)[off]
        out[~off] = -(mu**2) * (n**2 + 2) / 12.0
    return out


def _check_field(field, grid):
    field = np.asarray(field)
    if field.shape[field.ndim - grid.dim:] != grid.shape:
        raise InvalidArgumentError(
            f"field shape {field.shape} does not end with grid shape {grid.shape}"
        )
    return field


def to_real(values: np.ndarray) -> np.ndarray:
    """Drop the imaginary part of an inverse transform after checking it is round-off."""
    re = values.real
    scale = max(1.0, float(np.max(np.abs(re)))) if re.size else 1.0
    resid = float(np.max(np.abs(values.imag))) if re.size else 0.0
    if resid > IMAG_TOL * scale:
        raise ArithmeticError(f"imaginary residue {resid:.3e} after inverse transform")
    return np.ascontiguousarray(re)


def fft(field: np.ndarray, grid: Grid) -> np.ndarray:
    axes = tuple(range(-grid.dim, 0))
    return np.fft.fftn(field, axes=axes)


def ifft(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    axes = tuple(range(-grid.dim, 0))
    return to_real(np.fft.ifftn(coeffs, axes=axes))


def apply_derivative(field, grid: Grid, dim: int, order: int) -> np.ndarray:
    """Apply the spectral derivative along ``dim`` via FFT.

    Leading axes (components, stages) are carried through unchanged.
    """
    _check_order(order)
    field = _check_field(field, grid)
    return ifft(fft(field, grid) * grid.symbol_nd(dim, order), grid)


def inner_h(z, w, grid: Grid) -> float:
    """Discrete inner product ``h_x h_y sum z w``, summed over components."""
    z = _check_field(z, grid)
    w = np.asarray(w)
    if z.shape != w.shape:
        raise InvalidArgumentError(f"shape mismatch {z.shape} vs {w.shape}")
    return grid.cell * float(np.vdot(z.ravel(), w.ravel()).real)


def norm_h(z, grid: Grid) -> float:
    return float(np.sqrt(inner_h(z, z, grid)))


def norm_inf(z) -> float:
    return float(np.max(np.abs(z)))


def seminorm_h(z, grid: Grid) -> float:
    """``sqrt(sum_dims (-D^2 z, z)_h)``."""
    z = _check_field(z, grid)
    total = 0.0
    for d in range(grid.dim):
        total += inner_h(-apply_derivative(z, grid, d, 2), z, grid)
    return float(np.sqrt(max(total, 0.0)))
