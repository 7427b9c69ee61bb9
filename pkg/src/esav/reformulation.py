"""
Scalar auxiliary variables.

SAV introduces ``w = sqrt(H2(z) + C0)`` and the field ``A(z) = N'(z) / w``;
it needs ``H2 + C0 > 0``. ESAV introduces ``e = exp(H2(z) / C0)`` and the field
``B(z, e) = N'(z) e exp(-H2(z) / C0)``, with ``d/dt ln e = (B, z_t)_h / C0``.
ESAV states keep ``r = ln e`` rather than ``e``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AuxiliaryOverflowError, InvalidArgumentError, ReformulationInfeasibleError

#: Largest exponent accepted before ``exp`` is considered to overflow.
MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class SavState:
    w: float
    C0: float


@dataclass(frozen=True)
class EsavState:
    r: float
    C0: float

    @property
    def e(self) -> float:
        return safe_exp(self.r)


def safe_exp(x: float) -> float:
    if abs(x) > MAX_EXPONENT:
        raise AuxiliaryOverflowError(f"exponent {x:.6g} exceeds +/-{MAX_EXPONENT}")
    return float(np.exp(x))


def default_sav_c0(h2: float) -> float:
    return 1.0 + abs(h2)


def default_esav_c0(h2: float) -> float:
    return max(1.0, abs(h2))


def _radicand(model, z, C0):
    rad = model.H2(z) + C0
    if not rad > 0:
        raise ReformulationInfeasibleError(
            f"H2(z) + C0 = {rad:.6g} is not positive; SAV is undefined for this state"
        )
    return rad


def sav_init(model, z0, C0: float | None = None) -> SavState:
    h2 = model.H2(z0)
    C0 = default_sav_c0(h2) if C0 is None else float(C0)
    return SavState(w=float(np.sqrt(_radicand(model, z0, C0))), C0=C0)


def sav_A(model, z, C0: float) -> np.ndarray:
    return model.gradient(z) / np.sqrt(_radicand(model, z, C0))


def esav_init(model, z0, C0: float | None = None) -> EsavState:
    h2 = model.H2(z0)
    C0 = default_esav_c0(h2) if C0 is None else float(C0)
    if not C0 > 0:
        raise InvalidArgumentError(f"ESAV scaling constant must be positive, got {C0}")
    return EsavState(r=h2 / C0, C0=C0)


def esav_B(model, z, e: float, C0: float) -> np.ndarray:
    """``N'(z) e exp(-H2(z)/C0)``; ``e`` is a raw value and may be an extrapolation."""
    return model.gradient(z) * (e * safe_exp(-model.H2(z) / C0))


def esav_B_log(model, z, r: float, C0: float) -> np.ndarray:
    """Same as ``esav_B`` with ``e = exp(r)`` folded into a single exponent."""
    return model.gradient(z) * safe_exp(r - model.H2(z) / C0)


def modified_energy_sav(model, z, w: float) -> float:
    return model.H1(z) + w * w


def modified_energy_esav(model, z, r: float, C0: float) -> float:
    return model.H1(z) + C0 * r
