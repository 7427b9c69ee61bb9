"""Linearly implicit energy-preserving integrators for Hamiltonian PDEs.

The package splits a Hamiltonian PDE as ``z_t = D (L z + N'(z))``, rewrites the
nonlinear energy with a scalar auxiliary variable (SAV, or its exponential
variant ESAV), and advances it with Crank-Nicolson or Gauss-collocation
schemes whose linear systems are diagonalized by the FFT.
"""

from .errors import (
    AuxiliaryOverflowError,
    DegenerateStepError,
    InvalidArgumentError,
    NonConvergenceError,
    ReformulationInfeasibleError,
    SingularOperatorError,
)
from .grid import Grid, apply_derivative, diff_matrix, inner_h, make_grid, norm_h, norm_inf
from .integrators import SCHEMES, SchemeConfig, Trajectory, integrate
from .linsolve import dense_oracle, solve_cn, solve_stage_system
from .models import HamiltonianModel, energy, kdv_model, nls_model, sg_model
from .reformulation import esav_init, modified_energy_esav, modified_energy_sav, sav_init
from .tableaux import ButcherTableau, check_symplectic, extrapolation_coeffs, gauss_tableau

__version__ = "0.1.0"

__all__ = [
    "AuxiliaryOverflowError",
    "ButcherTableau",
    "DegenerateStepError",
    "Grid",
    "HamiltonianModel",
    "InvalidArgumentError",
    "NonConvergenceError",
    "ReformulationInfeasibleError",
    "SCHEMES",
    "SchemeConfig",
    "SingularOperatorError",
    "Trajectory",
    "apply_derivative",
    "check_symplectic",
    "dense_oracle",
    "diff_matrix",
    "energy",
    "esav_init",
    "extrapolation_coeffs",
    "gauss_tableau",
    "inner_h",
    "integrate",
    "kdv_model",
    "make_grid",
    "modified_energy_esav",
    "modified_energy_sav",
    "nls_model",
    "norm_h",
    "norm_inf",
    "sav_init",
    "sg_model",
    "solve_cn",
    "solve_stage_system",
]
