"""Compact fourth-order ADI solver for the 3D acoustic wave equation
``u_tt = nu(x, y, z)^2 (u_xx + u_yy + u_zz) + s`` with Dirichlet data."""

__version__ = "0.1.0"

from ._backend import BACKEND, NUMBA_ENABLED
from .adi import (ADIStepper, BoundarySpec, SourceSpec, advance, cfl_check, first_step,
                  ricker, time_averaged_source)
from .errors import (AssemblyError, ConfigurationError, NumericalDivergence,
                     UnsupportedConfiguration)
from .grid import Grid3D, ScalarField3D, VelocityModel, WaveState, build_velocity_field
from .harness import (ConvergenceReport, convergence_order, convergence_study,
                      max_norm_error, run_simulation)
from .problems import ProblemCase, builtin_example
from .tridiag import SingularSystemError, TridiagonalSystem, batch_solve, thomas_solve

__all__ = [
    "ADIStepper", "AssemblyError", "BACKEND", "BoundarySpec", "ConfigurationError",
    "ConvergenceReport", "Grid3D", "NUMBA_ENABLED", "NumericalDivergence", "ProblemCase",
    "ScalarField3D", "SingularSystemError", "SourceSpec", "TridiagonalSystem",
    "UnsupportedConfiguration", "VelocityModel", "WaveState", "advance", "batch_solve",
    "build_velocity_field", "builtin_example", "cfl_check", "convergence_order",
    "convergence_study", "first_step", "max_norm_error", "ricker", "run_simulation",
    "thomas_solve", "time_averaged_source",
]
