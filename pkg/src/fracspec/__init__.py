"""History-free Caputo fractional derivatives in orthogonal-polynomial coefficient space."""

from .banded import BandedOp, BorderedBandedLU, SingularSystemError, bordered_banded_solve
from .caputo import (
    AuxState,
    caputo_apply,
    caputo_direct_oracle,
    caputo_scalar_coeff,
    psi_fulldomain_oracle,
    psi_step,
    recursive_caputo,
)
from .quadrature import Method, QuadratureRule, build_rule, gauss_jacobi, gauss_laguerre
from .solvers import (
    DiskWaveParams,
    SimulationOutput,
    ToyProblemParams,
    memory_report,
    solve_disk_wave,
    solve_toy_interval,
)

__version__ = "0.1.0"

__all__ = [
    "AuxState",
    "BandedOp",
    "BorderedBandedLU",
    "DiskWaveParams",
    "Method",
    "QuadratureRule",
    "SimulationOutput",
    "SingularSystemError",
    "ToyProblemParams",
    "bordered_banded_solve",
    "build_rule",
    "caputo_apply",
    "caputo_direct_oracle",
    "caputo_scalar_coeff",
    "gauss_jacobi",
    "gauss_laguerre",
    "memory_report",
    "psi_fulldomain_oracle",
    "psi_step",
    "recursive_caputo",
    "solve_disk_wave",
    "solve_toy_interval",
]
