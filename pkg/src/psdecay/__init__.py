"""Pseudo-spectral laboratory for weighted decay in the generalized
Pelinovsky-Stepanyants equation u_t - H_x u_xx - H_x u_yy + sum nu_k u^k u_x = 0
on R x T."""

__version__ = "0.1.0"

from .spectral import Field, GridSpec  # noqa: E402
from .linear import DispersionSpec, propagate, propagate_oracle  # noqa: E402
from .solver import NonlinearitySpec, SolverConfig, evolve  # noqa: E402

__all__ = [
    "__version__", "Field", "GridSpec", "DispersionSpec", "propagate", "propagate_oracle",
    "NonlinearitySpec", "SolverConfig", "evolve",
]
