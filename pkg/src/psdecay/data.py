"""Initial data: Benjamin-Ono line solitons, Gaussian packets, and
combinators that modulate in y, differentiate in x or remove x-moments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConditioningError
from .spectral import Field, GridSpec, as_physical, deriv_x, hilbert_x, to_spectral

MAX_PROJECTION_ORDER = 3
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class BOLineSoliton:
    """c Q(c (x - x0)) with Q(x) = 4 / (1 + x^2), constant in y."""

    c: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError(f"soliton speed c must be positive, got {self.c!r}")


@dataclass(frozen=True)
class GaussianPacket:
    """exp(-((x - x0)/sigma)^2) cos(carrier (x - x0)), constant in y."""

    x0: float = 0.0
    sigma: float = 1.0
    carrier: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")


@dataclass(frozen=True)
class YModulated:
    """(offset + amplitude cos(eta0 y)) * base."""

    base: "DatumSpec"
    eta0: int = 1
    amplitude: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if int(self.eta0) != self.eta0:
            raise ValueError(f"eta0 must be an integer, got {self.eta0!r}")


@dataclass(frozen=True)
class XDerivativeOf:
    """d/dx of the base datum, taken spectrally so every x-mean vanishes exactly."""

    base: "DatumSpec"


@dataclass(frozen=True)
class MomentProjected:
    """Base datum with all moments mu_{l,eta}, l <= l_max, removed."""

    base: "DatumSpec"
    l_max: int = 0


DatumSpec = Union[BOLineSoliton, GaussianPacket, YModulated, XDerivativeOf, MomentProjected]


def soliton_profile(x, c: float = 1.0, x0: float = 0.0) -> np.ndarray:
    z = c * (np.asarray(x, dtype=float) - x0)
    return c * 4.0 / (1.0 + z * z)


def build(spec: DatumSpec, grid: GridSpec) -> Field:
    """Sample ``spec`` on ``grid`` as a real physical field."""
    if isinstance(spec, BOLineSoliton):
        col = soliton_profile(grid.x, spec.c, spec.x0)
        return Field.physical(grid, np.repeat(col[:, None], grid.N, axis=1), real=True)
    if isinstance(spec, GaussianPacket):
        s = grid.x - spec.x0
        col = np.exp(-(s / spec.sigma) ** 2) * np.cos(spec.carrier * s)
        return Field.physical(grid, np.repeat(col[:, None], grid.N, axis=1), real=True)
    if isinstance(spec, YModulated):
        if abs(spec.eta0) > grid.N // 2:
            raise ValueError(f"eta0={spec.eta0} is outside the y-lattice of N={grid.N}")
        base = build(spec.base, grid)
        row = spec.offset + spec.amplitude * np.cos(spec.eta0 * grid.y)
        return Field.physical(grid, base.values.real * row[None, :], real=True)
    if isinstance(spec, XDerivativeOf):
        d = as_physical(deriv_x(to_spectral(build(spec.base, grid))))
        return Field.physical(grid, d.values.real, real=True)
    if isinstance(spec, MomentProjected):
        return moment_project(build(spec.base, grid), spec.l_max)[0]
    raise TypeError(f"not a datum spec: {spec!r}")


def soliton_residual(c: float, grid: GridSpec, x0: float = 0.0, nonlinear_sign: float = -1.0,
                     norm: str = "l2") -> float:
    """Relative size of H_x Q_c' + c Q_c + sign * Q_c^2 / 2 (sign = -1 is the
    travelling-wave equation) against c Q_c, in the L2 or sup norm."""
    if not (math.isfinite(c) and c > 0):
        raise ValueError(f"c must be positive, got {c!r}")
    q = build(BOLineSoliton(c, x0), grid)
    hq = as_physical(hilbert_x(deriv_x(to_spectral(q)))).values.real
    qv = q.values.real
    res = hq + c * qv + nonlinear_sign * 0.5 * qv * qv
    if norm == "l2":
        return float(np.linalg.norm(res) / np.linalg.norm(c * qv))
    if norm == "max":
        return float(np.abs(res).max() / np.abs(c * qv).max())
    raise ValueError(f"unknown norm {norm!r}; use 'l2' or 'max'")


def moment_project(f: Field, l_max: int) -> tuple[Field, float]:
    """Remove the moments mu_{l,eta}, l <= l_max, of ``f`` for every eta.

    The correction lives in span{x^m exp(-x^2) e^{i eta y} : m <= l_max}; for
    each eta the coefficients solve a (l_max+1)-square Gram system built from
    discrete moments of the basis.  Returns (projected field, correction L2 norm).
    """
    if int(l_max) != l_max or not 0 <= l_max <= MAX_PROJECTION_ORDER:
        raise ValueError(f"l_max must be an integer in 0..{MAX_PROJECTION_ORDER}, got {l_max!r}")
    from .diagnostics import moment_row

    phys = as_physical(f)
    g = phys.grid
    x = g.x
    env = np.exp(-x * x)
    basis = np.array([x**m * env for m in range(l_max + 1)])  # (m, x)
    gram = np.array([[np.sum(x**l * basis[m]) * g.dx * 2.0 * math.pi
                      for m in range(l_max + 1)] for l in range(l_max + 1)])
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise ConditioningError(f"moment Gram matrix condition number {cond:.3e} exceeds {CONDITION_LIMIT:g}")
    mu = np.array([moment_row(phys, l) for l in range(l_max + 1)])  # (l, eta)
    coef = np.linalg.solve(gram, mu)  # (m, eta)
    # correction(x, y) = sum_eta sum_m coef[m, eta] basis[m](x) e^{i eta y}
    ey = np.exp(1j * np.outer(g.eta, g.y))  # (eta, y)
    corr = basis.T @ coef @ ey
    if phys.is_real_physical:
        corr = corr.real
    out = phys.with_values(phys.values - corr)
    return out, math.sqrt(float(np.sum(np.abs(corr) ** 2)) * g.cell)
