"""Exact linear flow: the unitary groups generated by H_x d_x^2 + H_x d_y^2.

``propagate`` multiplies spectra by exp(i t omega(xi, eta)).
``propagate_oracle`` evaluates the same double sum directly from the grid
coordinates, with no FFT and nothing shared with ``propagate`` apart from
``symbol``.
"""

from __future__ import annotations

import enum
import math
from functools import lru_cache

import numpy as np

from .errors import OracleSizeError
from .spectral import SPECTRAL, Field, GridSpec, as_spectral, to_physical

ORACLE_MAX_POINTS = 2**16
_CACHE_THRESHOLD = 2**22


class DispersionSpec(enum.Enum):
    """Which dispersive symbol drives the linear flow.

    FULL   -> sign(xi) (xi^2 + eta^2)   (group U(t))
    X_ONLY -> sign(xi) xi^2             (Benjamin-Ono part)
    Y_ONLY -> sign(xi) eta^2            (group U_1(t))
    """

    FULL = "full"
    X_ONLY = "x-only"
    Y_ONLY = "y-only"

    @classmethod
    def parse(cls, text: str) -> "DispersionSpec":
        try:
            return cls(text.strip().lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown dispersion {text!r}; expected one of {names}") from None


def symbol(spec: DispersionSpec, xi, eta):
    """Dispersive symbol omega(xi, eta); odd in xi, zero at xi = 0."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    s = np.sign(xi)
    if spec is DispersionSpec.FULL:
        out = s * (xi**2 + eta**2)
    elif spec is DispersionSpec.X_ONLY:
        out = s * xi**2 + 0.0 * eta
    elif spec is DispersionSpec.Y_ONLY:
        out = s * eta**2 + 0.0 * xi
    else:
        raise TypeError(f"not a DispersionSpec: {spec!r}")
    return out[()] if out.ndim == 0 else out


def _phase(grid: GridSpec, t: float, spec: DispersionSpec) -> np.ndarray:
    omega = symbol(spec, grid.xi[:, None], grid.eta[None, :])
    return np.exp(1j * t * omega)


@lru_cache(maxsize=8)
def _cached_phase(grid: GridSpec, t: float, spec: DispersionSpec) -> np.ndarray:
    p = _phase(grid, t, spec)
    p.setflags(write=False)
    return p


def phase_factor(grid: GridSpec, t: float, spec: DispersionSpec) -> np.ndarray:
    """exp(i t omega) on the lattice; cached only for very large grids."""
    if grid.size > _CACHE_THRESHOLD:
        return _cached_phase(grid, float(t), spec)
    return _phase(grid, t, spec)


def _check_time(t) -> float:
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    return t


def propagate(f: Field, t: float, spec: DispersionSpec = DispersionSpec.FULL) -> Field:
    """Apply U(t) (or its variants) to ``f``; the result keeps the input's space."""
    t = _check_time(t)
    F = as_spectral(f)
    G = F.with_values(F.values * phase_factor(F.grid, t, spec))
    return G if f.space == SPECTRAL else to_physical(G)


def propagate_oracle(f: Field, t: float, spec: DispersionSpec = DispersionSpec.FULL) -> Field:
    """Brute-force evaluation of the linear group by direct summation.

    fhat(xi_k, eta_j) = sum_{x,y} f exp(-i x xi_k - i y eta_j) dx dy
    u(x, y)           = 1/(2L 2pi) sum_{k,j} exp(i t omega) fhat exp(i x xi_k + i y eta_j)

    The double sums are evaluated with explicit exponential matrices in x and
    in y (the kernel factorizes), single threaded and without any FFT.
    Always returns a physical field.
    """
    t = _check_time(t)
    g = f.grid
    if g.size > ORACLE_MAX_POINTS:
        raise OracleSizeError(f"oracle limited to {ORACLE_MAX_POINTS} points, grid has {g.size}")
    if f.space == SPECTRAL:
        raise ValueError("propagate_oracle works from physical data")
    x = -g.L + (2.0 * g.L / g.M) * np.arange(g.M)
    y = (2.0 * math.pi / g.N) * np.arange(g.N)
    xi = (math.pi / g.L) * np.arange(-g.M // 2, g.M // 2)
    eta = np.arange(-g.N // 2, g.N // 2).astype(float)
    dx = 2.0 * g.L / g.M
    dy = 2.0 * math.pi / g.N

    ex = np.exp(-1j * np.outer(xi, x))  # (M_xi, M_x)
    ey = np.exp(-1j * np.outer(eta, y))  # (N_eta, N_y)
    vals = np.asarray(f.values, dtype=np.complex128)
    fhat = np.zeros((g.M, g.N), dtype=np.complex128)
    for a in range(g.M):
        for b in range(g.N):
            fhat[a, b] = np.sum(np.outer(ex[a], ey[b]) * vals) * dx * dy

    fhat *= np.exp(1j * t * symbol(spec, xi[:, None], eta[None, :]))

    out = np.zeros((g.M, g.N), dtype=np.complex128)
    inv_x = np.conj(ex).T  # (M_x, M_xi)
    inv_y = np.conj(ey).T  # (N_y, N_eta)
    for a in range(g.M):
        for b in range(g.N):
            out[a, b] = np.sum(np.outer(inv_x[a], inv_y[b]) * fhat)
    out /= 2.0 * g.L * 2.0 * math.pi
    return Field(g, "physical", out, f.is_real_physical)
