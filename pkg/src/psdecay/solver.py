"""Integrating-factor RK4 for

    u_t - H_x u_xx - H_x u_yy + sum_k nu_k u^k u_x = 0

in spectral space.  The linear part exp(i t omega) is applied exactly; the
nonlinearity is evaluated pseudo-spectrally in conservative form
i xi FFT(u^{k+1})/(k+1), which annihilates the xi = 0 row exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .diagnostics import ConservationLog
from .errors import AliasingWarning, NaNGuardError, WrapAroundBudgetExceeded
from .linear import DispersionSpec, phase_factor
from .spectral import (
    PHYSICAL,
    SPECTRAL,
    Field,
    GridSpec,
    as_physical,
    as_spectral,
    dealias_mask,
    forward,
    inverse,
    symmetrize,
    wraparound_fraction_array,
)


@dataclass(frozen=True)
class NonlinearitySpec:
    """Coefficients (nu_1, ..., nu_K) of sum nu_k u^k u_x."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("need at least one coefficient (K >= 1)")
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError(f"coefficients must be finite, got {coeffs}")
        object.__setattr__(self, "coefficients", coeffs)
        if not self.is_linear_control and not any(coeffs):
            raise ValueError("coefficients must not all vanish; use NonlinearitySpec.zero for a linear control")

    # set by ``zero`` only; keeps the not-all-zero invariant for ordinary specs
    is_linear_control: bool = field(default=False, compare=False)

    @classmethod
    def zero(cls, K: int = 1) -> "NonlinearitySpec":
        """All-zero coefficients, for linear control runs."""
        return cls((0.0,) * int(K), is_linear_control=True)

    @classmethod
    def of(cls, nu) -> "NonlinearitySpec":
        if isinstance(nu, NonlinearitySpec):
            return nu
        coeffs = tuple(float(c) for c in np.atleast_1d(nu))
        if coeffs and not any(coeffs):
            return cls.zero(len(coeffs))
        return cls(coeffs)

    @property
    def K(self) -> int:
        return len(self.coefficients)

    @property
    def is_zero(self) -> bool:
        return not any(self.coefficients)


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    T: float
    snapshot_stride: int = 1
    dealias_enabled: bool = True
    wraparound_budget: float = 1e-6
    zero_mode_tolerance: float = 1e-10
    weight_thetas: tuple[float, ...] = ()
    log_stride: int = 1
    sample_stride: int = 1  # zero-row samples of u^{k+1}, for the identity residual

    def __post_init__(self):
        for name in ("dt", "T", "wraparound_budget", "zero_mode_tolerance"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if self.dt > self.T:
            raise ValueError(f"dt={self.dt} exceeds T={self.T}")
        for name in ("snapshot_stride", "log_stride", "sample_stride"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        object.__setattr__(self, "weight_thetas", tuple(float(t) for t in self.weight_thetas))

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.T / self.dt)))


@dataclass
class Trajectory:
    grid: GridSpec
    nu: NonlinearitySpec
    spec: DispersionSpec
    dt: float
    times: list[float] = field(default_factory=list)
    snapshots: list[Field] = field(default_factory=list)
    log: ConservationLog = field(default_factory=ConservationLog)
    sample_times: list[float] = field(default_factory=list)
    # zero_row_samples[n, k-1, j] = FFT(u^{k+1})(xi=0, eta_j) at sample_times[n]
    zero_row_samples: list[np.ndarray] = field(default_factory=list)

    @property
    def final(self) -> Field:
        return self.snapshots[-1]

    def index_of_time(self, t: float) -> int:
        i = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        if abs(self.times[i] - t) > 0.5 * self.dt:
            raise KeyError(f"no snapshot within dt/2 of t={t}")
        return i


def _sum_of_powers(u: np.ndarray, coeffs: Sequence[float]) -> np.ndarray:
    """S = sum_k nu_k/(k+1) u^{k+1}."""
    s = np.zeros_like(u)
    p = u.copy()
    for k, c in enumerate(coeffs, start=1):
        p = p * u
        if c:
            s += (c / (k + 1)) * p
    return s


def _check_finite(a: np.ndarray, what: str):
    if not np.all(np.isfinite(a)):
        raise NaNGuardError(f"non-finite values in {what}")


def _warn_aliasing(nu: NonlinearitySpec, dealias_enabled: bool):
    if dealias_enabled and nu.K > 2:
        warnings.warn(f"two-thirds rule does not fully de-alias u^{nu.K + 1}", AliasingWarning,
                      stacklevel=3)


def nonlinear_term(u: Field, nu, dealias_enabled: bool = True) -> Field:
    """sum_k nu_k/(k+1) i xi (u^{k+1})^ as a spectral field, de-aliased by the 2/3 rule."""
    nu = NonlinearitySpec.of(nu)
    phys = as_physical(u)
    if not phys.is_real_physical:
        raise ValueError("nonlinear_term expects a real field")
    vals = phys.values.real
    _check_finite(vals, "nonlinear_term input")
    _warn_aliasing(nu, dealias_enabled)
    g = phys.grid
    mult = 1j * g.xi[:, None] * (dealias_mask(g) if dealias_enabled else 1.0)
    S = forward(g, _sum_of_powers(vals, nu.coefficients))
    return Field(g, SPECTRAL, mult * S, True)


class _Integrator:
    """Holds the per-grid tables of one (grid, nu, spec, dt) combination."""

    def __init__(self, grid: GridSpec, nu: NonlinearitySpec, spec: DispersionSpec, dt: float,
                 dealias_enabled: bool = True):
        self.grid, self.nu, self.dt = grid, nu, dt
        self.half = phase_factor(grid, 0.5 * dt, spec)
        self.full = self.half * self.half
        self.mult = -1j * grid.xi[:, None] * (dealias_mask(grid) if dealias_enabled else 1.0)

    def physical(self, U: np.ndarray) -> np.ndarray:
        return inverse(self.grid, U).real

    def rhs(self, U: np.ndarray, u: np.ndarray | None = None) -> np.ndarray:
        """-N(u) in spectral form; ``u`` may be passed when already known."""
        if u is None:
            u = self.physical(U)
        _check_finite(u, "solution")
        return self.mult * forward(self.grid, _sum_of_powers(u, self.nu.coefficients))

    def step(self, U: np.ndarray, u: np.ndarray | None = None) -> np.ndarray:
        if self.nu.is_zero:
            return symmetrize(self.full * U)
        h, E, E2 = self.dt, self.half, self.full
        k1 = self.rhs(U, u)
        k2 = self.rhs(E * (U + 0.5 * h * k1))
        k3 = self.rhs(E * U + 0.5 * h * k2)
        k4 = self.rhs(E2 * U + h * E * k3)
        out = E2 * U + (h / 6.0) * (E2 * k1 + 2.0 * E * (k2 + k3) + k4)
        _check_finite(out, "step result")
        return symmetrize(out)


def step(u_hat: Field, dt: float, nu, spec: DispersionSpec = DispersionSpec.FULL,
         dealias_enabled: bool = True) -> Field:
    """One Lawson (integrating-factor) RK4 step of size ``dt``."""
    nu = NonlinearitySpec.of(nu)
    _warn_aliasing(nu, dealias_enabled)
    F = as_spectral(u_hat)
    _check_finite(F.values, "step input")
    out = _Integrator(F.grid, nu, spec, float(dt), dealias_enabled).step(np.asarray(F.values))
    return Field(F.grid, SPECTRAL, out, True)


def _zero_row_powers(grid: GridSpec, u: np.ndarray, K: int) -> np.ndarray:
    """Rows (k-1) hold sum_x u^{k+1} e^{-i eta y} dx dy for every eta."""
    out = np.empty((K, grid.N), dtype=np.complex128)
    p = u.copy()
    for k in range(1, K + 1):
        p = p * u
        col = np.sum(p, axis=0) * grid.dx
        out[k - 1] = np.fft.fftshift(np.fft.fft(col)) * grid.dy
    return out


def evolve(u0: Field, cfg: SolverConfig, nu, spec: DispersionSpec = DispersionSpec.FULL) -> Trajectory:
    """Integrate from ``u0`` to time cfg.T with fixed step cfg.dt.

    Snapshots are kept every ``snapshot_stride`` steps (and always at the
    end); the conservation log every ``log_stride`` steps.  A NaN or a
    wrap-around fraction above budget aborts with the partial trajectory
    attached to the exception.
    """
    nu = NonlinearitySpec.of(nu)
    if not u0.is_real_physical:
        raise ValueError("initial datum must be real")
    _warn_aliasing(nu, cfg.dealias_enabled)
    g = u0.grid
    U = np.array(as_spectral(u0).values)
    _check_finite(U, "initial datum")
    U = symmetrize(U)
    integ = _Integrator(g, nu, spec, cfg.dt, cfg.dealias_enabled)
    traj = Trajectory(g, nu, spec, cfg.dt, log=ConservationLog(cfg.weight_thetas))
    n = cfg.n_steps
    last_valid = None

    for i in range(n + 1):
        t = i * cfg.dt
        u = integ.physical(U)
        if not (np.all(np.isfinite(U)) and np.all(np.isfinite(u))):
            raise NaNGuardError(f"non-finite values at t={t:g}", traj, last_valid)
        wrap = wraparound_fraction_array(g, u)
        if wrap > cfg.wraparound_budget:
            raise WrapAroundBudgetExceeded(
                f"wrap-around fraction {wrap:.3e} exceeds budget {cfg.wraparound_budget:g} at t={t:g}",
                traj, last_valid)
        last_valid = Field(g, PHYSICAL, u, True)
        final = i == n
        if i % cfg.snapshot_stride == 0 or final:
            traj.times.append(t)
            traj.snapshots.append(last_valid)
        if i % cfg.log_stride == 0 or final:
            traj.log.record(t, g, U, u, nu.coefficients, cfg.zero_mode_tolerance)
        if i % cfg.sample_stride == 0 or final:
            traj.sample_times.append(t)
            traj.zero_row_samples.append(_zero_row_powers(g, u, nu.K))
        if final:
            break
        try:
            U = integ.step(U, u)
        except NaNGuardError as exc:
            raise NaNGuardError(f"{exc} at t={t:g}", traj, last_valid) from None
    return traj
