"""Mixed Fourier transforms on the cylinder R x T and Fourier multipliers.

The unbounded x-direction is replaced by the periodic box [-L, L) with M
points; y is periodic on [0, 2*pi) with N points.  Spectral buffers are
stored in *sorted* lattice order, so ``values[k, j]`` sits at
``(grid.xi[k], grid.eta[j])`` with ``xi = pi*k/L`` for k = -M/2..M/2-1 and
``eta = j`` for j = -N/2..N/2-1.

Normalization::

    fhat(xi, eta) = sum_{x,y} f(x, y) exp(-i x xi - i y eta) dx dy
    f(x, y)       = 1/(2L * 2pi) sum_{xi,eta} fhat(xi, eta) exp(i x xi + i y eta)

so that  sum |f|^2 dx dy = 1/(2L * 2pi) sum |fhat|^2  exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from .errors import GridMismatchError, SpaceError, ZeroModeWarning

PHYSICAL = "physical"
SPECTRAL = "spectral"
Space = Literal["physical", "spectral"]

#: relative size of the xi = 0 row above which negative-order multipliers warn
ZERO_MODE_TOL = 1e-10


@dataclass(frozen=True)
class GridSpec:
    """Discretization of R x T: x in [-L, L) with M points, y in [0, 2pi) with N."""

    L: float
    M: int
    N: int

    def __post_init__(self):
        if not (math.isfinite(self.L) and self.L > 0):
            raise ValueError(f"half length L must be positive and finite, got {self.L!r}")
        for name in ("M", "N"):
            n = getattr(self, name)
            if int(n) != n or n <= 0 or n % 2:
                raise ValueError(f"{name} must be an even positive integer, got {n!r}")
            object.__setattr__(self, name, int(n))
        object.__setattr__(self, "L", float(self.L))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.M, self.N)

    @property
    def size(self) -> int:
        return self.M * self.N

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.M

    @property
    def dy(self) -> float:
        return 2.0 * math.pi / self.N

    @property
    def cell(self) -> float:
        """Area element dx*dy of the Riemann sums."""
        return self.dx * self.dy

    @property
    def volume(self) -> float:
        """Area 2L * 2pi of the computational box."""
        return 2.0 * self.L * 2.0 * math.pi

    @cached_property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.M)

    @cached_property
    def y(self) -> np.ndarray:
        return self.dy * np.arange(self.N)

    @cached_property
    def k(self) -> np.ndarray:
        """Integer x-mode numbers -M/2..M/2-1."""
        return np.arange(-self.M // 2, self.M // 2)

    @cached_property
    def j(self) -> np.ndarray:
        """Integer y-mode numbers -N/2..N/2-1."""
        return np.arange(-self.N // 2, self.N // 2)

    @cached_property
    def xi(self) -> np.ndarray:
        return (math.pi / self.L) * self.k

    @cached_property
    def eta(self) -> np.ndarray:
        return self.j.astype(float)

    @cached_property
    def _x_phase(self) -> np.ndarray:
        # exp(i L xi_k) = (-1)^k, in FFT storage order; accounts for x starting at -L
        kk = np.fft.fftfreq(self.M, 1.0 / self.M).astype(int)
        return np.where(kk % 2 == 0, 1.0, -1.0)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical coordinates (X, Y), each of shape (M, N)."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    def index_of_xi_zero(self) -> int:
        return self.M // 2

    def index_of_eta(self, eta: int) -> int:
        """Column index of the y-frequency ``eta``; raises if it is off the lattice."""
        if int(eta) != eta or not (-self.N // 2 <= eta < self.N // 2):
            raise ValueError(f"eta={eta!r} is outside the lattice -{self.N // 2}..{self.N // 2 - 1}")
        return int(eta) + self.N // 2

    def refined(self, factor: int = 2) -> "GridSpec":
        """Same box, ``factor`` times more points in x and y."""
        return GridSpec(self.L, self.M * factor, self.N * factor)

    def enlarged(self, factor: int = 2) -> "GridSpec":
        """Box ``factor`` times longer in x at the same dx; y untouched."""
        return GridSpec(self.L * factor, self.M * factor, self.N)


@dataclass(frozen=True, eq=False)
class Field:
    """Complex M x N buffer on a grid, tagged with the space it lives in.

    Rows index x (or xi), columns index y (or eta).  Fields are treated as
    immutable: the buffer is flagged read-only on construction.
    """

    grid: GridSpec
    space: Space
    values: np.ndarray
    is_real_physical: bool = True

    def __post_init__(self):
        if self.space not in (PHYSICAL, SPECTRAL):
            raise SpaceError(f"unknown space tag {self.space!r}")
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.shape != self.grid.shape:
            raise GridMismatchError(
                f"buffer of shape {vals.shape} does not fit grid {self.grid.shape}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def physical(cls, grid: GridSpec, values, real: bool | None = None) -> "Field":
        values = np.asarray(values)
        if real is None:
            real = not np.iscomplexobj(values) or not np.any(values.imag)
        return cls(grid, PHYSICAL, values, bool(real))

    @classmethod
    def spectral(cls, grid: GridSpec, values, real: bool = True) -> "Field":
        return cls(grid, SPECTRAL, values, real)

    @classmethod
    def from_function(cls, grid: GridSpec, fn) -> "Field":
        """Sample ``fn(X, Y)`` on the grid."""
        X, Y = grid.mesh()
        return cls.physical(grid, np.broadcast_to(fn(X, Y), grid.shape))

    @classmethod
    def zeros(cls, grid: GridSpec, space: Space = PHYSICAL) -> "Field":
        return cls(grid, space, np.zeros(grid.shape, dtype=np.complex128), True)

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def with_values(self, values, space: Space | None = None, real: bool | None = None) -> "Field":
        return Field(
            self.grid,
            self.space if space is None else space,
            values,
            self.is_real_physical if real is None else real,
        )

    def _check(self, other: "Field"):
        if other.grid != self.grid:
            raise GridMismatchError(f"grid {other.grid} differs from {self.grid}")
        if other.space != self.space:
            raise SpaceError(f"cannot combine {self.space} and {other.space} fields")

    def __add__(self, other: "Field") -> "Field":
        self._check(other)
        return self.with_values(self.values + other.values,
                                real=self.is_real_physical and other.is_real_physical)

    def __sub__(self, other: "Field") -> "Field":
        self._check(other)
        return self.with_values(self.values - other.values,
                                real=self.is_real_physical and other.is_real_physical)

    def __mul__(self, scalar) -> "Field":
        scalar = complex(scalar)
        return self.with_values(self.values * scalar,
                                real=self.is_real_physical and scalar.imag == 0)

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return self.with_values(-self.values)


# ---------------------------------------------------------------------------
# raw-array kernels (used by the solver's inner loop)


def forward(grid: GridSpec, f: np.ndarray) -> np.ndarray:
    """Physical buffer -> sorted spectral buffer."""
    g = np.fft.fft2(f) * grid.cell
    g *= grid._x_phase[:, None]
    return np.fft.fftshift(g)


def inverse(grid: GridSpec, F: np.ndarray) -> np.ndarray:
    """Sorted spectral buffer -> physical buffer."""
    g = np.fft.ifftshift(F) * grid._x_phase[:, None]
    return np.fft.ifft2(g) / grid.cell


def hermitian_partner(F: np.ndarray) -> np.ndarray:
    """Array G with G[k, j] = F[-k, -j] (indices taken modulo M, N)."""
    return np.roll(F[::-1, ::-1], 1, axis=(0, 1))


def symmetrize(F: np.ndarray) -> np.ndarray:
    """Project onto Hermitian-symmetric buffers (spectra of real fields)."""
    return 0.5 * (F + np.conj(hermitian_partner(F)))


def hermitian_defect(F: np.ndarray) -> float:
    """Relative violation of F(-xi,-eta) = conj F(xi,eta)."""
    scale = np.abs(F).max()
    if scale == 0:
        return 0.0
    return float(np.abs(F - np.conj(hermitian_partner(F))).max() / scale)


def dealias_mask(grid: GridSpec) -> np.ndarray:
    """Boolean two-thirds-rule mask: keep |k| <= M/3 and |j| <= N/3."""
    keep_x = np.abs(grid.k) <= grid.M / 3
    keep_y = np.abs(grid.j) <= grid.N / 3
    return keep_x[:, None] & keep_y[None, :]


def l2_norm_array(grid: GridSpec, f: np.ndarray) -> float:
    return math.sqrt(float(np.sum(np.abs(f) ** 2)) * grid.cell)


def spectral_l2_norm_array(grid: GridSpec, F: np.ndarray) -> float:
    return math.sqrt(float(np.sum(np.abs(F) ** 2)) / grid.volume)


# ---------------------------------------------------------------------------
# Field-level operations


def to_spectral(f: Field) -> Field:
    if f.space != PHYSICAL:
        raise SpaceError("to_spectral expects a physical field")
    return Field(f.grid, SPECTRAL, forward(f.grid, f.values), f.is_real_physical)


def to_physical(F: Field) -> Field:
    if F.space != SPECTRAL:
        raise SpaceError("to_physical expects a spectral field")
    return Field(F.grid, PHYSICAL, inverse(F.grid, F.values), F.is_real_physical)


def as_spectral(f: Field) -> Field:
    return f if f.space == SPECTRAL else to_spectral(f)


def as_physical(f: Field) -> Field:
    return f if f.space == PHYSICAL else to_physical(f)


def l2_norm(f: Field) -> float:
    """L2 norm over the box, computed in whichever space ``f`` lives."""
    if f.space == PHYSICAL:
        return l2_norm_array(f.grid, f.values)
    return spectral_l2_norm_array(f.grid, f.values)


def apply_multiplier(f: Field, symbol: np.ndarray, hermitian: bool = True) -> Field:
    """Multiply the spectrum of ``f`` by ``symbol`` (broadcast to M x N).

    The result is returned in the same space as the input.  ``hermitian``
    states whether the symbol maps spectra of real fields to spectra of real
    fields, so that the reality flag can be carried through.
    """
    F = as_spectral(f)
    G = F.with_values(F.values * symbol, real=F.is_real_physical and hermitian)
    return G if f.space == SPECTRAL else to_physical(G)


def _sign(a: np.ndarray) -> np.ndarray:
    # np.sign(0) == 0, which is the sign(0) := 0 convention used everywhere
    return np.sign(a)


def hilbert_x(F: Field) -> Field:
    """Hilbert transform in x: multiplier -i sign(xi)."""
    return apply_multiplier(F, (-1j * _sign(F.grid.xi))[:, None])


def _check_zero_row(F: Field, tol: float):
    S = as_spectral(F)
    total = np.linalg.norm(S.values)
    row = np.linalg.norm(S.values[S.grid.index_of_xi_zero()])
    if total > 0 and row > tol * total:
        warnings.warn(
            f"xi=0 row carries relative weight {row / total:.3e} > {tol:g}; "
            "negative-order multiplier set to 0 there",
            ZeroModeWarning,
            stacklevel=3,
        )


def abs_xi_power(grid: GridSpec, s: float) -> np.ndarray:
    """|xi|^s on the xi lattice with the value at xi = 0 fixed to 0 (1 if s == 0)."""
    a = np.abs(grid.xi)
    if s == 0:
        return np.ones_like(a)
    out = np.zeros_like(a)
    nz = a > 0
    out[nz] = a[nz] ** s
    return out


def frac_deriv_x(F: Field, s: float, zero_mode_tol: float = ZERO_MODE_TOL) -> Field:
    """D_x^s: multiplier |xi|^s.  For s < 0 the xi = 0 row is sent to 0."""
    s = float(s)
    if not math.isfinite(s):
        raise ValueError(f"order s must be finite, got {s!r}")
    if s < 0:
        _check_zero_row(F, zero_mode_tol)
    return apply_multiplier(F, abs_xi_power(F.grid, s)[:, None])


def bessel_x(F: Field, s: float) -> Field:
    """J_x^s: multiplier (1 + xi^2)^(s/2)."""
    return apply_multiplier(F, ((1.0 + F.grid.xi**2) ** (0.5 * float(s)))[:, None])


def bessel_y(F: Field, s: float) -> Field:
    """J_y^s: multiplier (1 + eta^2)^(s/2)."""
    return apply_multiplier(F, ((1.0 + F.grid.eta**2) ** (0.5 * float(s)))[None, :])


def deriv_x(F: Field) -> Field:
    return apply_multiplier(F, (1j * F.grid.xi)[:, None])


def deriv_y(F: Field) -> Field:
    return apply_multiplier(F, (1j * F.grid.eta)[None, :])


def dealias(F: Field) -> Field:
    """Zero every mode with |k| > M/3 or |j| > N/3 (two-thirds rule)."""
    return apply_multiplier(F, dealias_mask(F.grid))


def wraparound_fraction_array(grid: GridSpec, f: np.ndarray, outer: float = 0.1) -> float:
    """Share of the L2 mass sitting in the outer ``outer`` fraction of [-L, L)."""
    total = float(np.sum(np.abs(f) ** 2))
    if total == 0.0:
        return 0.0
    band = np.abs(grid.x) >= (1.0 - outer) * grid.L
    return float(np.sum(np.abs(f[band]) ** 2)) / total


def wraparound_fraction(f: Field, outer: float = 0.1) -> float:
    return wraparound_fraction_array(f.grid, as_physical(f).values, outer)


__all__ = [
    "GridSpec", "Field", "PHYSICAL", "SPECTRAL", "to_spectral", "to_physical",
    "as_spectral", "as_physical", "hilbert_x", "frac_deriv_x", "bessel_x", "bessel_y",
    "deriv_x", "deriv_y", "dealias", "l2_norm", "symmetrize", "hermitian_defect",
    "wraparound_fraction", "apply_multiplier", "dealias_mask",
]
