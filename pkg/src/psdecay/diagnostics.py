"""Quantitative instruments: conserved quantities, weighted and anisotropic
Sobolev norms, x-moments and the decay-condition table, the Stein square
function, 1/x tail measurements and the unique-continuation residual."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import BPoly

from .errors import MissingSamplesError, ZeroModeWarning
from .reporting import fmt, label
from .spectral import (
    ZERO_MODE_TOL,
    Field,
    GridSpec,
    as_physical,
    as_spectral,
    hilbert_x,
    l2_norm,
    wraparound_fraction_array,
)

MAX_MOMENT_ORDER = 6


def _coefficients(nu) -> tuple[float, ...]:
    return tuple(float(c) for c in getattr(nu, "coefficients", nu))


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class WeightSpec:
    """Polynomial weight <x>^theta, optionally truncated at |x| = N_w."""

    theta: float
    truncation: int | None = None  # None means untruncated

    def __post_init__(self):
        if not math.isfinite(self.theta) or self.theta < 0:
            raise ValueError(f"theta must be finite and >= 0, got {self.theta!r}")
        if self.truncation is not None and (int(self.truncation) != self.truncation
                                            or self.truncation < 1):
            raise ValueError(f"truncation index must be a positive integer, got {self.truncation!r}")


def _truncated_bracket(x: np.ndarray, n: int) -> np.ndarray:
    """<x>_N: sqrt(1+x^2) for |x| <= N, 2N for |x| >= 3N, quintic bridge between."""
    a = np.abs(np.asarray(x, dtype=float))
    v0 = math.sqrt(1.0 + n * n)
    bridge = BPoly.from_derivatives([n, 3 * n], [[v0, n / v0, 0.0], [2.0 * n, 0.0, 0.0]])
    out = np.sqrt(1.0 + a * a)
    mid = (a > n) & (a < 3 * n)
    out[mid] = bridge(a[mid])
    out[a >= 3 * n] = 2.0 * n
    return out


def weight_profile(x, w: WeightSpec) -> np.ndarray:
    """Weight values <x>^theta or <x>_N^theta at the points ``x``."""
    x = np.asarray(x, dtype=float)
    if w.truncation is None:
        base = np.sqrt(1.0 + x * x)
    else:
        base = _truncated_bracket(x, int(w.truncation))
    return base**w.theta


def _as_weight(w) -> WeightSpec:
    return w if isinstance(w, WeightSpec) else WeightSpec(float(w))


def weighted_norm(u: Field, w) -> float:
    """|| profile(x) u ||_{L2} by quadrature."""
    w = _as_weight(w)
    phys = as_physical(u)
    prof = weight_profile(phys.grid.x, w)[:, None]
    return l2_norm(phys.with_values(phys.values * prof))


def sobolev_norm(u: Field, s1: float, s2: float) -> float:
    """||J_x^{s1} u|| + ||J_y^{s2} u|| computed in frequency space."""
    F = as_spectral(u)
    g = F.grid
    p = np.abs(F.values) ** 2
    jx = (1.0 + g.xi**2) ** s1
    jy = (1.0 + g.eta**2) ** s2
    nx = math.sqrt(float(np.sum(p * jx[:, None])) / g.volume)
    ny = math.sqrt(float(np.sum(p * jy[None, :])) / g.volume)
    return nx + ny


# ---------------------------------------------------------------------------
# conserved quantities


def mass(u: Field) -> float:
    """Integral of u^2 (Riemann sum on the periodic box)."""
    phys = as_physical(u)
    return float(np.sum(phys.values.real**2)) * phys.grid.cell


@dataclass(frozen=True)
class EnergyTerms:
    dispersive_x: float  # (1/2) int |D_x^{1/2} u|^2
    dispersive_y: float  # (1/2) int |D_x^{-1/2} d_y u|^2
    potential: float  # -(1/2) sum 2 nu_k/((k+1)(k+2)) int u^{k+2}
    singular: bool  # xi = 0 row carried weight, so the y-term dropped part of it

    @property
    def total(self) -> float:
        return self.dispersive_x + self.dispersive_y + self.potential


def _energy_terms(grid: GridSpec, U: np.ndarray, u: np.ndarray, coeffs, zero_mode_tol) -> EnergyTerms:
    p = np.abs(U) ** 2
    a = np.abs(grid.xi)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(a > 0, 1.0 / a, 0.0)
    ex = 0.5 * float(np.sum(p * a[:, None])) / grid.volume
    ey = 0.5 * float(np.sum(p * (inv[:, None] * grid.eta[None, :] ** 2))) / grid.volume
    row = p[grid.index_of_xi_zero()] * (grid.eta != 0)
    singular = bool(np.sqrt(row.sum()) > zero_mode_tol * math.sqrt(p.sum())) if p.sum() > 0 else False
    pot = 0.0
    upow = u * u
    for k, c in enumerate(coeffs, start=1):
        upow = upow * u  # u^{k+2}
        if c:
            pot -= c / ((k + 1) * (k + 2)) * float(np.sum(upow)) * grid.cell
    return EnergyTerms(ex, ey, pot, singular)


def energy_terms(u: Field, nu, zero_mode_tol: float = ZERO_MODE_TOL) -> EnergyTerms:
    F = as_spectral(u)
    phys = as_physical(u)
    return _energy_terms(F.grid, F.values, phys.values.real, _coefficients(nu), zero_mode_tol)


def energy(u: Field, nu, zero_mode_tol: float = ZERO_MODE_TOL) -> float:
    """Hamiltonian of the flow.  Warns (ZeroModeWarning) when the xi = 0 row is
    non-negligible, since D_x^{-1/2} d_y is then undefined there and set to 0."""
    terms = energy_terms(u, nu, zero_mode_tol)
    if terms.singular:
        warnings.warn("energy: xi=0 row is not negligible; y-dispersive term truncated there",
                      ZeroModeWarning, stacklevel=2)
    return terms.total


# ---------------------------------------------------------------------------
# moments


def moment_row(f: Field, l: int) -> np.ndarray:
    """mu_{l,eta} = sum x^l f(x,y) exp(-i eta y) dx dy for every eta of the lattice."""
    if int(l) != l or l < 0:
        raise ValueError(f"moment order must be a non-negative integer, got {l!r}")
    if l > MAX_MOMENT_ORDER:
        raise ValueError(f"moment order {l} exceeds the conditioning guard {MAX_MOMENT_ORDER}")
    phys = as_physical(f)
    g = phys.grid
    s = np.sum(phys.values * (g.x**l)[:, None], axis=0) * g.dx
    return np.fft.fftshift(np.fft.fft(s)) * g.dy


def moment(f: Field, l: int, eta: int) -> complex:
    col = f.grid.index_of_eta(eta)
    return complex(moment_row(f, l)[col])


# ---------------------------------------------------------------------------
# decay-condition table


HYPOTHESIS_TEXT = {
    "eta_means_vanish": "mu_{0,eta} = 0 for all eta != 0",
    "hilbert_in_weighted_L2": "H_x f in L2(|x| dx dy)",
    "eta_moments_vanish": "mu_{l,eta} = 0 for eta != 0, l = 0..k-1",
    "plain_moments_vanish": "mu_{l,0} = 0 for l = 0..k-2",
    "hilbert_of_xk_in_weighted_L2": "H_x(x^k f) in L2(|x| dx dy)",
    "eta_moment_k_vanish": "mu_{k,eta} = 0 for eta != 0",
}


def _is_half_integer(theta: float) -> bool:
    h = theta - 0.5
    return h >= -1e-12 and abs(h - round(h)) < 1e-12


def table_regime(theta: float) -> tuple[str, int, tuple[str, ...]]:
    """(row label, k, hypotheses) for the weight size ``theta``."""
    if theta < 0 or not math.isfinite(theta):
        raise ValueError(f"theta must be finite and >= 0, got {theta!r}")
    if _is_half_integer(theta):
        k = int(round(theta - 0.5))
        if k == 0:
            return "theta=1/2", 0, ("hilbert_in_weighted_L2",)
        hyps = ["eta_moments_vanish", "hilbert_of_xk_in_weighted_L2"]
        if k >= 2:
            hyps.append("plain_moments_vanish")
        return f"theta={2 * k + 1}/2", k, tuple(hyps)
    if theta < 0.5:
        return "0<theta<1/2", 0, ()
    k = int(math.floor(theta - 0.5))
    label = f"{2 * k + 1}/2<theta<{2 * k + 3}/2"
    if k == 0:
        return label, 0, ("eta_means_vanish",)
    hyps = ["eta_moments_vanish", "eta_moment_k_vanish"]
    if k >= 2:
        hyps.append("plain_moments_vanish")
    return label, k, tuple(hyps)


@dataclass(frozen=True)
class Verdict:
    hypothesis: str
    passed: bool
    margin: float  # worst normalized moment, or relative Cauchy increment
    threshold: float
    detail: str = ""


@dataclass
class DecayConditionReport:
    theta: float
    table_row: str
    k: int
    tol: float
    cauchy_tol: float
    moments: np.ndarray  # (lmax+1, N) complex, rows l, columns eta (sorted lattice)
    etas: np.ndarray
    verdicts: list[Verdict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def vacuous(self) -> bool:
        return not self.verdicts

    def verdict(self, hypothesis: str) -> Verdict:
        for v in self.verdicts:
            if v.hypothesis == hypothesis:
                return v
        raise KeyError(hypothesis)

    def to_text(self) -> str:
        lines = [
            f"theta={fmt(self.theta)}",
            f"table_row={self.table_row}",
            f"k={self.k}",
            f"tol={fmt(self.tol)}",
            f"cauchy_tol={fmt(self.cauchy_tol)}",
            f"overall={'PASS' if self.passed else 'FAIL'}",
        ]
        if self.vacuous:
            lines.append("conditions=none required")
        for v in self.verdicts:
            lines.append(
                f"verdict.{v.hypothesis}={'PASS' if v.passed else 'FAIL'}"
                f" margin={fmt(v.margin)} threshold={fmt(v.threshold)}"
            )
        lines.append("[moments]")
        lines.append("l,eta,re,im,abs")
        for l in range(self.moments.shape[0]):
            for e, m in zip(self.etas, self.moments[l]):
                lines.append(f"{l},{int(e)},{fmt(m.real)},{fmt(m.imag)},{fmt(abs(m))}")
        return "\n".join(lines) + "\n"


def weighted_tail_integrals(h: Field, radii: Sequence[float]) -> np.ndarray:
    """int_{|x|<R} |x| |h|^2 dx dy for each R."""
    phys = as_physical(h)
    g = phys.grid
    dens = np.sum(np.abs(phys.values) ** 2, axis=1) * np.abs(g.x) * g.cell
    return np.array([float(dens[np.abs(g.x) < R].sum()) for R in radii])


def _membership_verdict(name: str, h: Field, cauchy_tol: float) -> Verdict:
    L = h.grid.L
    r0 = 0.9 * L / 4.0
    i1, i2, i4 = weighted_tail_integrals(h, (r0, 2 * r0, 4 * r0))
    if i4 == 0.0:
        return Verdict(name, True, 0.0, cauchy_tol, "zero field")
    inc = (i4 - i2) / i4
    detail = f"I(R)={fmt(i1)} I(2R)={fmt(i2)} I(4R)={fmt(i4)} R={fmt(r0)}"
    return Verdict(name, inc <= cauchy_tol, inc, cauchy_tol, detail)


def check_conditions(f: Field, theta: float, tol: float = 1e-8,
                     cauchy_tol: float = 1e-2) -> DecayConditionReport:
    """Evaluate the decay hypotheses the table assigns to ``theta``.

    Moments count as zero when |mu_{l,eta}| < tol * ||f|| * L^l.  Membership
    in L2(|x| dx dy) is judged from nested truncations R, 2R, 4R = 0.9 L:
    the last relative increment must not exceed ``cauchy_tol``.
    """
    label, k, hyps = table_regime(float(theta))
    phys = as_physical(f)
    g = phys.grid
    lmax = min(int(math.ceil(theta)), MAX_MOMENT_ORDER)
    moments = np.array([moment_row(phys, l) for l in range(lmax + 1)])
    norm = l2_norm(phys)
    nonzero_eta = g.eta != 0

    def normalized(l):
        if l > lmax:
            row = moment_row(phys, l)
        else:
            row = moments[l]
        scale = norm * g.L**l
        return np.abs(row) / scale if scale > 0 else np.zeros_like(np.abs(row))

    verdicts = []
    for name in hyps:
        if name == "eta_means_vanish":
            m = float(normalized(0)[nonzero_eta].max())
            verdicts.append(Verdict(name, m < tol, m, tol))
        elif name == "eta_moments_vanish":
            m = max(float(normalized(l)[nonzero_eta].max()) for l in range(k))
            verdicts.append(Verdict(name, m < tol, m, tol, f"l=0..{k - 1}"))
        elif name == "eta_moment_k_vanish":
            m = float(normalized(k)[nonzero_eta].max())
            verdicts.append(Verdict(name, m < tol, m, tol, f"l={k}"))
        elif name == "plain_moments_vanish":
            col = g.index_of_eta(0)
            m = max(float(normalized(l)[col]) for l in range(k - 1))
            verdicts.append(Verdict(name, m < tol, m, tol, f"l=0..{k - 2}, eta=0"))
        elif name == "hilbert_in_weighted_L2":
            verdicts.append(_membership_verdict(name, hilbert_x(phys), cauchy_tol))
        elif name == "hilbert_of_xk_in_weighted_L2":
            xk = phys.with_values(phys.values * (g.x**k)[:, None])
            verdicts.append(_membership_verdict(name, hilbert_x(xk), cauchy_tol))
    return DecayConditionReport(float(theta), label, k, tol, cauchy_tol, moments,
                                g.eta.copy(), verdicts)


# ---------------------------------------------------------------------------
# Stein square function


def stein_frac_deriv(f: np.ndarray, grid: GridSpec, b: float, zero_extend: bool = True,
                     chunk: int = 256) -> np.ndarray:
    """Pointwise (int |f(x)-f(z)|^2 / |x-z|^{1+2b} dz)^{1/2} for a 1D x-slice.

    Midpoint rule on the grid cells; the cell containing x is integrated
    from the local linear model |f'(x)|^2 |x-z|^{1-2b}.  With ``zero_extend``
    the slice is continued by 0 outside the box and that exterior is
    integrated exactly.
    """
    b = float(b)
    if not 0.0 < b < 1.0:
        raise ValueError(f"b must lie in (0, 1), got {b!r}")
    f = np.asarray(f, dtype=np.complex128)
    if f.shape != (grid.M,):
        raise ValueError(f"slice of shape {f.shape} does not match M={grid.M}")
    x, dx = grid.x, grid.dx
    fp = np.fft.ifft(1j * np.fft.ifftshift(grid.xi) * np.fft.fft(f))
    total = np.abs(fp) ** 2 * 2.0 * (0.5 * dx) ** (2.0 - 2.0 * b) / (2.0 - 2.0 * b)
    idx = np.arange(grid.M)
    for start in range(0, grid.M, chunk):
        rows = slice(start, min(start + chunk, grid.M))
        d = np.abs(idx[rows, None] - idx[None, :]) * dx
        with np.errstate(divide="ignore"):
            kern = np.where(d > 0, d ** (-1.0 - 2.0 * b), 0.0)
        diff = np.abs(f[rows, None] - f[None, :]) ** 2
        total[rows] += np.sum(diff * kern, axis=1) * dx
    if zero_extend:
        left = x[0] - 0.5 * dx
        right = x[-1] + 0.5 * dx
        total += np.abs(f) ** 2 * ((right - x) ** (-2 * b) + (x - left) ** (-2 * b)) / (2 * b)
    return np.sqrt(total)


def frac_deriv_norm_1d(f: np.ndarray, grid: GridSpec, b: float) -> float:
    """|| D^b f ||_{L2(dx)} for an x-slice, through the |xi|^b multiplier."""
    f = np.asarray(f, dtype=np.complex128)
    xi = np.fft.ifftshift(grid.xi)
    g = np.fft.ifft(np.abs(xi) ** b * np.fft.fft(f))
    return math.sqrt(float(np.sum(np.abs(g) ** 2)) * grid.dx)


def stein_ratio(f: np.ndarray, grid: GridSpec, b: float) -> float:
    """||Stein^b f|| / ||D^b f|| for one slice."""
    s = stein_frac_deriv(f, grid, b)
    return math.sqrt(float(np.sum(s**2)) * grid.dx) / frac_deriv_norm_1d(f, grid, b)


def stein_constant(b: float) -> float:
    """Continuum value of the ratio above: sqrt(int |e^{is}-1|^2 |s|^{-1-2b} ds),
    evaluated by adaptive quadrature."""
    def integrand(s):
        return 2.0 * (1.0 - math.cos(s)) * s ** (-1.0 - 2.0 * b)

    head, _ = integrate.quad(integrand, 0.0, 1.0, limit=200)
    # tail: 2 s^{-1-2b} minus the oscillatory part via the QAWF cosine weight
    tail_plain = 2.0 / (2.0 * b)
    tail_osc, _ = integrate.quad(lambda s: 2.0 * s ** (-1.0 - 2.0 * b), 1.0, np.inf,
                                 weight="cos", wvar=1.0)
    return math.sqrt(2.0 * (head + tail_plain - tail_osc))


# ---------------------------------------------------------------------------
# 1/x tails


@dataclass(frozen=True)
class TailMeasurement:
    eta: int
    amplitude: float  # median of |x u_eta(x)| over the window
    slope: float  # least-squares d log|u_eta| / d log|x|; -inf if nothing resolved
    points: int  # samples above the noise floor used in the slope fit
    resolved: bool


def y_slice(u: Field, eta: int) -> np.ndarray:
    """u_eta(x) = sum_y u(x,y) exp(-i eta y) dy."""
    phys = as_physical(u)
    g = phys.grid
    col = g.index_of_eta(eta)
    return (np.fft.fftshift(np.fft.fft(phys.values, axis=1), axes=1) * g.dy)[:, col]


def tail_amplitude(u: Field, eta: int, window: tuple[float, float],
                   noise_floor: float = 1e-11) -> TailMeasurement:
    """Measure the algebraic tail of the eta-th y-mode on R1 <= |x| <= R2.

    Samples below ``noise_floor * max|u_eta|`` are round-off and are left out
    of the slope fit; when fewer than three remain the tail is reported as
    unresolved with slope -inf (faster than any power visible above
    round-off).
    """
    r1, r2 = map(float, window)
    g = u.grid
    if not 0.0 < r1 < r2:
        raise ValueError(f"window must satisfy 0 < R1 < R2, got {window!r}")
    if r2 >= 0.9 * g.L:
        raise ValueError(f"window end {r2} is within 10% of the box edge L={g.L}")
    ue = y_slice(u, eta)
    ax = np.abs(g.x)
    sel = (ax >= r1) & (ax <= r2)
    mag = np.abs(ue[sel])
    amp = float(np.median(ax[sel] * mag)) if mag.size else 0.0
    floor = noise_floor * float(np.abs(ue).max()) if ue.size else 0.0
    ok = mag > floor
    if ok.sum() < 3 or floor == 0.0 and not mag.any():
        return TailMeasurement(int(eta), amp, -math.inf, int(ok.sum()), False)
    slope = float(np.polyfit(np.log(ax[sel][ok]), np.log(mag[ok]), 1)[0])
    return TailMeasurement(int(eta), amp, slope, int(ok.sum()), True)


def pin_tail_constant(profile=lambda s: math.exp(-0.25 * s * s), x0: float = 40.0) -> float:
    """Constant c0 in  x * (1/2pi) int e^{ix xi} i sign(xi) phi(xi) d xi -> -c0 phi(0).

    Evaluated by Fourier-weighted adaptive quadrature of the half-line sine
    integral at x0 and 2*x0, then Richardson-extrapolated in 1/x^2.
    """
    def c_at(x):
        val, _ = integrate.quad(profile, 0.0, np.inf, weight="sin", wvar=x, limlst=200)
        return x * val / (math.pi * profile(0.0))

    c1, c2 = c_at(x0), c_at(2.0 * x0)
    return (4.0 * c2 - c1) / 3.0


# ---------------------------------------------------------------------------
# unique continuation


@dataclass(frozen=True)
class UCResidual:
    etas: np.ndarray
    lhs: np.ndarray  # sin(dt eta^2) d_xi uhat(0, eta, t1)
    rhs: np.ndarray  # int_0^dt sin((dt - tau) eta^2) sum_k i nu_k/(k+1) u^{k+1}hat(0, eta, t1 + tau)
    t1: float
    t2: float

    @property
    def residual(self) -> np.ndarray:
        return self.lhs - self.rhs

    def at(self, eta: int) -> complex:
        return complex(self.residual[int(np.nonzero(self.etas == eta)[0][0])])


def uc_identity_residual(traj, t1_index: int, t2_index: int, nu,
                         zero_mode_tol: float = 1e-8) -> UCResidual:
    """Residual of the two-time unique-continuation identity, for every eta.

    d_xi uhat(0, eta, t1) is -i mu_{1,eta}(t1); the tau-integral is the
    trapezoid rule over the trajectory's stored zero-row samples of
    u^{k+1}.
    """
    coeffs = _coefficients(nu)
    try:
        s1, s2 = traj.snapshots[t1_index], traj.snapshots[t2_index]
        t1, t2 = traj.times[t1_index], traj.times[t2_index]
    except IndexError:
        raise MissingSamplesError(f"no snapshot at index {t1_index} or {t2_index}") from None
    if not t2 > t1:
        raise ValueError("t2_index must refer to a later snapshot than t1_index")
    g = s1.grid
    for s in (s1, s2):
        zr = np.abs(moment_row(s, 0)).max()
        if zr > zero_mode_tol * max(l2_norm(s), 1e-300):
            warnings.warn("trajectory is not zero-mean in x; the identity presumes it",
                          ZeroModeWarning, stacklevel=2)
            break

    times = np.asarray(traj.sample_times, dtype=float)
    samples = np.asarray(traj.zero_row_samples)
    if samples.size == 0:
        raise MissingSamplesError("trajectory carries no zero-row samples")
    if samples.shape[1] < len(coeffs):
        raise MissingSamplesError("zero-row samples do not cover every nonlinear power")
    slack = 1e-9 * max(abs(t2), 1.0)
    sel = (times >= t1 - slack) & (times <= t2 + slack)
    tau = times[sel]
    if tau.size < 2 or abs(tau[0] - t1) > slack or abs(tau[-1] - t2) > slack:
        raise MissingSamplesError(f"zero-row samples do not bracket [{t1}, {t2}]")

    eta = g.eta
    dt = t2 - t1
    a = -1j * moment_row(s1, 1)
    b = np.zeros((tau.size, g.N), dtype=np.complex128)
    for k, c in enumerate(coeffs, start=1):
        if c:
            b += 1j * c / (k + 1) * samples[sel, k - 1, :]
    kernel = np.sin((t2 - tau)[:, None] * eta[None, :] ** 2)
    rhs = integrate.trapezoid(kernel * b, tau, axis=0)
    lhs = np.sin(dt * eta**2) * a
    return UCResidual(eta.copy(), lhs, rhs, float(t1), float(t2))


def xi_derivative_jump(u: Field) -> np.ndarray:
    """Half jump (d_xi uhat(0+) - d_xi uhat(0-)) / 2i per eta, from the
    one-sided lattice quotients at xi = +-pi/L (first-order in pi/L)."""
    F = as_spectral(u)
    g = F.grid
    z = g.index_of_xi_zero()
    h = g.xi[z + 1]
    right = F.values[z + 1] / h
    left = F.values[z - 1] / (-h)
    return (right - left) / 2j


# ---------------------------------------------------------------------------
# conservation log


@dataclass
class ConservationLog:
    thetas: tuple[float, ...] = ()
    times: list[float] = field(default_factory=list)
    l2: list[float] = field(default_factory=list)
    mass: list[float] = field(default_factory=list)
    energy: list[float] = field(default_factory=list)
    weighted: dict[float, list[float]] = field(default_factory=dict)
    wraparound: list[float] = field(default_factory=list)
    tails: dict[int, list[float]] = field(default_factory=dict)
    energy_singular: bool = False

    def __post_init__(self):
        for th in self.thetas:
            self.weighted.setdefault(th, [])

    def record(self, t: float, grid: GridSpec, U: np.ndarray, u: np.ndarray, nu,
               zero_mode_tol: float = ZERO_MODE_TOL, tail_window=None, tail_etas=()):
        """Append one row from a spectral buffer ``U`` and its real physical ``u``."""
        if self.times and not t > self.times[-1]:
            raise ValueError("conservation log times must increase strictly")
        m = float(np.sum(u * u)) * grid.cell
        terms = _energy_terms(grid, U, u, _coefficients(nu), zero_mode_tol)
        self.energy_singular |= terms.singular
        self.times.append(float(t))
        self.mass.append(m)
        self.l2.append(math.sqrt(m))
        self.energy.append(terms.total)
        for th in self.thetas:
            prof = weight_profile(grid.x, WeightSpec(th))[:, None]
            self.weighted[th].append(math.sqrt(float(np.sum((prof * u) ** 2)) * grid.cell))
        self.wraparound.append(wraparound_fraction_array(grid, u))
        if tail_window is not None:
            fld = Field(grid, "physical", u, True)
            for e in tail_etas:
                self.tails.setdefault(int(e), []).append(
                    tail_amplitude(fld, int(e), tail_window).amplitude)

    def __len__(self):
        return len(self.times)

    @property
    def columns(self) -> list[str]:
        return (["time", "l2", "mass", "energy"]
                + [f"wnorm_theta={label(th)}" for th in self.thetas]
                + ["wraparound_fraction"])

    def rows(self):
        for i, t in enumerate(self.times):
            yield ([t, self.l2[i], self.mass[i], self.energy[i]]
                   + [self.weighted[th][i] for th in self.thetas]
                   + [self.wraparound[i]])

    def relative_drift(self, quantity: str) -> float:
        series = getattr(self, quantity)
        if not series or series[0] == 0:
            return 0.0 if not series or series[-1] == 0 else math.inf
        return abs(series[-1] - series[0]) / abs(series[0])

    def to_csv(self, path, header_lines=()):
        from .reporting import write_csv
        return write_csv(path, header_lines, self.columns, self.rows())
