"""Named experiments composed from the library, and their report files."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .config import ScenarioConfig
from .data import BOLineSoliton, GaussianPacket, YModulated, build, moment_project
from .diagnostics import (
    ConservationLog,
    check_conditions,
    pin_tail_constant,
    sobolev_norm,
    tail_amplitude,
    uc_identity_residual,
    weighted_norm,
)
from .errors import SimulationAbort
from .linear import DispersionSpec, propagate
from .reporting import csv_text, fmt, grid_header, label
from .solver import NonlinearitySpec, SolverConfig, evolve
from .spectral import (
    Field,
    GridSpec,
    as_physical,
    as_spectral,
    deriv_x,
    l2_norm,
    to_spectral,
    wraparound_fraction,
)

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    detail: str = ""

    @classmethod
    def of(cls, name: str, ok: bool, detail: str = "") -> "Check":
        return cls(name, PASS if ok else FAIL, detail)


@dataclass
class Table:
    filename: str
    columns: list[str]
    rows: list[list]


@dataclass
class ScenarioResult:
    scenario: str
    grid: GridSpec | None = None
    seed: int = 0
    tables: list[Table] = field(default_factory=list)
    texts: dict[str, str] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    aborted: str | None = None

    def header_lines(self) -> list[str]:
        lines = [f"scenario={self.scenario}"]
        if self.grid is not None:
            lines.append(grid_header(self.grid))
        lines += [f"seed={self.seed}", f"version=psdecay {__version__}"]
        return lines

    @property
    def failed(self) -> int:
        return sum(c.status == FAIL for c in self.checks)


# ---------------------------------------------------------------------------
# building blocks


def grid_of(cfg: ScenarioConfig) -> GridSpec:
    return GridSpec(cfg.get("grid", "L"), cfg.get("grid", "M"), cfg.get("grid", "N"))


def noise_field(grid: GridSpec, amplitude: float, seed: int) -> np.ndarray:
    """Smooth seeded perturbation: exp(-(x/2)^2) times random low y-modes."""
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal(4), rng.standard_normal(4)
    j = np.arange(4)[:, None]
    row = (a[:, None] * np.cos(j * grid.y) + b[:, None] * np.sin(j * grid.y)).sum(axis=0)
    return amplitude * np.exp(-(grid.x / 2.0) ** 2)[:, None] * row[None, :]


def datum(cfg: ScenarioConfig, grid: GridSpec, seed: int) -> Field:
    """Base profile, then y-modulation, seeded noise, x-derivative, moment projection."""
    kind = cfg.get("datum", "kind")
    if kind == "zero":
        return Field.physical(grid, np.zeros(grid.shape), real=True)
    if kind == "soliton":
        spec = BOLineSoliton(cfg.get("datum", "c"), cfg.get("datum", "x0"))
    else:
        spec = GaussianPacket(cfg.get("datum", "x0"), cfg.get("datum", "sigma"),
                              cfg.get("datum", "carrier"))
    if cfg.has("datum", "eta0") or cfg.has("datum", "amplitude") or cfg.has("datum", "offset"):
        spec = YModulated(spec, cfg.get("datum", "eta0", 0), cfg.get("datum", "amplitude"),
                          cfg.get("datum", "offset"))
    values = build(spec, grid).values.real
    noise = cfg.get("datum", "noise")
    if noise:
        values = values + noise_field(grid, noise, seed)
    f = Field.physical(grid, values, real=True)
    if cfg.get("datum", "derivative"):
        f = Field.physical(grid, as_physical(deriv_x(to_spectral(f))).values.real, real=True)
    if cfg.has("datum", "project_lmax"):
        f = moment_project(f, cfg.get("datum", "project_lmax"))[0]
    return f


def dispersion_of(cfg: ScenarioConfig) -> DispersionSpec:
    return DispersionSpec.parse(cfg.get("scenario", "dispersion"))


def nonlinearity_of(cfg: ScenarioConfig) -> NonlinearitySpec:
    return NonlinearitySpec.of(cfg.get("scenario", "nu"))


def solver_config(cfg: ScenarioConfig, refine: int = 1, thetas=()) -> SolverConfig:
    """Solver settings, with dt divided by ``refine`` and strides scaled so
    snapshots and log rows land at the same times."""
    return SolverConfig(
        dt=cfg.get("solver", "dt") / refine,
        T=cfg.get("solver", "T"),
        snapshot_stride=cfg.get("solver", "snapshot_stride") * refine,
        dealias_enabled=cfg.get("solver", "dealias"),
        wraparound_budget=cfg.get("solver", "wraparound_budget"),
        zero_mode_tolerance=cfg.get("solver", "zero_mode_tolerance"),
        weight_thetas=tuple(thetas),
        log_stride=cfg.get("solver", "log_stride") * refine,
        sample_stride=cfg.get("solver", "sample_stride"),
    )


def log_table(log: ConservationLog, filename: str) -> Table:
    return Table(filename, log.columns, [list(r) for r in log.rows()])


@lru_cache(maxsize=1)
def tail_constant() -> float:
    return pin_tail_constant()


# ---------------------------------------------------------------------------
# scenarios


def weight_ratio(f: Field, t: float, theta: float, spec: DispersionSpec) -> tuple[float, float]:
    """r(t) = ||<x>^theta U(t) f|| / (<t>^theta (||<x>^theta f|| + ||f||_{H^{theta,0}}))
    and the wrap-around fraction of U(t) f."""
    u = propagate(f, t, spec)
    denom = (1.0 + t * t) ** (0.5 * theta) * (weighted_norm(f, theta) + sobolev_norm(f, theta, 0.0))
    return weighted_norm(u, theta) / denom, wraparound_fraction(u)


def run_linear_weights(cfg: ScenarioConfig, seed: int) -> ScenarioResult:
    g = grid_of(cfg)
    g2 = g.enlarged(2)
    spec = dispersion_of(cfg)
    f, f2 = datum(cfg, g, seed), datum(cfg, g2, seed)
    res = ScenarioResult("linear-weights", g, seed)
    rows = []
    for theta in cfg.get("scenario", "thetas"):
        sup1 = sup2 = 0.0
        for t in cfg.get("scenario", "times"):
            r1, w1 = weight_ratio(f, t, theta, spec)
            r2, w2 = weight_ratio(f2, t, theta, spec)
            sup1, sup2 = max(sup1, r1), max(sup2, r2)
            rows.append([theta, t, r1, r2, w1, w2])
        finite = math.isfinite(sup1) and math.isfinite(sup2)
        change = abs(sup2 - sup1) / sup1 if sup1 > 0 else math.inf
        res.checks.append(Check.of(f"sup_ratio_finite theta={label(theta)}", finite,
                                   f"sup={fmt(sup1)}"))
        res.checks.append(Check.of(f"sup_ratio_stable theta={label(theta)}", finite and change < 0.05,
                                   f"sup={fmt(sup1)} sup_doubled={fmt(sup2)} change={fmt(change)}"))
    res.tables.append(Table("linear_weights.csv",
                            ["theta", "time", "ratio", "ratio_doubled",
                             "wraparound_fraction", "wraparound_fraction_doubled"], rows))
    return res


def run_tail_falsification(cfg: ScenarioConfig, seed: int) -> ScenarioResult:
    g = grid_of(cfg)
    spec = dispersion_of(cfg)
    f = datum(cfg, g, seed)
    F = as_spectral(f)
    window = tuple(cfg.get("scenario", "window"))
    c0 = tail_constant()
    res = ScenarioResult("tail-falsification", g, seed)
    res.notes.append(f"c0={fmt(c0)} (pinned by oscillatory quadrature)")
    rows = []
    for t in cfg.get("scenario", "times"):
        u = propagate(f, t, spec)
        wrap = wraparound_fraction(u)
        for eta in cfg.get("scenario", "etas"):
            m = tail_amplitude(u, eta, window)
            jump = math.sin(t * eta * eta)
            fhat0 = abs(F.values[g.index_of_xi_zero(), g.index_of_eta(eta)])
            predicted = abs(jump) * fhat0 * c0
            suppressed = abs(jump) < 1e-8 or predicted == 0.0
            rel = abs(m.amplitude - predicted) / predicted if predicted > 0 else math.nan
            rows.append([t, eta, t * eta * eta, m.slope, m.amplitude, predicted, rel,
                         m.points, m.resolved, suppressed, wrap])
            tag = f"t={label(t)} eta={eta}"
            if suppressed:
                res.checks.append(Check.of(f"jump_suppressed_slope {tag}", m.slope < -1.9,
                                           f"slope={fmt(m.slope)} resolved={m.resolved}"))
            else:
                res.checks.append(Check.of(f"tail_slope {tag}", -1.15 <= m.slope <= -0.85,
                                           f"slope={fmt(m.slope)}"))
                res.checks.append(Check.of(f"tail_amplitude {tag}", rel < 0.1,
                                           f"measured={fmt(m.amplitude)} predicted={fmt(predicted)}"))
    res.tables.append(Table("tail.csv",
                            ["time", "eta", "t_eta2", "slope", "amplitude", "predicted",
                             "relative_error", "points_used", "resolved", "jump_suppressed",
                             "wraparound_fraction"], rows))
    return res


def eta_mode_mass(u: Field) -> float:
    """L2 mass carried by the modes eta != 0."""
    F = as_spectral(u)
    mask = F.grid.eta != 0
    return float(np.sum(np.abs(F.values[:, mask]) ** 2)) / F.grid.volume


def run_soliton(cfg: ScenarioConfig, seed: int) -> ScenarioResult:
    g = grid_of(cfg)
    c, x0 = cfg.get("datum", "c"), cfg.get("datum", "x0")
    res = ScenarioResult("soliton-run", g, seed)
    u0 = datum(cfg, g, seed)
    traj = evolve(u0, solver_config(cfg), nonlinearity_of(cfg), dispersion_of(cfg))
    rows = []
    for t, u in zip(traj.times, traj.snapshots):
        exact = build(BOLineSoliton(c, x0 + c * t), g)
        err = l2_norm(u - exact) / l2_norm(exact)
        rows.append([t, err, eta_mode_mass(u), wraparound_fraction(u)])
    res.tables.append(Table("soliton.csv",
                            ["time", "l2_error", "eta_mode_mass", "wraparound_fraction"], rows))
    res.tables.append(log_table(traj.log, "conservation.csv"))
    res.checks.append(Check.of("translation_error", rows[-1][1] < 1e-3, f"final={fmt(rows[-1][1])}"))
    worst = max(r[2] for r in rows)
    res.checks.append(Check.of("y_modes_stay_empty", worst < 1e-12, f"max={fmt(worst)}"))
    return res


def _drift_ratio_check(res: ScenarioResult, name: str, coarse: float, fine: float):
    if coarse < 1e-14:
        res.checks.append(Check(name, SKIP, f"drift {fmt(coarse)} at round-off level"))
    else:
        ratio = coarse / fine if fine > 0 else math.inf
        res.checks.append(Check.of(name, ratio >= 12.0, f"ratio={fmt(ratio)}"))


def run_conservation(cfg: ScenarioConfig, seed: int) -> ScenarioResult:
    g = grid_of(cfg)
    res = ScenarioResult("conservation", g, seed)
    u0 = datum(cfg, g, seed)
    nu, spec = nonlinearity_of(cfg), dispersion_of(cfg)
    thetas = cfg.get("scenario", "thetas", ())
    coarse = evolve(u0, solver_config(cfg, 1, thetas), nu, spec)
    res.tables.append(log_table(coarse.log, "conservation.csv"))
    fine = evolve(u0, solver_config(cfg, 2, thetas), nu, spec)
    res.tables.append(log_table(fine.log, "conservation_half_dt.csv"))
    dm, dm2 = coarse.log.relative_drift("mass"), fine.log.relative_drift("mass")
    res.checks.append(Check.of("mass_drift", dm < 1e-8, f"drift={fmt(dm)}"))
    _drift_ratio_check(res, "mass_drift_order", dm, dm2)
    if coarse.log.energy_singular:
        res.checks.append(Check("energy_drift", SKIP, "xi=0 row not negligible; energy not defined"))
    else:
        de, de2 = coarse.log.relative_drift("energy"), fine.log.relative_drift("energy")
        res.checks.append(Check.of("energy_drift", de < 1e-6, f"drift={fmt(de)}"))
        _drift_ratio_check(res, "energy_drift_order", de, de2)
    return res


def run_uc_identity(cfg: ScenarioConfig, seed: int) -> ScenarioResult:
    g = grid_of(cfg)
    res = ScenarioResult("uc-identity", g, seed)
    u0 = datum(cfg, g, seed)
    nu, spec = nonlinearity_of(cfg), dispersion_of(cfg)
    t1, t2 = cfg.get("scenario", "t1"), cfg.get("scenario", "t2")
    residuals = []
    for refine in (1, 2):
        traj = evolve(u0, solver_config(cfg, refine), nu, spec)
        r = uc_identity_residual(traj, traj.index_of_time(t1), traj.index_of_time(t2), nu)
        residuals.append(r.residual)
    etas = g.eta
    rows = []
    for j, eta in enumerate(etas):
        a, b = residuals[0][j], residuals[1][j]
        ratio = abs(a) / abs(b) if abs(b) > 0 else math.inf
        rows.append([int(eta), a.real, a.imag, abs(a), abs(b), ratio])
    res.tables.append(Table("uc_identity.csv",
                            ["eta", "re_residual", "im_residual", "abs_residual",
                             "abs_residual_half_dt", "ratio"], rows))
    worst = max(abs(r) for res_ in residuals for r in res_)
    if nu.is_zero:
        res.checks.append(Check.of("linear_control_residual", worst < 1e-10, f"max={fmt(worst)}"))
    else:
        for row in rows:
            eta, coarse, ratio = row[0], row[3], row[5]
            if eta == 0:
                res.checks.append(Check.of("eta=0 residual", coarse == 0.0, f"abs={fmt(coarse)}"))
            elif coarse < 1e-12:
                res.checks.append(Check(f"residual_convergence eta={eta}", SKIP,
                                        f"residual {fmt(coarse)} at round-off level"))
            else:
                res.checks.append(Check.of(f"residual_convergence eta={eta}", ratio >= 4.0,
                                           f"abs={fmt(coarse)} ratio={fmt(ratio)}"))
    return res


def _stable(v, w) -> bool:
    """A verdict far from its threshold (factor 10 either way) must not flip."""
    if v.passed == w.passed:
        return True
    t = v.threshold
    return t / 10.0 <= v.margin <= 10.0 * t


def run_check_conditions(cfg: ScenarioConfig, seed: int) -> ScenarioResult:
    g = grid_of(cfg)
    g2 = g.refined(2)
    res = ScenarioResult("check-conditions", g, seed)
    f, f2 = datum(cfg, g, seed), datum(cfg, g2, seed)
    tol, ctol = cfg.get("scenario", "tol"), cfg.get("scenario", "cauchy_tol")
    rows = []
    for theta in cfg.get("scenario", "thetas"):
        rep = check_conditions(f, theta, tol, ctol)
        rep2 = check_conditions(f2, theta, tol, ctol)
        res.texts[f"conditions_theta={label(theta)}.txt"] = rep.to_text()
        stable = True
        for v, w in zip(rep.verdicts, rep2.verdicts):
            stable &= _stable(v, w)
            rows.append([theta, rep.table_row, v.hypothesis, v.passed, v.margin, v.threshold, w.passed])
        if rep.vacuous:
            rows.append([theta, rep.table_row, "none", True, 0.0, 0.0, True])
        res.notes.append(f"theta={label(theta)} row={rep.table_row} overall={PASS if rep.passed else FAIL}")
        res.checks.append(Check.of(f"verdicts_resolution_stable theta={label(theta)}", stable))
    res.tables.append(Table("conditions.csv",
                            ["theta", "table_row", "hypothesis", "passed", "margin", "threshold",
                             "passed_refined"], rows))
    return res


RUNNERS: dict[str, Callable[[ScenarioConfig, int], ScenarioResult]] = {
    "linear-weights": run_linear_weights,
    "tail-falsification": run_tail_falsification,
    "soliton-run": run_soliton,
    "conservation": run_conservation,
    "uc-identity": run_uc_identity,
    "check-conditions": run_check_conditions,
}


def run_scenario(cfg: ScenarioConfig, seed: int | None = None) -> ScenarioResult:
    """Run the configured scenario.  Aborted runs return a result whose
    ``aborted`` field holds the reason, with partial tables kept."""
    seed = cfg.get("scenario", "seed") if seed is None else int(seed)
    runner = RUNNERS[cfg.name]
    partial = ScenarioResult(cfg.name, grid_of(cfg), seed)
    try:
        return runner(cfg, seed)
    except SimulationAbort as exc:
        partial.aborted = f"{type(exc).__name__}: {exc}"
        if exc.trajectory is not None and len(exc.trajectory.log):
            partial.tables.append(log_table(exc.trajectory.log, "partial_conservation.csv"))
        return partial


# ---------------------------------------------------------------------------
# reports


def summary_text(results: Sequence[ScenarioResult]) -> str:
    lines = [f"# version=psdecay {__version__}"]
    counts = {PASS: 0, FAIL: 0, SKIP: 0}
    for r in results:
        lines += [f"# {h}" for h in r.header_lines()]
        for c in r.checks:
            counts[c.status] += 1
            lines.append(f"{c.status} {r.scenario}: {c.name}" + (f" | {c.detail}" if c.detail else ""))
        lines += [f"note {r.scenario}: {n}" for n in r.notes]
        if r.aborted:
            lines.append(f"ABORT {r.scenario}: {r.aborted}")
    total = sum(counts.values())
    lines.append(f"checks={total} passed={counts[PASS]} failed={counts[FAIL]} skipped={counts[SKIP]}")
    return "\n".join(lines) + "\n"


def write_report(results: Sequence[ScenarioResult], out_dir) -> list[Path]:
    """Write every table and text of ``results`` plus summary.txt into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for r in results:
        headers = r.header_lines()
        for table in r.tables:
            path = out / table.filename
            path.write_text(csv_text(headers, table.columns, table.rows), encoding="utf-8")
            written.append(path)
        for name, text in sorted(r.texts.items()):
            path = out / name
            path.write_text("".join(f"# {h}\n" for h in headers) + text, encoding="utf-8")
            written.append(path)
    path = out / "summary.txt"
    path.write_text(summary_text(results), encoding="utf-8")
    written.append(path)
    return written
