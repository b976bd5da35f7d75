"""The ten acceptance criteria at their stated tolerances.

Each test records one PASS/FAIL line, printed in the "acceptance criteria"
section of the pytest summary, and then asserts the criterion.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

import conftest
from psdecay.config import parse_config
from psdecay.data import GaussianPacket, MomentProjected, XDerivativeOf, YModulated, build, soliton_residual
from psdecay.diagnostics import check_conditions, stein_ratio, table_regime
from psdecay.linear import DispersionSpec, propagate, propagate_oracle
from psdecay.reporting import fmt
from psdecay.scenarios import FAIL, PASS, run_scenario
from psdecay.spectral import Field, GridSpec, l2_norm

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {detail}"
    conftest.ACCEPTANCE_LINES[n] = line
    print(line)


def config(name: str, overrides=None):
    cfg = parse_config((CONFIGS / name).read_text())
    for (section, key), value in (overrides or {}).items():
        cfg = cfg.with_value(section, key, value)
    return cfg


def real_data(grid: GridSpec, count: int, seed: int):
    rng = np.random.default_rng(seed)
    return [Field.physical(grid, rng.standard_normal(grid.shape), real=True) for _ in range(count)]


def test_1_oracle_equivalence():
    start = time.perf_counter()
    g = GridSpec(5.0, 32, 8)
    worst = 0.0
    for f in real_data(g, 5, 1):
        for t in (0.1, 0.7, 3.0):
            worst = max(worst, np.abs(propagate(f, t).values - propagate_oracle(f, t).values).max())
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 5.0
    record(1, ok, f"max abs error {worst:.2e} (< 1e-10), {elapsed:.2f} s (< 5 s)")
    assert ok


def test_2_unitarity_and_group_law():
    rel = group = 0.0
    for spec in DispersionSpec:
        for L in (10.0, 50.0):
            g = GridSpec(L, 256, 16)
            for f in real_data(g, 2, 2):
                n0 = l2_norm(f)
                for t in (0.1, 1.0, 7.5):
                    rel = max(rel, abs(l2_norm(propagate(f, t, spec)) - n0) / n0)
                for s, t in ((0.3, 0.7), (-1.2, 2.5), (4.0, 4.0)):
                    a = propagate(propagate(f, t, spec), s, spec).values
                    group = max(group, np.abs(a - propagate(f, s + t, spec).values).max())
    ok = rel < 1e-13 and group < 1e-12
    record(2, ok, f"norm rel error {rel:.2e} (< 1e-13), group law {group:.2e} (< 1e-12)")
    assert ok


def test_3_soliton_certificate():
    start = time.perf_counter()
    g1, g2 = GridSpec(200.0, 4096, 4), GridSpec(400.0, 8192, 4)
    r1, r2 = soliton_residual(1.0, g1), soliton_residual(1.0, g2)
    elapsed = time.perf_counter() - start
    ratio = r1 / r2
    # sup-norm values are reported for information only
    s1, s2 = soliton_residual(1.0, g1, norm="max"), soliton_residual(1.0, g2, norm="max")
    ok = r1 < 1e-3 and ratio >= 3.5 and elapsed < 30
    record(3, ok, f"relative L2 residual {r1:.3e} at L=200 (< 1e-3), {r2:.3e} at L=400, "
                  f"ratio {ratio:.2f} (>= 3.5), {elapsed:.2f} s (< 30 s); "
                  f"sup-norm residuals {s1:.3e}, {s2:.3e}")
    assert r1 < 1e-3 and elapsed < 30
    assert ratio >= 3.5


def test_4_soliton_propagation():
    start = time.perf_counter()
    res = run_scenario(config("soliton.ini"))
    elapsed = time.perf_counter() - start
    rows = res.tables[0].rows
    err, eta_mass = rows[-1][1], max(r[2] for r in rows)
    ok = not res.aborted and err < 1e-3 and eta_mass < 1e-12 and elapsed < 300
    record(4, ok, f"relative L2 error at T=1 {err:.2e} (< 1e-3), eta != 0 mass {eta_mass:.1e} "
                  f"(< 1e-12), {elapsed:.1f} s (< 300 s)")
    assert ok


def test_5_conservation():
    res = run_scenario(config("conservation.ini"))
    checks = {c.name: c for c in res.checks}
    names = ("mass_drift", "mass_drift_order", "energy_drift", "energy_drift_order")
    ok = not res.aborted and all(checks[n].status == PASS for n in names)
    record(5, ok, "; ".join(f"{n} {checks[n].detail}" for n in names if n in checks)
           or f"aborted: {res.aborted}")
    assert ok


def test_6_linear_weights():
    res = run_scenario(config("linear_weights.ini"))
    stable = [c for c in res.checks if c.name.startswith("sup_ratio_stable")]
    ok = not res.aborted and len(stable) == 3 and all(c.status == PASS for c in res.checks)
    changes = [c.detail.split("change=")[1] for c in stable]
    record(6, ok, "sup ratio change under (L, M) doubling: "
           + ", ".join(f"{c.name.split()[-1]} {float(v):.2%}" for c, v in zip(stable, changes))
           + " (< 5%)")
    assert ok


def test_7_tail_falsification():
    res = run_scenario(config("tail.ini"))
    rows = {round(r[0], 9): r for r in res.tables[0].rows}
    cols = res.tables[0].columns
    at = lambda t, name: rows[round(t, 9)][cols.index(name)]
    slope, amp, pred = at(0.5, "slope"), at(0.5, "amplitude"), at(0.5, "predicted")
    steep = at(2 * math.pi, "slope")
    ok = (-1.15 <= slope <= -0.85 and abs(amp - pred) / pred < 0.1 and steep < -1.9
          and all(c.status == PASS for c in res.checks))
    record(7, ok, f"slope {slope:.3f} in [-1.15, -0.85], amplitude {amp:.4f} vs predicted "
                  f"{pred:.4f} ({abs(amp - pred) / pred:.1%} < 10%), slope at t eta^2 = 2 pi {fmt(steep)} (< -1.9)")
    assert ok


BASE = YModulated(GaussianPacket(x0=1.0, sigma=0.8), 1, offset=1.0)

# theta -> (datum meeting the row's hypotheses, datum violating them)
ENGINEERED = {
    0.3: (BASE, None),  # no hypotheses: nothing can fail
    0.5: (XDerivativeOf(BASE), BASE),
    0.75: (XDerivativeOf(BASE), BASE),
    1.5: (MomentProjected(BASE, 1), XDerivativeOf(BASE)),
    2.0: (MomentProjected(BASE, 1), XDerivativeOf(BASE)),
    2.5: (MomentProjected(BASE, 2), MomentProjected(BASE, 1)),
    2.7: (MomentProjected(BASE, 2), MomentProjected(BASE, 1)),
}


def test_8_condition_table():
    grids = (GridSpec(40.0, 512, 16), GridSpec(40.0, 1024, 32), GridSpec(80.0, 1024, 16))
    problems = []
    rows = set()
    for theta, (good, bad) in ENGINEERED.items():
        rows.add(table_regime(theta)[0])
        for datum, expected in ((good, True), (bad, False)):
            if datum is None:
                continue
            verdicts = []
            for g in grids:
                rep = check_conditions(build(datum, g), theta)
                verdicts.append(tuple(v.passed for v in rep.verdicts))
                if rep.passed != expected or rep.table_row != table_regime(theta)[0]:
                    problems.append(f"theta={theta} L={g.L} M={g.M}: overall {rep.passed}")
            if len(set(verdicts)) != 1:
                problems.append(f"theta={theta}: verdicts change with resolution {verdicts}")
    ok = not problems and len(rows) == 7
    record(8, ok, f"{len(rows)} table rows, pass/fail data at 3 resolutions"
           + ("" if ok else ": " + "; ".join(problems)))
    assert ok


def test_9_unique_continuation_identity():
    res = run_scenario(config("uc_identity.ini"))
    conv = [c for c in res.checks if c.name.startswith("residual_convergence")]
    # the control datum needs mu_0 = mu_1 = 0; the derivative datum itself lies in
    # the projection basis, so a shifted, narrower Gaussian is projected instead
    control = run_scenario(config("uc_identity.ini", {
        ("scenario", "nu"): (0.0,), ("datum", "derivative"): False, ("datum", "x0"): 1.0,
        ("datum", "sigma"): 0.8, ("datum", "project_lmax"): 1}))
    ctl = control.checks[0]
    table = res.tables[0]
    col_eta, col_r, col_q = (table.columns.index(n) for n in ("eta", "abs_residual", "ratio"))
    at1 = next(r for r in table.rows if r[col_eta] == 1)
    ok = (not res.aborted and conv and all(c.status == PASS for c in conv)
          and ctl.name == "linear_control_residual" and ctl.status == PASS)
    record(9, ok, f"eta=1 residual {at1[col_r]:.3e}, halving ratio {at1[col_q]:.3f} (>= 4); "
                  f"{sum(c.status == FAIL for c in conv)}/{len(conv)} modes fail; "
                  f"nu=0 control {ctl.status} ({ctl.detail}, < 1e-10)")
    assert ctl.status == PASS
    assert conv and all(c.status == PASS for c in conv)


SMOOTH = [
    lambda x: np.exp(-x**2),
    lambda x: np.exp(-((x - 1.0) ** 2) / 2),
    lambda x: x * np.exp(-x**2),
    lambda x: 1 / np.cosh(x),
    lambda x: 1 / np.cosh(2 * x) ** 2,
    lambda x: np.exp(-x**2) * np.cos(3 * x),
    lambda x: np.exp(-x**2 / 3) * np.sin(2 * x),
    lambda x: 1 / (1 + x**2) ** 3,
    lambda x: np.exp(-x**4),
    lambda x: np.exp(-((x + 2) ** 2)) - 0.5 * np.exp(-((x - 1) ** 2) * 2),
]


def test_10_stein_equivalence():
    coarse, fine = GridSpec(20.0, 512, 4), GridSpec(20.0, 1024, 4)
    worst_c, worst_shift = 0.0, 0.0
    for b in (0.25, 0.5, 0.75):
        for f in SMOOTH:
            r1, r2 = stein_ratio(f(coarse.x), coarse, b), stein_ratio(f(fine.x), fine, b)
            worst_c = max(worst_c, r2, 1 / r2, r1, 1 / r1)
            worst_shift = max(worst_shift, abs(r1 / r2 - 1))
    ok = worst_c < 5 and worst_shift < 0.1
    record(10, ok, f"bracketing constant C = {worst_c:.3f} (< 5), refinement change "
                   f"{worst_shift:.2%} (< 10%)")
    assert ok
