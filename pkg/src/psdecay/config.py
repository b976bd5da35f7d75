"""Experiment configuration: INI-style sections of key = value lines.

    [grid]      L, M, N
    [datum]     kind and its modifiers (flat keys)
    [solver]    time-stepping settings
    [scenario]  name and scenario parameters; lists are comma separated

Unknown sections and keys are errors.  ``serialize`` emits a canonical text
(fixed section and key order, canonical number formatting) that parses back
to an equal configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import ConfigError
from .reporting import fmt

SCENARIOS = (
    "linear-weights",
    "tail-falsification",
    "soliton-run",
    "conservation",
    "uc-identity",
    "check-conditions",
)
DATUM_KINDS = ("gaussian", "soliton", "zero")
DISPERSIONS = ("full", "x-only", "y-only")


# -- value parsers --------------------------------------------------------


def _float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"{text!r} is not finite")
    return v


def _int(text: str) -> int:
    return int(text)


def _bool(text: str) -> bool:
    t = text.lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


def _list(item: Callable[[str], Any]) -> Callable[[str], tuple]:
    def parse(text: str) -> tuple:
        parts = [p.strip() for p in text.split(",")]
        if not parts or any(not p for p in parts):
            raise ValueError(f"malformed list {text!r}")
        return tuple(item(p) for p in parts)
    return parse


def _choice(options: tuple[str, ...]) -> Callable[[str], str]:
    def parse(text: str) -> str:
        t = text.strip().lower()
        if t not in options:
            raise ValueError(f"{text!r} is not one of {', '.join(options)}")
        return t
    return parse


def _text(text: str) -> str:
    return text


def _render(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(_render(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)  # shortest text that reads back to the same float
    return str(value)


# section -> key -> parser; dict order is the canonical order
SCHEMA: dict[str, dict[str, Callable[[str], Any]]] = {
    "grid": {"L": _float, "M": _int, "N": _int},
    "datum": {
        "kind": _choice(DATUM_KINDS),
        "c": _float,
        "x0": _float,
        "sigma": _float,
        "carrier": _float,
        "eta0": _int,
        "amplitude": _float,
        "offset": _float,
        "derivative": _bool,
        "project_lmax": _int,
        "noise": _float,
    },
    "solver": {
        "dt": _float,
        "T": _float,
        "snapshot_stride": _int,
        "dealias": _bool,
        "wraparound_budget": _float,
        "zero_mode_tolerance": _float,
        "log_stride": _int,
        "sample_stride": _int,
    },
    "scenario": {
        "name": _choice(SCENARIOS),
        "dispersion": _choice(DISPERSIONS),
        "nu": _list(_float),
        "thetas": _list(_float),
        "times": _list(_float),
        "etas": _list(_int),
        "window": _list(_float),
        "tol": _float,
        "cauchy_tol": _float,
        "t1": _float,
        "t2": _float,
        "seed": _int,
        "output": _text,
    },
}

DEFAULTS = {
    ("datum", "kind"): "gaussian",
    ("datum", "c"): 1.0,
    ("datum", "x0"): 0.0,
    ("datum", "sigma"): 1.0,
    ("datum", "carrier"): 0.0,
    ("datum", "amplitude"): 1.0,
    ("datum", "offset"): 0.0,
    ("datum", "derivative"): False,
    ("datum", "noise"): 0.0,
    ("solver", "snapshot_stride"): 1,
    ("solver", "dealias"): True,
    ("solver", "wraparound_budget"): 1e-6,
    ("solver", "zero_mode_tolerance"): 1e-10,
    ("solver", "log_stride"): 1,
    ("solver", "sample_stride"): 1,
    ("scenario", "dispersion"): "full",
    ("scenario", "nu"): (1.0,),
    ("scenario", "tol"): 1e-8,
    ("scenario", "cauchy_tol"): 1e-2,
    ("scenario", "seed"): 0,
    ("scenario", "output"): "out",
}

# keys each scenario cannot run without
REQUIRED = {
    "linear-weights": (("scenario", "thetas"), ("scenario", "times")),
    "tail-falsification": (("scenario", "times"), ("scenario", "etas"), ("scenario", "window")),
    "soliton-run": (("solver", "dt"), ("solver", "T")),
    "conservation": (("solver", "dt"), ("solver", "T")),
    "uc-identity": (("solver", "dt"), ("solver", "T"), ("scenario", "t1"), ("scenario", "t2")),
    "check-conditions": (("scenario", "thetas"),),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Explicitly given settings per section; ``get`` falls back to defaults."""

    sections: dict[str, dict[str, Any]] = field(default_factory=dict)

    def get(self, section: str, key: str, default=None):
        value = self.sections.get(section, {}).get(key)
        if value is not None:
            return value
        return DEFAULTS.get((section, key), default)

    def has(self, section: str, key: str) -> bool:
        return key in self.sections.get(section, {})

    @property
    def name(self) -> str:
        return self.get("scenario", "name")

    def with_value(self, section: str, key: str, value) -> "ScenarioConfig":
        sections = {s: dict(v) for s, v in self.sections.items()}
        sections.setdefault(section, {})[key] = value
        return ScenarioConfig(sections)

    def __eq__(self, other):
        return isinstance(other, ScenarioConfig) and self.sections == other.sections


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate configuration text."""
    sections: dict[str, dict[str, Any]] = {}
    lines: dict[tuple[str, str], int] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw.strip()!r}", line=lineno)
            current = line[1:-1].strip().lower()
            if current not in SCHEMA:
                raise ConfigError(f"unknown section [{current}]", line=lineno)
            if current in sections:
                raise ConfigError(f"duplicate section [{current}]", line=lineno)
            sections[current] = {}
            continue
        if current is None:
            raise ConfigError("key outside of any section", line=lineno)
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"expected key = value, got {raw.strip()!r}", line=lineno)
        if key not in SCHEMA[current]:
            raise ConfigError(f"unknown key {key!r} in [{current}]", line=lineno, field=key)
        if key in sections[current]:
            raise ConfigError(f"duplicate key {key!r}", line=lineno, field=key)
        try:
            sections[current][key] = SCHEMA[current][key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}", line=lineno, field=key) from None
        lines[(current, key)] = lineno
    cfg = ScenarioConfig(sections)
    validate(cfg, lines)
    return cfg


def _fail(msg, section, key, lines):
    raise ConfigError(f"{section}.{key}: {msg}", line=(lines or {}).get((section, key)), field=key)


def validate(cfg: ScenarioConfig, lines=None) -> ScenarioConfig:
    """Check cross-field constraints; raises ConfigError naming the field."""
    if not cfg.has("scenario", "name"):
        _fail("scenario name is required", "scenario", "name", lines)
    for key in ("L", "M", "N"):
        if not cfg.has("grid", key):
            _fail("required", "grid", key, lines)
    if not cfg.get("grid", "L") > 0:
        _fail("must be positive", "grid", "L", lines)
    for key in ("M", "N"):
        v = cfg.get("grid", key)
        if v <= 0 or v % 2:
            _fail("must be an even positive integer", "grid", key, lines)
    for section, key in REQUIRED[cfg.name]:
        if not cfg.has(section, key):
            _fail(f"required by scenario {cfg.name}", section, key, lines)

    for th in cfg.get("scenario", "thetas", ()) or ():
        if th < 0:
            _fail(f"theta must be >= 0, got {fmt(th)}", "scenario", "thetas", lines)
    for t in cfg.get("scenario", "times", ()) or ():
        if t < 0:
            _fail(f"times must be >= 0, got {fmt(t)}", "scenario", "times", lines)
    window = cfg.get("scenario", "window")
    if window is not None and (len(window) != 2 or not 0 < window[0] < window[1]):
        _fail("window must be two numbers 0 < R1 < R2", "scenario", "window", lines)
    for key in ("tol", "cauchy_tol"):
        if not cfg.get("scenario", key) > 0:
            _fail("must be positive", "scenario", key, lines)
    if cfg.has("scenario", "t1") or cfg.has("scenario", "t2"):
        t1, t2 = cfg.get("scenario", "t1", 0.0), cfg.get("scenario", "t2", 0.0)
        if not 0 <= t1 < t2:
            _fail("need 0 <= t1 < t2", "scenario", "t2", lines)
        if cfg.has("solver", "T") and t2 > cfg.get("solver", "T") + 1e-12:
            _fail("t2 exceeds the run length T", "scenario", "t2", lines)

    for key in ("dt", "T", "wraparound_budget", "zero_mode_tolerance"):
        if cfg.has("solver", key) and not cfg.get("solver", key) > 0:
            _fail("must be positive", "solver", key, lines)
    if cfg.has("solver", "dt") and cfg.has("solver", "T") and cfg.get("solver", "dt") > cfg.get("solver", "T"):
        _fail("dt exceeds T", "solver", "dt", lines)
    for key in ("snapshot_stride", "log_stride", "sample_stride"):
        if cfg.get("solver", key) < 1:
            _fail("must be a positive integer", "solver", key, lines)

    kind = cfg.get("datum", "kind")
    if kind == "soliton" and not cfg.get("datum", "c") > 0:
        _fail("soliton speed must be positive", "datum", "c", lines)
    if not cfg.get("datum", "sigma") > 0:
        _fail("must be positive", "datum", "sigma", lines)
    if cfg.has("datum", "project_lmax") and not 0 <= cfg.get("datum", "project_lmax") <= 3:
        _fail("must lie in 0..3", "datum", "project_lmax", lines)
    if cfg.has("datum", "eta0") and abs(cfg.get("datum", "eta0")) > cfg.get("grid", "N") // 2:
        _fail("outside the y-lattice", "datum", "eta0", lines)
    if cfg.get("datum", "noise") < 0:
        _fail("must be >= 0", "datum", "noise", lines)
    return cfg


def serialize(cfg: ScenarioConfig) -> str:
    """Canonical text: schema order, one blank line between sections."""
    blocks = []
    for section, keys in SCHEMA.items():
        given = cfg.sections.get(section)
        if given is None:
            continue
        body = [f"{key} = {_render(given[key])}" for key in keys if key in given]
        blocks.append("\n".join([f"[{section}]"] + body))
    return "\n\n".join(blocks) + "\n"
