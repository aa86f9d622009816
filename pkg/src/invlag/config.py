"""Flat ``key = value`` run configuration.

Example::

    # relativistic particle, constant force, quadratic drag
    preset = constant-force
    mass = 1
    lambda = 1
    gamma_const = 0.1
    alpha2 = 0.01
    x0 = 0
    v0 = 0
    dt = 1e-3
    t_end = 10

An explicit system uses ``mass``, ``alpha2``, ``U`` and ``gamma`` with comma
separated ascending coefficients.  Grids are ``lo, hi, n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .model import Polynomial, SystemSpec, example_system

PRESETS = ("constant-force",)
MODES = ("newton", "exact", "series")
TOL_KEYS = ("tol_pde_G", "tol_com_pde", "tol_euler_lagrange", "tol_limits", "tol_drift", "tol_roundtrip", "tol_dHdp")
FLOAT_KEYS = ("mass", "alpha2", "lambda", "gamma_const", "c", "x0", "v0", "dt", "t_end") + TOL_KEYS
POLY_KEYS = ("U", "gamma")
GRID_KEYS = ("grid_x", "grid_v", "grid_p")
KNOWN_KEYS = FLOAT_KEYS + POLY_KEYS + GRID_KEYS + ("preset", "N", "mode")


@dataclass
class RunConfig:
    spec: SystemSpec
    command: str = "verify"
    x0: float = 1.0
    v0: float = 0.0
    dt: float = 1e-3
    t_end: float = 10.0
    grid_x: tuple = (0.0, 2.0, 21)
    grid_v: tuple = None
    grid_p: tuple = (-0.5, 2.0, 21)
    N: int = 16
    mode: str = None
    tols: dict = field(default_factory=dict)
    out: str = None
    format: str = None


def _parse_lines(text):
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError("unknown key", line=lineno, key=key)
        if key in entries:
            raise ConfigError("duplicate key", line=lineno, key=key)
        if not value:
            raise ConfigError("empty value", line=lineno, key=key)
        entries[key] = (value, lineno)
    return entries


def _float(entries, key):
    value, lineno = entries[key]
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"not a number: {value!r}", line=lineno, key=key) from None


def _grid(entries, key):
    value, lineno = entries[key]
    parts = [s.strip() for s in value.split(",")]
    try:
        if len(parts) != 3:
            raise ValueError
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"grid must be 'lo, hi, n', got {value!r}", line=lineno, key=key) from None
    if not (hi > lo and n >= 2):
        raise ConfigError("grid bounds must be ordered and n >= 2", line=lineno, key=key)
    return lo, hi, n


def _poly(entries, key):
    value, lineno = entries[key]
    try:
        return Polynomial.parse(value)
    except ValueError:
        raise ConfigError(f"bad coefficient list {value!r}", line=lineno, key=key) from None


def _build_spec(entries):
    if "mass" not in entries:
        raise ConfigError("missing required key", key="mass")
    m = _float(entries, "mass")
    if "preset" in entries:
        preset, lineno = entries["preset"]
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}", line=lineno, key="preset")
        for k in POLY_KEYS:
            if k in entries:
                raise ConfigError("not allowed together with a preset", line=entries[k][1], key=k)
        for k in ("lambda", "gamma_const"):
            if k not in entries:
                raise ConfigError("missing required key for preset", line=lineno, key=k)
        if ("c" in entries) == ("alpha2" in entries):
            raise ConfigError("preset needs exactly one of 'c' or 'alpha2'", line=lineno)
        lam = _float(entries, "lambda")
        g = _float(entries, "gamma_const")
        try:
            if "c" in entries:
                return example_system(m, lam, g, _float(entries, "c"))
            base = example_system(m, lam, g)
            return SystemSpec(m=base.m, alpha2=_float(entries, "alpha2"), U=base.U, gamma=base.gamma)
        except ValueError as exc:
            raise ConfigError(str(exc), line=lineno, key="preset") from None
    for k in ("lambda", "gamma_const", "c"):
        if k in entries:
            raise ConfigError("only valid with a preset", line=entries[k][1], key=k)
    for k in ("alpha2", "U"):
        if k not in entries:
            raise ConfigError("missing required key", key=k)
    gamma = _poly(entries, "gamma") if "gamma" in entries else Polynomial()
    try:
        return SystemSpec(m=m, alpha2=_float(entries, "alpha2"), U=_poly(entries, "U"), gamma=gamma)
    except ValueError as exc:
        raise ConfigError(str(exc), line=entries["mass"][1]) from None


def parse_config(text: str, command: str = "verify") -> RunConfig:
    entries = _parse_lines(text)
    cfg = RunConfig(spec=_build_spec(entries), command=command)
    for k in ("x0", "v0", "dt", "t_end"):
        if k in entries:
            setattr(cfg, k, _float(entries, k))
    for k in ("dt", "t_end"):
        if not (getattr(cfg, k) > 0 and math.isfinite(getattr(cfg, k))):
            raise ConfigError("must be positive", line=entries.get(k, (None, None))[1], key=k)
    for k in GRID_KEYS:
        if k in entries:
            setattr(cfg, k, _grid(entries, k))
    if "N" in entries:
        value, lineno = entries["N"]
        try:
            cfg.N = int(value)
        except ValueError:
            raise ConfigError(f"not an integer: {value!r}", line=lineno, key="N") from None
        if cfg.N < 1:
            raise ConfigError("must be >= 1", line=lineno, key="N")
    if "mode" in entries:
        value, lineno = entries["mode"]
        if value not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}", line=lineno, key="mode")
        cfg.mode = value
    cfg.tols = {k: _float(entries, k) for k in TOL_KEYS if k in entries}
    return cfg


def load_config(path, command: str = "verify") -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), command)
