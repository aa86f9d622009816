"""``invlag <command> --config FILE [--out PATH] [--format csv|json]``

Exit status: 0 when every requested check passes, 1 when a check fails,
2 on configuration or evaluation errors.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import dynamics, inversion, variational, verify
from ._io import write_csv
from .config import RunConfig, load_config
from .errors import ConfigError, DomainError, UnsupportedSystemError
from .model import PhasePoint, Polynomial, State

COMMANDS = ("derive", "simulate", "hamiltonian", "invert", "verify", "limits")
OUTSIDE = "outside paper domain"


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


@contextlib.contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _emit_table(cfg, header, rows):
    rows = list(rows)
    with _open_out(cfg.out) as fh:
        if cfg.format == "json":
            json.dump(_jsonable({"columns": header, "rows": rows}), fh, indent=1)
            fh.write("\n")
        else:
            write_csv(fh, header, rows)


def _emit_json(cfg, doc):
    with _open_out(cfg.out) as fh:
        json.dump(_jsonable(doc), fh, indent=1)
        fh.write("\n")


def _axis(grid):
    lo, hi, n = grid
    return np.linspace(lo, hi, n)


def _v_grid(cfg):
    if cfg.grid_v is not None:
        return cfg.grid_v
    vmax = 0.9 / cfg.spec.alpha if cfg.spec.alpha2 > 0 else 1.0
    return (-vmax, vmax, 21)


def cmd_derive(cfg: RunConfig) -> int:
    spec = cfg.spec
    header = ["x", "v", "W", "G", "p", "L", "f2", "K"]
    rows = []
    for x in _axis(cfg.grid_x):
        for v in _axis(_v_grid(cfg)):
            d = variational.derive(spec, x, v)
            rows.append([x, v, d.W, d.G, d.p, d.L, d.f2, d.K])
    _emit_table(cfg, header, rows)
    return 0


def cmd_simulate(cfg: RunConfig) -> int:
    spec = cfg.spec
    mode = cfg.mode or "newton"
    traj = dynamics.integrate_newton(spec, State(cfg.x0, cfg.v0), cfg.dt, cfg.t_end)
    report = dynamics.drift_report(spec, traj)
    summary = {"newton": {"drift": report.to_dict(), "domain_exit": traj.domain_exit, "samples": len(traj)}}
    status = 0 if traj.completed else 1
    tol = cfg.tols.get("tol_drift")
    if tol is not None and report.rel_drift > tol:
        status = 1

    ham = None
    if mode != "newton":
        p0 = float(variational.momentum(spec, cfg.x0, cfg.v0))
        ham = dynamics.integrate_hamilton(spec, PhasePoint(cfg.x0, p0), cfg.dt, cfg.t_end, mode=mode, N=cfg.N)
        hrep = dynamics.drift_report(spec, ham)
        pn = np.atleast_1d(variational.momentum(spec, traj.x[: len(ham)], traj.v[: len(ham)]))
        summary[ham.method] = {
            "drift": hrep.to_dict(),
            "domain_exit": ham.domain_exit,
            "samples": len(ham),
            "max_abs_p_deviation_from_newton": float(np.max(np.abs(pn - ham.p[: len(pn)]))),
        }
        if not ham.completed:
            status = 1

    if cfg.format == "json":
        doc = {"summary": summary, "newton": _traj_doc(spec, traj)}
        if ham is not None:
            doc["hamilton"] = _traj_doc(spec, ham)
        _emit_json(cfg, doc)
    else:
        with _open_out(cfg.out) as fh:
            traj.to_csv(fh, spec)
        if ham is not None:
            if cfg.out is None:
                raise ConfigError("--out is required to write the Hamiltonian trajectory as CSV")
            path = Path(cfg.out)
            with open(path.with_name(path.stem + ".hamilton" + path.suffix), "w", encoding="utf-8", newline="") as fh:
                ham.to_csv(fh, spec)
    print(json.dumps(_jsonable(summary)), file=sys.stderr)
    return status


def _traj_doc(spec, traj):
    buf = io.StringIO()
    traj.to_csv(buf, spec)
    lines = buf.getvalue().splitlines()
    return {"method": traj.method, "dt": traj.dt, "domain_exit": traj.domain_exit,
            "columns": lines[0].split(","), "rows": [[float(v) for v in ln.split(",")] for ln in lines[1:]]}


def cmd_hamiltonian(cfg: RunConfig) -> int:
    spec = cfg.spec
    preset = spec.constant_force() is not None
    if cfg.mode == "series" and not preset:
        raise UnsupportedSystemError("series Hamiltonian needs the constant-force preset")
    if cfg.mode == "newton":
        raise ConfigError("mode 'newton' does not apply to the hamiltonian command", key="mode")
    header = ["x", "p", "v", "H_exact"]
    if preset:
        header += ["H_series", "discrepancy", "n_terms", "flag"] + [f"term_{n}" for n in range(cfg.N)]
    rows = []
    for x in _axis(cfg.grid_x):
        for p in _axis(cfg.grid_p):
            v = float(inversion.velocity_from_momentum(spec, x, p))
            H = float(variational.constant_of_motion(spec, x, v))
            row = [x, p, v, H]
            if preset:
                try:
                    Hs, trunc = inversion.series_hamiltonian(spec, x, p, cfg.N, full_output=True)
                except DomainError:
                    row += [math.nan, math.nan, 0, OUTSIDE] + [math.nan] * cfg.N
                else:
                    terms = list(trunc.terms) + [math.nan] * (cfg.N - trunc.N)
                    row += [Hs, Hs - H, trunc.N, "ok"] + terms
            rows.append(row)
    _emit_table(cfg, header, rows)
    return 0


def cmd_invert(cfg: RunConfig) -> int:
    spec = cfg.spec
    tol_rt = cfg.tols.get("tol_roundtrip", 1e-11)
    tol_dh = cfg.tols.get("tol_dHdp", 1e-6)
    header = ["x", "v", "p", "v_back", "rel_err", "dHdp", "rel_err_dHdp"]
    rows = []
    worst_rt = worst_dh = 0.0
    for x in _axis(cfg.grid_x):
        for v in _axis(_v_grid(cfg)):
            p = float(variational.momentum(spec, x, v))
            vb = float(inversion.velocity_from_momentum(spec, x, p))
            rel = abs(vb - v) / max(abs(v), verify.REL_FLOOR)
            h = 1e-5 * max(1.0, abs(p))
            dHdp = (float(inversion.hamiltonian(spec, x, p + h)) - float(inversion.hamiltonian(spec, x, p - h))) / (2 * h)
            rel_dh = abs(dHdp - vb) / max(abs(dHdp), abs(vb), verify.REL_FLOOR)
            worst_rt = max(worst_rt, rel)
            worst_dh = max(worst_dh, rel_dh)
            rows.append([x, v, p, vb, rel, dHdp, rel_dh])
    _emit_table(cfg, header, rows)
    print(json.dumps({"max_rel_roundtrip": worst_rt, "tol_roundtrip": tol_rt,
                      "max_rel_dHdp": worst_dh, "tol_dHdp": tol_dh}), file=sys.stderr)
    return 0 if (worst_rt <= tol_rt and worst_dh <= tol_dh) else 1


def _limits_report(cfg):
    spec = cfg.spec
    gamma_shape = spec.gamma if not spec.gamma.is_zero() else Polynomial((1.0,))
    alpha2_shape = spec.alpha2 if spec.alpha2 > 0 else 1.0
    return verify.check_limits(spec.m, spec.U, gamma_shape, alpha2_shape,
                               tol=cfg.tols.get("tol_limits", verify.TOL_LIMITS))


def _reports_out(cfg, reports):
    if cfg.format == "csv":
        header = ["name", "max_abs", "max_rel", "tol", "pass"]
        _emit_table(cfg, header, [[r.name, r.max_abs, r.max_rel, r.tol, str(r.passed).lower()] for r in reports])
    else:
        _emit_json(cfg, [r.to_dict() for r in reports])
    return 0 if all(r.passed for r in reports) else 1


def cmd_verify(cfg: RunConfig) -> int:
    spec = cfg.spec
    lo, hi, nx = cfg.grid_x
    vlo, vhi, nv = _v_grid(cfg)
    grid = verify.tensor_grid(spec, (lo, hi), nx, (vlo, vhi), nv)
    traj = dynamics.integrate_newton(spec, State(cfg.x0, cfg.v0), cfg.dt, cfg.t_end)
    reports = [
        verify.check_pde_G(spec, grid, tol=cfg.tols.get("tol_pde_G", verify.TOL_PDE_G)),
        verify.check_constant_of_motion_pde(spec, grid, tol=cfg.tols.get("tol_com_pde", verify.TOL_COM_PDE)),
        verify.check_euler_lagrange(spec, traj, tol=cfg.tols.get("tol_euler_lagrange", verify.TOL_EULER_LAGRANGE)),
        _limits_report(cfg),
    ]
    return _reports_out(cfg, reports)


def cmd_limits(cfg: RunConfig) -> int:
    return _reports_out(cfg, [_limits_report(cfg)])


HANDLERS = {
    "derive": cmd_derive,
    "simulate": cmd_simulate,
    "hamiltonian": cmd_hamiltonian,
    "invert": cmd_invert,
    "verify": cmd_verify,
    "limits": cmd_limits,
}


def run(cfg: RunConfig) -> int:
    if cfg.format is None:
        cfg.format = "json" if cfg.command in ("verify", "limits") else "csv"
    return HANDLERS[cfg.command](cfg)


def build_parser():
    parser = argparse.ArgumentParser(prog="invlag", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="key = value system/run file")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.command)
        cfg.out = args.out
        cfg.format = args.format
        return run(cfg)
    except (ConfigError, UnsupportedSystemError, DomainError, OSError, ValueError, ArithmeticError) as exc:
        print(f"invlag: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
