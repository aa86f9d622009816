"""Residual checks for the constructed Lagrangian, kernel and constant of motion.

Each check returns a ResidualReport. Relative residuals are pointwise, scaled
by the larger of the two compared terms with an absolute floor. Callers
can swap in their own kernel or constant of motion (fault injection); these
are differentiated by complex step, so they must accept complex arguments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dynamics import Trajectory
from .model import Polynomial, SystemSpec, force
from .variational import (
    constant_of_motion,
    f2,
    kernel_G,
    lagrangian,
    log_weight_derivative,
    momentum,
    weight,
)

REL_FLOOR = 1e-30
TOL_PDE_G = 1e-10
TOL_COM_PDE = 1e-10
TOL_EULER_LAGRANGE = 1e-6
TOL_LIMITS = 0.2
_CSTEP = 1e-30


@dataclass(frozen=True)
class ResidualReport:
    name: str
    params: dict
    max_abs: float
    max_rel: float
    tol: float
    passed: bool
    mode: str = "rel"

    def to_dict(self):
        return {
            "name": self.name,
            "params": self.params,
            "max_abs": self.max_abs,
            "max_rel": self.max_rel,
            "tol": self.tol,
            "pass": self.passed,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


@dataclass(frozen=True)
class Grid:
    """Tensor-product (x, v) grid."""

    X: np.ndarray
    V: np.ndarray
    descriptor: dict = field(default_factory=dict)


def tensor_grid(spec: SystemSpec, x_range=(0.0, 2.0), nx=21, v_range=None, nv=21) -> Grid:
    """Uniform grid; v defaults to +-0.9/alpha (or +-1 when alpha2 = 0)."""
    if v_range is None:
        vmax = 0.9 / spec.alpha if spec.alpha2 > 0 else 1.0
        v_range = (-vmax, vmax)
    x = np.linspace(x_range[0], x_range[1], nx)
    v = np.linspace(v_range[0], v_range[1], nv)
    X, V = np.meshgrid(x, v, indexing="ij")
    desc = {"x_range": [float(x_range[0]), float(x_range[1])], "nx": nx,
            "v_range": [float(v_range[0]), float(v_range[1])], "nv": nv}
    return Grid(X, V, desc)


def _spec_params(spec):
    return {"m": spec.m, "alpha2": spec.alpha2, "U": list(spec.U.coeffs), "gamma": list(spec.gamma.coeffs)}


def _cancel_report(name, spec, a, b, tol, params):
    """Report for an identity a + b = 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    r = np.abs(a + b)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), REL_FLOOR)
    max_abs = float(np.max(r))
    max_rel = float(np.max(r / scale))
    return ResidualReport(name, {**_spec_params(spec), **params}, max_abs, max_rel, tol, max_rel <= tol)


def check_pde_G(spec: SystemSpec, grid: Grid = None, kernel=None, tol: float = TOL_PDE_G) -> ResidualReport:
    """v dG/dx + d(F G)/dv = 0 on the grid.

    With ``kernel=None`` the built-in kernel and its closed-form derivatives
    are used.  Otherwise ``kernel(x, v)`` is differentiated by complex step.
    """
    grid = grid or tensor_grid(spec)
    X, V = grid.X, grid.V
    if kernel is None:
        W = weight(spec, X)
        G = kernel_G(spec, X, V)
        one_minus_s = 1.0 - spec.alpha2 * V * V
        g = spec.gamma(X)
        dU = spec.dU(X)
        a = V * G * log_weight_derivative(spec, X)
        b = W * (2.0 * g * V / one_minus_s + 2.0 * spec.alpha2 * V * (-dU + g * V * V) / one_minus_s**2)
    else:
        a = V * np.imag(kernel(X + 1j * _CSTEP, V)) / _CSTEP
        Vc = V + 1j * _CSTEP
        b = np.imag(force(spec, X, Vc) * kernel(X, Vc)) / _CSTEP
    return _cancel_report("pde_G", spec, a, b, tol, {"grid": grid.descriptor, "custom_kernel": kernel is not None})


def check_constant_of_motion_pde(
    spec: SystemSpec, grid: Grid = None, constant=None, tol: float = TOL_COM_PDE
) -> ResidualReport:
    """v dK/dx + F dK/dv = 0 on the grid (closed-form derivatives by default)."""
    grid = grid or tensor_grid(spec)
    X, V = grid.X, grid.V
    F = force(spec, X, V)
    if constant is None:
        W = weight(spec, X)
        one_minus_s = 1.0 - spec.alpha2 * V * V
        dKdx = 0.5 * spec.m * V * V / one_minus_s * W * log_weight_derivative(spec, X) + spec.dU(X) * W
        dKdv = spec.m * W * V / one_minus_s**2
    else:
        dKdx = np.imag(constant(X + 1j * _CSTEP, V)) / _CSTEP
        dKdv = np.imag(constant(X, V + 1j * _CSTEP)) / _CSTEP
    return _cancel_report(
        "constant_of_motion_pde", spec, V * dKdx, F * dKdv, tol,
        {"grid": grid.descriptor, "custom_constant": constant is not None},
    )


def check_euler_lagrange(spec: SystemSpec, traj: Trajectory, tol: float = TOL_EULER_LAGRANGE) -> ResidualReport:
    """d/dt (dL/dv) = dL/dx along recorded samples.

    dp/dt uses the 5-point stencil over the stored momenta, dL/dx a central
    difference; endpoints without a full stencil are skipped.
    """
    n = len(traj)
    if n < 5:
        raise ValueError(f"Euler-Lagrange check needs at least 5 samples, got {n}")
    x = np.asarray(traj.x, dtype=float)
    v = np.asarray(traj.v, dtype=float)
    dt = float(traj.dt)
    p = np.atleast_1d(momentum(spec, x, v))
    dpdt = (p[:-4] - 8.0 * p[1:-3] + 8.0 * p[3:-1] - p[4:]) / (12.0 * dt)
    xi, vi = x[2:-2], v[2:-2]
    h = 1e-5 * np.maximum(1.0, np.abs(xi))
    dLdx = (lagrangian(spec, xi + h, vi) - lagrangian(spec, xi - h, vi)) / (2.0 * h)
    return _cancel_report(
        "euler_lagrange", spec, dpdt, -dLdx, tol,
        {"samples": n, "dt": dt, "method": traj.method},
    )


def _conservative_forms(m, U, x, v):
    dU = float(U(x) - U(0.0))
    return {"L": 0.5 * m * v * v - dU, "p": m * v, "K": 0.5 * m * v * v + dU, "f2": dU}


def _fields(spec, x, v):
    return {
        "L": float(lagrangian(spec, x, v)),
        "p": float(momentum(spec, x, v)),
        "K": float(constant_of_motion(spec, x, v)),
        "f2": float(f2(spec, x)),
    }


def check_limits(
    m: float,
    U: Polynomial,
    gamma_shape: Polynomial = Polynomial((1.0,)),
    alpha2_shape: float = 1.0,
    x: float = 0.7,
    v: float = 0.5,
    ks=range(2, 9),
    tol: float = TOL_LIMITS,
    endpoint_tol: float = 1e-15,
) -> ResidualReport:
    """Convergence to the conservative forms as gamma, alpha2 -> 0.

    The family is gamma = eps * gamma_shape, alpha2 = eps * alpha2_shape with
    eps = 10^-k.  A first-order approach means successive errors shrink by
    10; ``max_rel`` is the worst deviation |ratio/10 - 1| over L, p, K, f2.
    ``max_abs`` is the largest relative error at eps = 0 itself, which must
    not exceed ``endpoint_tol``.
    """
    ks = list(ks)
    target = _conservative_forms(m, U, x, v)
    scale = {q: max(abs(c), REL_FLOOR) for q, c in target.items()}
    errors = {q: [] for q in target}
    for k in ks:
        eps = 10.0 ** (-k)
        spec = SystemSpec(m=m, alpha2=eps * alpha2_shape, U=U, gamma=gamma_shape.scale(eps))
        vals = _fields(spec, x, v)
        for q in target:
            errors[q].append(abs(vals[q] - target[q]))

    endpoint = _fields(SystemSpec(m=m, alpha2=0.0, U=U), x, v)
    end_err = max(abs(endpoint[q] - target[q]) / scale[q] for q in target)

    ratios = {}
    worst = 0.0
    for q, e in errors.items():
        # a quantity that never moves (e.g. f2 for constant U) carries no slope
        if max(e) <= 1e-14 * scale[q]:
            continue
        r = [e[i] / e[i + 1] if e[i + 1] > 0 else np.inf for i in range(len(e) - 1)]
        ratios[q] = r
        worst = max(worst, max(abs(ri / 10.0 - 1.0) for ri in r))

    params = {
        "m": m, "U": list(U.coeffs), "gamma_shape": list(gamma_shape.coeffs), "alpha2_shape": alpha2_shape,
        "x": x, "v": v, "k": ks, "errors": errors, "ratios": ratios, "endpoint_tol": endpoint_tol,
    }
    passed = worst <= tol and end_err <= endpoint_tol and bool(ratios)
    return ResidualReport("limits", params, end_err, worst, tol, passed)
