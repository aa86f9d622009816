"""Lagrangian, momentum and constant of motion for the drag family.

Every quantity shares the position weight

    W(x) = exp[-(2/m) (Gamma(x) - alpha2 U(x))],   Gamma' = gamma, Gamma(0) = 0,

and the velocity enters through s = alpha2 v^2.  With the gauge term f1 v
dropped and f2(0) = 0:

    G = m W / (1 - s)^2
    p = (m/2) [v / (1 - s) + atanh(alpha v) / alpha] W
    L = (m v / (2 alpha)) atanh(alpha v) W - f2(x)
    K = m v^2 / (2 (1 - s)) W + f2(x),      f2' = U' W.

The 0/0 forms at alpha -> 0 are evaluated by their Maclaurin series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import QuadratureError, WeightOverflowError
from .model import SystemSpec, check_velocity

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 60

# below this s = alpha^2 v^2 the series branch is used
SMALL_S = 1e-8
_MAX_EXPONENT = 709.0


def _scalar(a):
    return a[()] if np.ndim(a) == 0 else a


def atanh_ratio(s):
    """atanh(sqrt(s)) / sqrt(s) for 0 <= s < 1, exact at s = 0.

    Accepts complex ``s`` (used by complex-step differentiation).
    """
    s = np.asarray(s)
    small = np.abs(s) < SMALL_S
    r = np.sqrt(np.where(small, 0.25, s))
    big = np.arctanh(r) / r
    series = 1.0 + s / 3.0 + s * s / 5.0
    return _scalar(np.where(small, series, big))


def expm1_ratio(z):
    """(exp(z) - 1) / z with the removable singularity at z = 0 filled in."""
    z = np.asarray(z)
    small = np.abs(z) < 1e-5
    zz = np.where(small, 1.0, z)
    big = np.expm1(zz) / zz
    series = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    return _scalar(np.where(small, series, big))


def log_weight(spec: SystemSpec, x):
    """Exponent of the weight, -(2/m) (Gamma(x) - alpha2 U(x))."""
    x = np.asarray(x)
    return _scalar(-(2.0 / spec.m) * (spec.Gamma(x) - spec.alpha2 * spec.U(x)))


def log_weight_derivative(spec: SystemSpec, x):
    """d/dx of the exponent: -(2/m) (gamma(x) - alpha2 U'(x))."""
    x = np.asarray(x)
    return _scalar(-(2.0 / spec.m) * (spec.gamma(x) - spec.alpha2 * spec.dU(x)))


def weight(spec: SystemSpec, x):
    """Position weight W(x); raises WeightOverflowError instead of returning inf."""
    e = np.asarray(log_weight(spec, x))
    if np.any(np.real(e) > _MAX_EXPONENT):
        worst = float(np.max(np.real(e)))
        raise WeightOverflowError(f"weight exponent {worst:.6g} overflows double precision")
    return _scalar(np.exp(e))


def kernel_G(spec: SystemSpec, x, v):
    """Second velocity derivative of L: m W(x) / (1 - alpha2 v^2)^2."""
    check_velocity(spec, v)
    v = np.asarray(v)
    one_minus_s = 1.0 - spec.alpha2 * v * v
    return _scalar(spec.m * weight(spec, x) / (one_minus_s * one_minus_s))


def momentum(spec: SystemSpec, x, v):
    """Generalized momentum dL/dv."""
    check_velocity(spec, v)
    v = np.asarray(v)
    s = spec.alpha2 * v * v
    bracket = v * (1.0 / (1.0 - s) + atanh_ratio(s))
    return _scalar(0.5 * spec.m * bracket * weight(spec, x))


def _quad(func, a, b, what):
    y, abserr, info, *msg = integrate.quad(
        func, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT, full_output=1
    )
    if msg:
        raise QuadratureError(
            f"{what}: quadrature on [{a:.6g}, {b:.6g}] did not converge "
            f"(estimated error {abserr:.3g}): {msg[0].splitlines()[0]}",
            achieved=abserr,
        )
    return y


def f2(spec: SystemSpec, x):
    """Position part of the Lagrangian, f2(x) = int_0^x U'(s) W(s) ds.

    Closed forms are used when W is constant or a pure exponential
    (U linear, gamma constant); everything else goes through adaptive
    Gauss-Kronrod quadrature.
    """
    x = np.asarray(x)
    if spec.alpha2 == 0.0 and spec.gamma.is_zero():
        return _scalar(spec.U(x) - spec.U(0.0))
    lin = spec.exponential_linear()
    if lin is not None:
        # constants in the working precision of x, so longdouble runs stay consistent
        work = np.result_type(x, float)
        u0, u1, g0, alpha2, m = (np.asarray(c, dtype=work) for c in lin + (spec.alpha2, spec.m))
        # W(x) = W0 exp(-a x)
        a = (2.0 / m) * (g0 - alpha2 * u1)
        w0 = np.exp(2.0 * alpha2 * u0 / m)
        return _scalar(u1 * w0 * x * expm1_ratio(-a * x))

    dU = spec.dU

    def integrand(s):
        return dU(s) * weight(spec, s)

    flat = np.atleast_1d(x).astype(float)
    out = np.array([_quad(integrand, 0.0, xi, "f2") if xi != 0.0 else 0.0 for xi in flat.ravel()])
    return _scalar(out.reshape(x.shape))


def lagrangian(spec: SystemSpec, x, v):
    """Closed-form Lagrangian with the gauge term dropped."""
    check_velocity(spec, v)
    v = np.asarray(v)
    s = spec.alpha2 * v * v
    kinetic = 0.5 * spec.m * v * v * atanh_ratio(s) * weight(spec, x)
    return _scalar(kinetic - f2(spec, x))


def constant_of_motion(spec: SystemSpec, x, v):
    """K(x, v) = v dL/dv - L."""
    check_velocity(spec, v)
    v = np.asarray(v)
    s = spec.alpha2 * v * v
    return _scalar(0.5 * spec.m * v * v / (1.0 - s) * weight(spec, x) + f2(spec, x))


def lagrangian_from_kernel(spec: SystemSpec, x, v):
    """L by integrating the kernel twice in velocity (nested quadrature).

    Independent of the closed form; used to cross-check it.
    """
    check_velocity(spec, v)
    x = float(x)
    v = float(v)
    if v == 0.0:
        return -float(f2(spec, x))

    def inner(w):
        if w == 0.0:
            return 0.0
        return _quad(lambda u: float(kernel_G(spec, x, u)), 0.0, w, "inner kernel integral")

    return _quad(inner, 0.0, v, "outer kernel integral") - float(f2(spec, x))


@dataclass(frozen=True)
class DerivedFields:
    """All constructed quantities at one evaluation point (or grid)."""

    W: object
    G: object
    p: object
    L: object
    f2: object
    K: object


def derive(spec: SystemSpec, x, v) -> DerivedFields:
    return DerivedFields(
        W=weight(spec, x),
        G=kernel_G(spec, x, v),
        p=momentum(spec, x, v),
        L=lagrangian(spec, x, v),
        f2=f2(spec, x),
        K=constant_of_motion(spec, x, v),
    )
