"""Velocity <-> momentum conversion and the Hamiltonian.

The exact route inverts p(x, v) numerically.  dp/dv = G > 0 on the whole
velocity domain, so the root is unique and a bracketed Newton iteration
with the analytic derivative is enough.

The series route is the closed-form construction for the constant-force
preset (U = -lam x, gamma = -gamma_const): power-matching the expansion

    p exp(2 x k / m) = (m/2) sum_n (2n+2)/(2n+1) alpha^(2n) v^(2n+1),   k = lam alpha^2 - gamma_const

gives a term-by-term value for v^(2n+1), from which H and Hamilton's
equations follow as truncated sums.  The power matching is not an exact
inversion of the momentum; the gap to the exact route is measured by the
diagnostics rather than assumed away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InversionError, UnsupportedSystemError
from .model import VELOCITY_MARGIN, SystemSpec
from .variational import atanh_ratio, constant_of_motion, f2, weight

ROOT_RTOL = 1e-13
ROOT_MAXITER = 200
SERIES_N = 16
SERIES_STOP = 1e-15


def _bracket(alpha2, v):
    """v/(1 - s) + atanh(alpha v)/alpha, i.e. 2 p / (m W)."""
    s = alpha2 * v * v
    return v * (1.0 / (1.0 - s) + atanh_ratio(s))


def _solve_bracket(alpha2: float, target: float) -> float:
    """Solve _bracket(alpha2, v) = target for v with |alpha v| <= margin."""
    if target == 0.0:
        return 0.0
    sign = 1.0 if target > 0 else -1.0
    b = abs(target)
    hi = VELOCITY_MARGIN / math.sqrt(alpha2)
    b_hi = float(_bracket(alpha2, hi))
    if b > b_hi:
        raise DomainError(
            f"momentum outside attainable range: |2p/(mW)| = {b:.6g} > {b_hi:.6g}"
        )
    lo = 0.0
    v = min(0.5 * b, 0.5 * hi)
    for _ in range(ROOT_MAXITER):
        g = float(_bracket(alpha2, v)) - b
        if g == 0.0:
            return sign * v
        if g > 0:
            hi = v
        else:
            lo = v
        one_minus_s = 1.0 - alpha2 * v * v
        step = g * one_minus_s * one_minus_s / 2.0
        v_new = v - step
        if not (lo <= v_new <= hi):
            v_new = 0.5 * (lo + hi)
        if abs(v_new - v) <= ROOT_RTOL * abs(v_new) or hi - lo <= ROOT_RTOL * hi:
            return sign * v_new
        v = v_new
    raise InversionError(f"velocity solve did not converge after {ROOT_MAXITER} iterations")


def velocity_from_momentum(spec: SystemSpec, x, p):
    """Unique v with momentum(spec, x, v) = p and |alpha v| inside the guarded domain."""
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    target = 2.0 * p / (spec.m * weight(spec, x))
    if spec.alpha2 == 0.0:
        out = 0.5 * target
    else:
        out = np.vectorize(lambda b: _solve_bracket(spec.alpha2, b), otypes=[float])(target)
    return out[()] if np.ndim(out) == 0 else out


def hamiltonian(spec: SystemSpec, x, p):
    """H(x, p) = K(x, v(x, p)) via exact inversion."""
    return constant_of_motion(spec, x, velocity_from_momentum(spec, x, p))


def hamilton_rhs_exact(spec: SystemSpec, x: float, p: float):
    """(dx/dt, dp/dt) for the exact Hamiltonian.

    dx/dt = dH/dp equals the inverted velocity identically; dp/dt = -dH/dx is
    taken by central difference.
    """
    v = float(velocity_from_momentum(spec, x, p))
    h = 1e-5 * max(1.0, abs(x))
    dHdx = (float(hamiltonian(spec, x + h, p)) - float(hamiltonian(spec, x - h, p))) / (2.0 * h)
    return v, -dHdx


@dataclass(frozen=True)
class SeriesTruncation:
    """Retained series terms.

    ``terms[n]`` is the n-th contribution (m/2) e^{-2xk/m} alpha^(2n) v^(2n+2)
    to H; ``N`` is how many were kept before the early stop.
    """

    N: int
    terms: tuple

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("a truncation keeps at least one term")
        if not all(math.isfinite(t) for t in self.terms):
            raise ValueError("non-finite series term")


def _preset(spec: SystemSpec):
    cf = spec.constant_force()
    if cf is None:
        raise UnsupportedSystemError(
            "series construction needs the constant-force preset (U = -lam x, gamma constant)"
        )
    return cf


def series_velocity_power(spec: SystemSpec, x: float, p: float, n: int) -> float:
    """Term value for v^(2n+1): (2n+1)/(n+1)! (2 lam x/m)^n (p/m) e^{-2 gamma x/m}."""
    lam, g = _preset(spec)
    m = spec.m
    if n >= 1 and not (x > 0 and p > 0):
        raise DomainError(f"series term n={n} requires x > 0 and p > 0 (x={x}, p={p})")
    return (2 * n + 1) / math.factorial(n + 1) * (2.0 * lam * x / m) ** n * (p / m) * math.exp(-2.0 * g * x / m)


def _series_check(x, p, N):
    if N < 1:
        raise ValueError(f"truncation N must be >= 1, got {N}")
    if not (x > 0 and p > 0):
        raise DomainError(f"series Hamiltonian has meaning only for x > 0 and p > 0 (x={x}, p={p})")


def _series_powers(spec, x, p, N):
    """Velocity-power values T_n and the per-term alpha^(2n) T_n^((2n+2)/(2n+1)).

    Stops early once a term adds less than SERIES_STOP relative to the partial sum.
    """
    a2 = spec.alpha2
    T, terms = [], []
    total = 0.0
    for n in range(N):
        t = series_velocity_power(spec, x, p, n)
        term = a2**n * t ** ((2 * n + 2) / (2 * n + 1))
        if not math.isfinite(term):
            raise DomainError(f"non-finite series term at n={n}")
        T.append(t)
        terms.append(term)
        total += term
        if n >= 1 and abs(term) < SERIES_STOP * abs(total):
            break
    return T, terms


def series_hamiltonian(spec: SystemSpec, x: float, p: float, N: int = SERIES_N, full_output=False):
    """Truncated series Hamiltonian for the constant-force preset.

    Returns H, or ``(H, SeriesTruncation)`` with ``full_output=True``.
    """
    lam, g = _preset(spec)
    _series_check(x, p, N)
    m = spec.m
    k = lam * spec.alpha2 - g
    pref = 0.5 * m * math.exp(-2.0 * x * k / m)
    _, terms = _series_powers(spec, x, p, N)
    H = pref * math.fsum(terms) + float(f2(spec, x))
    if full_output:
        return H, SeriesTruncation(N=len(terms), terms=tuple(pref * t for t in terms))
    return H


def hamilton_rhs_series(spec: SystemSpec, x: float, p: float, N: int = SERIES_N):
    """Truncated series forms of dx/dt and dp/dt for the constant-force preset."""
    lam, g = _preset(spec)
    _series_check(x, p, N)
    m = spec.m
    a2 = spec.alpha2
    k = lam * a2 - g
    T, _ = _series_powers(spec, x, p, N)
    y = 2.0 * lam * x / m
    decay = math.exp(-2.0 * lam * a2 * x / m)

    xdot = decay * math.fsum(
        (2.0 * lam * a2 * x / m) ** n / math.factorial(n) * t ** (1.0 / (2 * n + 1))
        for n, t in enumerate(T)
    )
    S = math.fsum(a2**n * t ** ((2 * n + 2) / (2 * n + 1)) for n, t in enumerate(T))
    first = math.exp(-2.0 * x * k / m) * (lam + k * S)
    second = (2.0 * p / m) * decay * math.fsum(
        a2**n / math.factorial(n)
        * (-g * y**n + (lam * n * y ** (n - 1) if n else 0.0))
        * t ** (1.0 / (2 * n + 1))
        for n, t in enumerate(T)
    )
    return xdot, first - second
