"""Problem family m dv/dt = (-U'(x) + gamma(x) v^2)(1 - alpha2 v^2).

U and gamma are polynomials so that the antiderivative of gamma and the
derivative of U are exact; all numerical error then lives in quadrature,
root finding and time stepping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError

#: |alpha v| must stay at or below this value.
VELOCITY_MARGIN = 1.0 - 1e-9


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial c0 + c1 x + c2 x^2 + ... with ascending coefficients.

    Trailing zeros are trimmed, so the zero polynomial has ``coeffs == ()``.
    Evaluation accepts scalars, arrays and complex arguments.
    """

    coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        c = [float(a) for a in self.coeffs]
        while c and c[-1] == 0.0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        """Build from a comma separated coefficient list, e.g. ``"0, 0, 0.5"``."""
        parts = [s.strip() for s in text.split(",") if s.strip()]
        return cls(tuple(float(s) for s in parts))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        x = np.asarray(x)
        if not self.coeffs:
            out = np.zeros_like(x, dtype=np.result_type(x, float))
        else:
            out = npoly.polyval(x, self.coeffs)
        return out[()] if np.ndim(out) == 0 else out

    def derivative(self) -> "Polynomial":
        if len(self.coeffs) <= 1:
            return Polynomial()
        return Polynomial(tuple(npoly.polyder(self.coeffs)))

    def antiderivative(self) -> "Polynomial":
        """Antiderivative vanishing at x = 0."""
        if not self.coeffs:
            return Polynomial()
        return Polynomial(tuple(npoly.polyint(self.coeffs)))

    def scale(self, factor: float) -> "Polynomial":
        return Polynomial(tuple(factor * a for a in self.coeffs))

    def __neg__(self) -> "Polynomial":
        return self.scale(-1.0)

    def coefficient(self, k: int) -> float:
        return self.coeffs[k] if k < len(self.coeffs) else 0.0


@dataclass(frozen=True)
class SystemSpec:
    """Full problem definition.

    Parameters
    ----------
    m : float
        Mass, strictly positive.
    alpha2 : float
        Relativistic-like coefficient alpha^2 >= 0.
    U : Polynomial
        Potential energy.
    gamma : Polynomial
        Position dependent coefficient of the v^2 force term.
    """

    m: float
    alpha2: float
    U: Polynomial
    gamma: Polynomial = Polynomial()
    Gamma: Polynomial = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.m > 0 and math.isfinite(self.m)):
            raise ValueError(f"mass must be positive and finite, got {self.m}")
        if not (self.alpha2 >= 0 and math.isfinite(self.alpha2)):
            raise ValueError(f"alpha2 must be finite and >= 0, got {self.alpha2}")
        if not isinstance(self.U, Polynomial):
            object.__setattr__(self, "U", Polynomial(tuple(self.U)))
        if not isinstance(self.gamma, Polynomial):
            object.__setattr__(self, "gamma", Polynomial(tuple(self.gamma)))
        object.__setattr__(self, "m", float(self.m))
        object.__setattr__(self, "alpha2", float(self.alpha2))
        object.__setattr__(self, "Gamma", self.gamma.antiderivative())

    @property
    def alpha(self) -> float:
        return math.sqrt(self.alpha2)

    @property
    def dU(self) -> Polynomial:
        return self.U.derivative()

    @property
    def vmax(self) -> float:
        """Largest admissible speed (inf when alpha2 == 0)."""
        if self.alpha2 == 0.0:
            return math.inf
        return VELOCITY_MARGIN / self.alpha

    def is_conservative(self) -> bool:
        return self.alpha2 == 0.0 and self.gamma.is_zero()

    def exponential_linear(self):
        """Return ``(u0, u1, g0)`` when U = u0 + u1 x and gamma = g0, else None.

        In that case the weight is a pure exponential in x and f2 has a
        closed form.
        """
        if self.U.degree <= 1 and self.gamma.degree <= 0:
            return self.U.coefficient(0), self.U.coefficient(1), self.gamma.coefficient(0)
        return None

    def constant_force(self):
        """Return ``(lam, gamma_const)`` if this is the constant-force preset.

        The preset is U = -lam x with lam > 0 and gamma(x) = -gamma_const.
        """
        lin = self.exponential_linear()
        if lin is None:
            return None
        u0, u1, g0 = lin
        if u0 != 0.0 or not u1 < 0.0:
            return None
        return -u1, -g0


@dataclass(frozen=True)
class State:
    x: float
    v: float


@dataclass(frozen=True)
class PhasePoint:
    x: float
    p: float


def check_velocity(spec: SystemSpec, v):
    """Raise DomainError if any ``|alpha v|`` exceeds the guarded bound."""
    if spec.alpha2 == 0.0:
        return
    av = spec.alpha * np.abs(np.real(v))
    if np.any(av > VELOCITY_MARGIN) or np.any(np.isnan(av)):
        worst = float(np.nanmax(av)) if np.size(av) else float("nan")
        raise DomainError(f"|alpha v| = {worst:.17g} exceeds {VELOCITY_MARGIN:.17g}")


def force(spec: SystemSpec, x, v):
    """Force per unit mass F(x, v) = (-U'(x) + gamma(x) v^2)(1 - alpha2 v^2) / m."""
    check_velocity(spec, v)
    x = np.asarray(x)
    v = np.asarray(v)
    out = (-spec.dU(x) + spec.gamma(x) * v * v) * (1.0 - spec.alpha2 * v * v) / spec.m
    return out[()] if np.ndim(out) == 0 else out


def relativistic_alpha2(c: float) -> float:
    """alpha^2 = 3 / (2 c^2) from the first-order expansion in v^2/c^2."""
    if not c > 0:
        raise ValueError(f"speed c must be positive, got {c}")
    return 1.5 / (c * c)


def example_system(m: float, lam: float, gamma_const: float, c: float = math.inf) -> SystemSpec:
    """Relativistic particle under a constant force with quadratic drag.

    m dv/dt = (lam - gamma_const v^2)(1 - alpha^2 v^2), alpha^2 = 3/(2 c^2),
    i.e. U = -lam x and gamma(x) = -gamma_const.  ``c = inf`` gives alpha2 = 0.
    """
    if not m > 0:
        raise ValueError(f"mass must be positive, got {m}")
    if not lam > 0:
        raise ValueError(f"force lambda must be positive, got {lam}")
    return SystemSpec(
        m=m,
        alpha2=relativistic_alpha2(c),
        U=Polynomial((0.0, -lam)),
        gamma=Polynomial((-gamma_const,)),
    )


def harmonic_system(m: float = 1.0, k: float = 1.0) -> SystemSpec:
    """Conservative oscillator U = k x^2 / 2."""
    return SystemSpec(m=m, alpha2=0.0, U=Polynomial((0.0, 0.0, 0.5 * k)))
