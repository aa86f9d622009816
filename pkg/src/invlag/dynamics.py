"""Fixed-step RK4 integration of the Newtonian and Hamiltonian flows."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._io import write_csv
from .errors import DomainError
from .inversion import SERIES_N, hamilton_rhs_exact, hamilton_rhs_series, velocity_from_momentum
from .model import PhasePoint, State, SystemSpec, check_velocity, force
from .variational import constant_of_motion, f2, momentum

MAX_SAMPLES = 10_000_000
DRIFT_FLOOR = 1e-30


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled solution curve.

    ``p`` is filled for Hamiltonian runs (together with the companion
    velocity ``v``).  ``domain_exit`` holds the time at which a step was
    rejected for leaving the velocity domain, or None if the run completed.
    """

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    dt: float
    method: str
    p: Optional[np.ndarray] = None
    domain_exit: Optional[float] = None

    def __len__(self):
        return len(self.t)

    @property
    def completed(self) -> bool:
        return self.domain_exit is None

    def to_csv(self, fh, spec: SystemSpec):
        """Newton runs: ``t,x,v,p,K``; Hamiltonian runs: ``t,x,p,v,H``."""
        if self.p is None:
            p = momentum(spec, self.x, self.v)
            K = constant_of_motion(spec, self.x, self.v)
            rows = zip(self.t, self.x, self.v, np.atleast_1d(p), np.atleast_1d(K))
            write_csv(fh, ["t", "x", "v", "p", "K"], rows)
        else:
            H = constant_of_motion(spec, self.x, self.v)
            rows = zip(self.t, self.x, self.p, self.v, np.atleast_1d(H))
            write_csv(fh, ["t", "x", "p", "v", "H"], rows)


def _n_steps(dt, t_end):
    if not (dt > 0 and t_end > 0):
        raise ValueError(f"dt and t_end must be positive (dt={dt}, t_end={t_end})")
    # a trailing partial step is dropped
    n = int(math.floor(t_end / dt * (1.0 + 1e-12)))
    if n + 1 > MAX_SAMPLES:
        raise ValueError(f"{n + 1} samples exceeds the limit of {MAX_SAMPLES}")
    return n


def rk4(rhs: Callable, y0, dt: float, n_steps: int, accept: Optional[Callable] = None, dtype=np.float64):
    """Classical RK4 on a 2-component state.

    ``rhs(y0, y1) -> (dy0, dy1)``.  A DomainError raised by ``rhs`` or by
    ``accept(y0, y1)`` on the new state stops the run.  Returns the sample
    array (k+1, 2) and the index of the rejected step (None if none).
    All arithmetic is carried out in ``dtype``.
    """
    ys = np.empty((n_steps + 1, 2), dtype=dtype)
    a, b = dtype(y0[0]), dtype(y0[1])
    ys[0] = a, b
    dt = dtype(dt)
    h2 = dt / 2
    for i in range(n_steps):
        try:
            k1a, k1b = rhs(a, b)
            k2a, k2b = rhs(a + h2 * k1a, b + h2 * k1b)
            k3a, k3b = rhs(a + h2 * k2a, b + h2 * k2b)
            k4a, k4b = rhs(a + dt * k3a, b + dt * k3b)
            na = a + dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
            nb = b + dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
            if accept is not None:
                accept(na, nb)
        except DomainError:
            return ys[: i + 1], i
        a, b = na, nb
        ys[i + 1] = a, b
    return ys, None


def integrate_newton(spec: SystemSpec, s0: State, dt: float, t_end: float, dtype=np.float64) -> Trajectory:
    """RK4 on dx/dt = v, dv/dt = F(x, v).

    ``dtype=np.longdouble`` runs the same scheme in extended precision, which
    is what it takes to see the O(dt^4) truncation drift once it falls below
    double-precision round-off.
    """
    check_velocity(spec, s0.v)
    n = _n_steps(dt, t_end)

    def rhs(x, v):
        return v, force(spec, x, v)

    ys, rejected = rk4(rhs, (s0.x, s0.v), dt, n, accept=lambda x, v: check_velocity(spec, v), dtype=dtype)
    t = dtype(dt) * np.arange(len(ys), dtype=dtype)
    exit_time = None if rejected is None else float(t[-1])
    return Trajectory(t=t, x=ys[:, 0].copy(), v=ys[:, 1].copy(), dt=dt, method="newton-rk4", domain_exit=exit_time)


def integrate_hamilton(
    spec: SystemSpec, q0: PhasePoint, dt: float, t_end: float, mode: str = "exact", N: int = SERIES_N
) -> Trajectory:
    """RK4 on Hamilton's equations in (x, p).

    ``mode="exact"`` uses the numerically inverted Hamiltonian, ``"series"``
    the truncated series equations of motion (constant-force preset, x > 0,
    p > 0).  The companion velocity is always from the exact inversion.
    """
    n = _n_steps(dt, t_end)
    if mode == "exact":
        def rhs(x, p):
            return hamilton_rhs_exact(spec, x, p)
    elif mode == "series":
        def rhs(x, p):
            return hamilton_rhs_series(spec, x, p, N)
        rhs(q0.x, q0.p)
    else:
        raise ValueError(f"unknown mode {mode!r}; expected 'exact' or 'series'")

    ys, rejected = rk4(rhs, (q0.x, q0.p), dt, n)
    t = dt * np.arange(len(ys))
    x = ys[:, 0].copy()
    p = ys[:, 1].copy()
    v = np.atleast_1d(velocity_from_momentum(spec, x, p))
    exit_time = None if rejected is None else float(t[-1])
    tag = "hamilton-exact-rk4" if mode == "exact" else f"hamilton-series{N}-rk4"
    return Trajectory(t=t, x=x, v=v, dt=dt, method=tag, p=p, domain_exit=exit_time)


@dataclass(frozen=True)
class DriftReport:
    """Deviation of K from its initial value along a trajectory.

    ``rel_drift`` divides by ``scale``, the largest of |K0| and the sampled
    magnitudes of the two parts of K (velocity term and f2).  A run that
    starts from K0 = 0 is thus still measured against the energies that
    actually cancel.
    """

    K0: float
    max_abs_drift: float
    rel_drift: float
    scale: float

    def to_dict(self):
        return {"K0": self.K0, "max_abs_drift": self.max_abs_drift, "rel_drift": self.rel_drift, "scale": self.scale}


def drift_report(spec: SystemSpec, traj: Trajectory) -> DriftReport:
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    K = np.atleast_1d(constant_of_motion(spec, traj.x, traj.v))
    pot = np.atleast_1d(f2(spec, traj.x))
    kin = K - pot
    # difference in the trajectory's own precision before narrowing to float
    max_abs = float(np.max(np.abs(K - K[0])))
    K0 = float(K[0])
    scale = max(abs(K0), float(np.max(np.abs(kin))), float(np.max(np.abs(pot))), DRIFT_FLOOR)
    return DriftReport(K0=K0, max_abs_drift=max_abs, rel_drift=max_abs / scale, scale=scale)
