"""Acceptance criteria 1 to 10.

Every test prints one ``criterion N: PASS|FAIL ...`` line (visible under
plain ``pytest``) and then asserts the stated tolerance.  Criterion 10 also
prints the series versus exact Hamiltonian table, which carries no pass/fail.
"""

import math

import numpy as np
import pytest

from invlag import (
    Polynomial,
    PhasePoint,
    State,
    SystemSpec,
    constant_of_motion,
    drift_report,
    hamilton_rhs_series,
    hamiltonian,
    harmonic_system,
    integrate_hamilton,
    integrate_newton,
    kernel_G,
    lagrangian,
    momentum,
    series_hamiltonian,
    series_velocity_power,
    velocity_from_momentum,
    weight,
)
from invlag.verify import check_constant_of_motion_pde, check_euler_lagrange, check_limits, check_pde_G, tensor_grid

M, LAM, GAM, A2 = 1.0, 1.0, 0.1, 0.01
PRESET = SystemSpec(M, A2, Polynomial((0.0, -LAM)), Polynomial((-GAM,)))
GENERIC = SystemSpec(1.3, 0.05, Polynomial((0.0, 0.2, 0.5)), Polynomial((0.1, -0.3)))
HARMONIC = harmonic_system()
SPECS = {"conservative": HARMONIC, "preset": PRESET, "quadratic-U/linear-gamma": GENERIC}


@pytest.fixture
def say(capsys):
    def emit(n, ok, text):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {text}")
    return emit


def grid21(spec):
    g = tensor_grid(spec, (0.0, 2.0), 21, None, 21)
    return g.X, g.V


@pytest.fixture(scope="module")
def preset_run():
    return integrate_newton(PRESET, State(0.0, 0.0), 1e-3, 10.0)


def test_c1_closed_form_golden(say):
    X, V = grid21(PRESET)
    a, k = math.sqrt(A2), LAM * A2 - GAM
    E = np.exp(-2 * X * k / M)
    G = M / (1 - A2 * V**2) ** 2 * E
    p = M / 2 * (V / (1 - A2 * V**2) + np.arctanh(a * V) / a) * E
    kin_L = M * V * np.arctanh(a * V) / (2 * a) * E
    kin_K = M * V**2 / (2 * (1 - A2 * V**2)) * E
    f = M * LAM / (2 * k) * (E - 1)
    L, K = kin_L - f, kin_K + f

    def rel(got, ref, scale):
        return float(np.max(np.abs(got - ref) / np.maximum(scale, 1e-300)))

    errs = {
        "W": rel(weight(PRESET, X), E, np.abs(E)),
        "G": rel(kernel_G(PRESET, X, V), G, np.abs(G)),
        "p": rel(momentum(PRESET, X, V), p, np.abs(p)),
        # L and K are sums of two terms; their scale is the term magnitudes
        "L": rel(lagrangian(PRESET, X, V), L, np.abs(kin_L) + np.abs(f)),
        "K": rel(constant_of_motion(PRESET, X, V), K, np.abs(kin_K) + np.abs(f)),
    }
    worst = max(errs.values())
    say(1, worst <= 1e-12, "closed forms W,G,p,L,K, 21x21 grid: " + ", ".join(f"{q}={e:.1e}" for q, e in errs.items()) + " (tol 1e-12)")
    assert worst <= 1e-12


def test_c2_kernel_pde(say):
    reports = {name: check_pde_G(spec, tol=1e-10) for name, spec in SPECS.items()}

    def G(x, v):
        W = np.exp(-2.0 / GENERIC.m * (GENERIC.Gamma(x) - GENERIC.alpha2 * GENERIC.U(x)))
        return GENERIC.m * W / (1.0 - GENERIC.alpha2 * v * v) ** 2 * (1.0 + 1e-3 * v * v)

    fault = check_pde_G(GENERIC, kernel=G, tol=1e-10)
    ok = all(r.passed for r in reports.values()) and not fault.passed
    text = ", ".join(f"{n}={r.max_rel:.1e}" for n, r in reports.items())
    say(2, ok, f"kernel PDE residual {text} (tol 1e-10); fault-injected kernel {fault.max_rel:.1e} rejected={not fault.passed}")
    assert ok


def test_c3_legendre_identity(say):
    worst = 0.0
    for spec in SPECS.values():
        X, V = grid21(spec)
        K, vp, L = constant_of_motion(spec, X, V), V * momentum(spec, X, V), lagrangian(spec, X, V)
        scale = np.maximum.reduce([np.abs(K), np.abs(vp), np.abs(L), np.full_like(K, 1e-30)])
        worst = max(worst, float(np.max(np.abs(K - (vp - L)) / scale)))
    say(3, worst <= 1e-12, f"K = v p - L over three specs: max rel {worst:.1e} (tol 1e-12)")
    assert worst <= 1e-12


def test_c4_constant_of_motion_pde(say):
    reports = {name: check_constant_of_motion_pde(spec, tol=1e-10) for name, spec in SPECS.items()}
    ok = all(r.passed for r in reports.values())
    say(4, ok, "constant-of-motion PDE " + ", ".join(f"{n}={r.max_rel:.1e}" for n, r in reports.items()) + " (tol 1e-10)")
    assert ok


def test_c5_conservation_along_flow(say, preset_run):
    d = drift_report(PRESET, preset_run)
    # Double precision round-off (about 1e-13 of |K|-sized terms) hides the
    # dt^4 truncation drift, so the scaling is measured in extended precision.
    drifts64 = [drift_report(PRESET, integrate_newton(PRESET, State(0.0, 0.0), dt, 10.0)).max_abs_drift
                for dt in (4e-3, 2e-3, 1e-3)]
    extended = np.finfo(np.longdouble).eps < 1e-18
    if extended:
        drifts = [drift_report(PRESET, integrate_newton(PRESET, State(0.0, 0.0), dt, 10.0, dtype=np.longdouble)).max_abs_drift
                  for dt in (4e-3, 2e-3, 1e-3)]
        ratios = [float(drifts[0] / drifts[1]), float(drifts[1] / drifts[2])]
        scaling_ok = all(12.0 <= r <= 20.0 for r in ratios)
    ok = preset_run.completed and d.rel_drift <= 1e-7 and (not extended or scaling_ok)
    msg = f"rel K-drift {d.rel_drift:.1e} (tol 1e-7, scale {d.scale:.1f}); float64 drifts " + \
        ", ".join(f"{x:.1e}" for x in drifts64)
    if extended:
        msg += f"; longdouble drifts {', '.join(f'{float(x):.2e}' for x in drifts)} ratios {ratios[0]:.2f}, {ratios[1]:.2f} (want 16, band 12..20)"
    say(5, ok, msg)
    assert preset_run.completed and d.rel_drift <= 1e-7
    if not extended:
        pytest.skip("no extended-precision long double on this platform; dt^4 scaling not measurable")
    assert scaling_ok


def test_c6_euler_lagrange(say, preset_run):
    r = check_euler_lagrange(PRESET, preset_run, tol=1e-6)
    say(6, r.passed, f"Euler-Lagrange residual along preset run: max rel {r.max_rel:.1e} (tol 1e-6)")
    assert r.passed


def test_c7_inversion_round_trip(say):
    worst_rt = worst_dh = 0.0
    for spec in SPECS.values():
        X, V = grid21(spec)
        P = momentum(spec, X, V)
        back = velocity_from_momentum(spec, X, P)
        worst_rt = max(worst_rt, float(np.max(np.abs(back - V) / np.maximum(np.abs(V), 1e-300))))
        h = 1e-5 * np.maximum(1.0, np.abs(P))
        dHdp = (hamiltonian(spec, X, P + h) - hamiltonian(spec, X, P - h)) / (2 * h)
        worst_dh = max(worst_dh, float(np.max(np.abs(dHdp - back) / np.maximum(np.abs(back), 1e-3))))
    ok = worst_rt <= 1e-11 and worst_dh <= 1e-6
    say(7, ok, f"v->p->v max rel {worst_rt:.1e} (tol 1e-11); dH/dp vs v max rel {worst_dh:.1e} (tol 1e-6)")
    assert ok


def test_c8_flow_equivalence(say):
    newton = integrate_newton(PRESET, State(0.0, 0.0), 1e-3, 5.0)
    ham = integrate_hamilton(PRESET, PhasePoint(0.0, 0.0), 1e-3, 5.0, mode="exact")
    dp = float(np.max(np.abs(momentum(PRESET, newton.x, newton.v) - ham.p)))
    dx = float(np.max(np.abs(newton.x - ham.x)))
    ok = newton.completed and ham.completed and max(dp, dx) <= 1e-7
    say(8, ok, f"Newton vs exact Hamilton over t_end=5: max|dx| {dx:.1e}, max|dp| {dp:.1e} (tol 1e-7)")
    assert ok


def test_c9_limits(say):
    r = check_limits(M, PRESET.U, Polynomial((-GAM,)), A2, tol=0.2, endpoint_tol=1e-15)
    spread = {q: f"{min(v):.2f}..{max(v):.2f}" for q, v in r.params["ratios"].items()}
    say(9, r.passed, f"error ratios per decade {spread} (want 10 +-20%); endpoint rel err {r.max_abs:.1e} (tol 1e-15)")
    assert r.passed
    assert {"L", "p", "K"} <= set(r.params["ratios"])


def termwise_xdot(m, lam, g, a2, x, p, N):
    """Series velocity written term by term from the closed form."""
    total = 0.0
    for n in range(N):
        base = (2 * n + 1) * p * math.exp(-2 * g * x / m) / (math.factorial(n + 1) * m) * (2 * lam * x / m) ** n
        total += (2 * lam * a2 * x / m) ** n / math.factorial(n) * base ** (1.0 / (2 * n + 1))
    return math.exp(-2 * lam * a2 * x / m) * total


def test_c10_series_construction(say):
    s0 = SystemSpec(M, 0.0, PRESET.U, PRESET.gamma)
    n0 = max(abs(series_velocity_power(s0, x, p, 0) - velocity_from_momentum(s0, x, p)) / abs(velocity_from_momentum(s0, x, p))
             for x in (0.25, 1.0, 2.0) for p in (0.1, 0.5, 2.0))

    table = []
    worst_fd = worst_eq = 0.0
    for a2 in (1e-4, 1e-3, 1e-2):
        s = SystemSpec(M, a2, PRESET.U, PRESET.gamma)
        Hs, trunc = series_hamiltonian(s, 1.0, 0.5, full_output=True)
        He = float(hamiltonian(s, 1.0, 0.5))
        table.append((a2, Hs, He, Hs - He, trunc.N))
        for x, p in ((0.5, 0.3), (1.0, 0.5), (1.8, 1.2)):
            xd, _ = hamilton_rhs_series(s, x, p)
            h = 1e-5 * max(1.0, p)
            fd = (series_hamiltonian(s, x, p + h) - series_hamiltonian(s, x, p - h)) / (2 * h)
            worst_fd = max(worst_fd, abs(xd - fd) / abs(fd))
            worst_eq = max(worst_eq, abs(xd - termwise_xdot(M, LAM, GAM, a2, x, p, 16)) / abs(xd))

    ok = n0 <= 1e-12 and worst_fd <= 1e-6
    say(10, ok, f"n=0 power vs exact inversion at alpha2=0: {n0:.1e} (tol 1e-12); "
                f"series xdot vs numeric dH/dp: {worst_fd:.1e} (tol 1e-6); vs term-by-term velocity sum: {worst_eq:.1e}")
    lines = ["  series vs exact Hamiltonian at (x, p) = (1, 0.5), reported only",
                  f"  {'alpha2':>8} {'H_series':>22} {'H_exact':>22} {'series - exact':>15} {'terms':>5}"]
    lines += [f"  {a:8.0e} {hs:22.15e} {he:22.15e} {d:15.3e} {n:5d}" for a, hs, he, d, n in table]
    say(10, ok, "report table\n" + "\n".join(lines))
    assert n0 <= 1e-12
    assert worst_fd <= 1e-6
