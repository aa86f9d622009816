import json
import math

import numpy as np
import pytest

from invlag import (
    Polynomial,
    State,
    SystemSpec,
    example_system,
    harmonic_system,
    integrate_newton,
)
from invlag import variational as var
from invlag.verify import (
    ResidualReport,
    check_constant_of_motion_pde,
    check_euler_lagrange,
    check_limits,
    check_pde_G,
    tensor_grid,
)

PRESET = example_system(1.0, 1.0, 0.1, math.sqrt(150.0))
GENERIC = SystemSpec(1.3, 0.05, Polynomial((0.0, 0.2, 0.5)), Polynomial((0.1, -0.3)))
HARMONIC = harmonic_system()
SPECS = [HARMONIC, PRESET, GENERIC]


def complex_kernel(spec):
    """The kernel rebuilt from elementary complex-safe operations."""
    def G(x, v):
        W = np.exp(-2.0 / spec.m * (spec.Gamma(x) - spec.alpha2 * spec.U(x)))
        return spec.m * W / (1.0 - spec.alpha2 * v * v) ** 2
    return G


def complex_constant(spec, sign=1.0):
    """K for the preset with f2 in closed form; ``sign`` flips the f2 term."""
    lam, g = spec.constant_force()
    a = 2.0 / spec.m * (lam * spec.alpha2 - g)

    def K(x, v):
        W = np.exp(-a * x)
        f2 = -lam * np.expm1(-a * x) / -a
        return spec.m * v * v / (2.0 * (1.0 - spec.alpha2 * v * v)) * W + sign * f2
    return K


def test_grid_defaults():
    g = tensor_grid(PRESET)
    assert g.X.shape == (21, 21)
    assert np.max(np.abs(g.V)) == pytest.approx(0.9 / PRESET.alpha)
    assert g.descriptor["nx"] == 21
    assert np.max(tensor_grid(HARMONIC).V) == 1.0


@pytest.mark.parametrize("spec", SPECS)
def test_kernel_pde_passes(spec):
    r = check_pde_G(spec)
    assert r.passed and r.max_rel <= 1e-10
    assert r.name == "pde_G"


@pytest.mark.parametrize("spec", [PRESET, GENERIC])
def test_kernel_pde_complex_step_path_agrees(spec):
    r = check_pde_G(spec, kernel=complex_kernel(spec))
    assert r.passed and r.max_rel <= 1e-10
    assert r.params["custom_kernel"] is True


@pytest.mark.parametrize("spec", [PRESET, GENERIC])
def test_fault_injected_kernel_fails(spec):
    G = complex_kernel(spec)
    bad = lambda x, v: G(x, v) * (1.0 + 1e-3 * v * v)
    r = check_pde_G(spec, kernel=bad)
    assert not r.passed
    assert r.max_rel > 1e-6


@pytest.mark.parametrize("spec", SPECS)
def test_constant_of_motion_pde_passes(spec):
    r = check_constant_of_motion_pde(spec)
    assert r.passed and r.max_rel <= 1e-10


def test_constant_of_motion_fault_injection():
    good = check_constant_of_motion_pde(PRESET, constant=complex_constant(PRESET))
    assert good.passed
    bad = check_constant_of_motion_pde(PRESET, constant=complex_constant(PRESET, sign=-1.0))
    assert not bad.passed


def test_custom_constant_matches_package():
    K = complex_constant(PRESET)
    g = tensor_grid(PRESET, nx=5, nv=5)
    np.testing.assert_allclose(K(g.X, g.V), var.constant_of_motion(PRESET, g.X, g.V), rtol=1e-13, atol=1e-14)


@pytest.mark.parametrize("spec,s0", [(PRESET, State(0.0, 0.0)), (GENERIC, State(0.5, 0.2)), (HARMONIC, State(1.0, 0.0))])
def test_euler_lagrange(spec, s0):
    traj = integrate_newton(spec, s0, 1e-3, 2.0)
    r = check_euler_lagrange(spec, traj)
    assert r.passed and r.max_rel <= 1e-6
    assert r.params["samples"] == len(traj)


def test_euler_lagrange_detects_wrong_dynamics():
    # integrate a different force law and check it against the preset
    other = SystemSpec(1.0, 0.01, Polynomial((0.0, -1.0)), Polynomial((-0.3,)))
    traj = integrate_newton(other, State(0.0, 0.0), 1e-3, 2.0)
    assert not check_euler_lagrange(PRESET, traj).passed


def test_euler_lagrange_needs_samples():
    traj = integrate_newton(PRESET, State(0.0, 0.0), 0.1, 0.3)
    with pytest.raises(ValueError):
        check_euler_lagrange(PRESET, traj)


class TestLimits:
    def test_preset_family(self):
        r = check_limits(1.0, Polynomial((0.0, -1.0)))
        assert r.passed
        assert r.max_abs <= 1e-15
        for q in ("L", "p", "K"):
            assert all(8.0 <= x <= 12.0 for x in r.params["ratios"][q])

    def test_generic_family(self):
        r = check_limits(1.3, Polynomial((0.0, 0.2, 0.5)), Polynomial((0.1, -0.3)), 0.05)
        assert r.passed

    def test_wrong_slope_fails(self):
        # skipping every other decade makes first-order ratios 100, not 10
        r = check_limits(1.0, Polynomial((0.0, -1.0)), ks=[2, 4, 6])
        assert not r.passed


def test_report_serialization_is_deterministic():
    a = check_pde_G(GENERIC).to_json(sort_keys=True)
    b = check_pde_G(GENERIC).to_json(sort_keys=True)
    assert a == b
    d = json.loads(a)
    assert set(d) == {"name", "params", "max_abs", "max_rel", "tol", "pass"}
    assert d["params"]["m"] == 1.3
    assert d["params"]["grid"]["nv"] == 21


def test_report_is_frozen():
    r = ResidualReport("x", {}, 0.0, 0.0, 1.0, True)
    with pytest.raises(Exception):
        r.passed = False
