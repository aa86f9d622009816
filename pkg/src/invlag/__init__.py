"""Lagrangians, constants of motion and Hamiltonians for the one-dimensional
drag family m dv/dt = (-U'(x) + gamma(x) v^2)(1 - alpha^2 v^2)."""

from .errors import (
    ConfigError,
    DomainError,
    InversionError,
    QuadratureError,
    UnsupportedSystemError,
    WeightOverflowError,
)
from .model import (
    PhasePoint,
    Polynomial,
    State,
    SystemSpec,
    example_system,
    force,
    harmonic_system,
    relativistic_alpha2,
)
from .variational import (
    DerivedFields,
    constant_of_motion,
    derive,
    f2,
    kernel_G,
    lagrangian,
    lagrangian_from_kernel,
    momentum,
    weight,
)
from .inversion import (
    SeriesTruncation,
    hamilton_rhs_exact,
    hamilton_rhs_series,
    hamiltonian,
    series_hamiltonian,
    series_velocity_power,
    velocity_from_momentum,
)
from .dynamics import DriftReport, Trajectory, drift_report, integrate_hamilton, integrate_newton
from .verify import (
    ResidualReport,
    check_constant_of_motion_pde,
    check_euler_lagrange,
    check_limits,
    check_pde_G,
    tensor_grid,
)

__version__ = "0.1.0"
