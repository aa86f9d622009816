"""
Two Hamiltonians for the constant-force system
===============================================

The exact Hamiltonian inverts p(x, v) numerically.  The series Hamiltonian
matches powers of v term by term, which is only an approximation of that
inversion; this script measures how far apart they are.
"""

from invlag import PhasePoint, Polynomial, SystemSpec, hamiltonian, integrate_hamilton, series_hamiltonian

U, gamma = Polynomial((0.0, -1.0)), Polynomial((-0.1,))

print(f"{'alpha2':>8} {'H_series':>12} {'H_exact':>12} {'difference':>12} {'terms':>6}")
for a2 in (0.0, 1e-4, 1e-3, 1e-2):
    spec = SystemSpec(1.0, a2, U, gamma)
    Hs, trunc = series_hamiltonian(spec, 1.0, 0.5, full_output=True)
    He = float(hamiltonian(spec, 1.0, 0.5))
    print(f"{a2:8.0e} {Hs:12.8f} {He:12.8f} {Hs - He:12.3e} {trunc.N:6d}")

# the gap grows roughly linearly in alpha2 and vanishes at alpha2 = 0

# the two flows started from the same (x, p)
spec = SystemSpec(1.0, 1e-3, U, gamma)
exact = integrate_hamilton(spec, PhasePoint(1.0, 0.5), 1e-2, 2.0, mode="exact")
series = integrate_hamilton(spec, PhasePoint(1.0, 0.5), 1e-2, 2.0, mode="series")
for i in range(0, len(exact), 50):
    print(f"t = {exact.t[i]:4.1f}  p_exact = {exact.p[i]:.8f}  p_series = {series.p[i]:.8f}"
          f"  rel gap = {abs(series.p[i] - exact.p[i]) / exact.p[i]:.1e}")

# outside x > 0, p > 0 the series has no meaning and is refused
try:
    series_hamiltonian(spec, -1.0, 0.5)
except ValueError as exc:
    print("refused:", exc)
