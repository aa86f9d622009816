"""
Residual checks and a planted fault
====================================

Each check returns a report with the worst absolute and relative residual.
A kernel with a small planted error is caught by the transport PDE.
"""

import numpy as np

from invlag import Polynomial, State, SystemSpec, integrate_newton
from invlag.verify import check_constant_of_motion_pde, check_euler_lagrange, check_limits, check_pde_G

spec = SystemSpec(m=1.3, alpha2=0.05, U=Polynomial((0.0, 0.2, 0.5)), gamma=Polynomial((0.1, -0.3)))

for rep in (check_pde_G(spec), check_constant_of_motion_pde(spec),
            check_euler_lagrange(spec, integrate_newton(spec, State(0.5, 0.2), 1e-3, 5.0))):
    print(f"{rep.name:24s} max_rel = {rep.max_rel:.2e}  pass = {rep.passed}")


# a custom kernel is differentiated by complex step, so keep it complex-safe
def planted(x, v):
    W = np.exp(-2.0 / spec.m * (spec.Gamma(x) - spec.alpha2 * spec.U(x)))
    return spec.m * W / (1.0 - spec.alpha2 * v * v) ** 2 * (1.0 + 1e-3 * v * v)


bad = check_pde_G(spec, kernel=planted)
print(f"{'planted fault':24s} max_rel = {bad.max_rel:.2e}  pass = {bad.passed}")

# shrinking gamma and alpha2 by 10 shrinks every error by 10
lim = check_limits(spec.m, spec.U, spec.gamma, spec.alpha2)
for q, r in lim.params["ratios"].items():
    print(q, " ".join(f"{x:.3f}" for x in r))
print("limits pass =", lim.passed)
