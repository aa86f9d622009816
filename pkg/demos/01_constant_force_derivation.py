"""
Variational fields for a particle under a constant force
=========================================================

A particle of unit mass pushed by a constant force lam, slowed by a
quadratic drag gamma v^2 and capped at speed 1/alpha.
"""

import math

import numpy as np

from invlag import derive, example_system, force

# c = sqrt(150) gives alpha2 = 3 / (2 c^2) = 0.01, so the speed cap is 10
spec = example_system(m=1.0, lam=1.0, gamma_const=0.1, c=math.sqrt(150.0))
print("alpha2 =", spec.alpha2, " speed cap =", 1 / spec.alpha)

# terminal speed where force and drag balance, well below the cap
print("F(x, sqrt(lam/gamma)) =", force(spec, 0.0, math.sqrt(10.0)))

# W, G, p, L, f2 and K on a small table
print(f"{'x':>5} {'v':>6} {'W':>10} {'G':>10} {'p':>10} {'L':>10} {'K':>10}")
for x in (0.0, 1.0, 2.0):
    for v in (0.0, 3.0, 8.0):
        d = derive(spec, x, v)
        print(f"{x:5.1f} {v:6.1f} {d.W:10.5f} {d.G:10.5f} {d.p:10.5f} {d.L:10.5f} {d.K:10.5f}")

# L is even in v, p is odd: the Lagrangian does not care about direction
v = np.linspace(-9, 9, 7)
print("L(v) - L(-v):", np.max(np.abs(derive(spec, 1.0, v).L - derive(spec, 1.0, -v).L)))
