#!/usr/bin/env python3
"""Accelerated scheme on a strongly g-convex problem: the contraction factor
xi_k couples to the metric distortion through a one-dimensional recurrence.

With no distortion (delta = 1) the recurrence's fixed point is sqrt(2*mu*c),
the fully accelerated rate; as delta grows it degrades toward 2*mu*c, the
unaccelerated rate.  On a real hyperbolic run the iterates contract, the
distortion dies out and xi hugs sqrt(2*mu*c): the run certifies

    f(y_k) - f*  <=  prod_{j<=k} (1 - xi_j) * E_0

at every iteration, and the distance diagnostics track their product-rate
envelopes.

Run:  python demos/05_accelerated_strongly_convex.py
"""
import math

import numpy as np

from geodescent import acceleration as acc
from geodescent.geometry import DomainSpec, Hyperboloid
from geodescent.objectives import SquaredDistance

# -- the xi recurrence in isolation -------------------------------------------
mu, c = 1.0, 0.08
a = 2.0 * mu * c
print(f"xi recurrence with mu = {mu}, c = {c}:  2*mu*c = {a}, sqrt = {math.sqrt(a):.4f}")
print(f"{'delta':>8} {'xi after 50 steps from xi0 = 2*mu*c + 1e-3':>45}")
for delta in (1.0, 1.5, 3.0, 100.0):
    xi = a + 1e-3
    for _ in range(50):
        xi = acc.xi_solve(xi, delta, mu, c)
    print(f"{delta:>8.1f} {xi:>20.6f}")

# -- a full run on H^2 ---------------------------------------------------------
H = Hyperboloid(2, 1.0)
o = H.origin()
target = H.exp(o, H.tangent(o, [0.0, 0.8, 0.0]))
obj = SquaredDistance(H, target, domain=DomainSpec(o, 2.0))
L = obj.metadata.L
c = 0.005
eta = (1.0 - math.sqrt(1.0 - 2.0 * L * c)) / L  # small step so c < 1/(6L)
oracle = acc.gradient_oracle(obj, eta)
a = 2.0 * obj.metadata.mu * oracle.c
x0 = H.exp(o, H.tangent(o, [0.0, -0.5, 0.7]))
run = acc.run_accelerated(obj, x0, 200, acc.STRONGLY, oracle)

gaps = np.array(run.trace.values)
xi = np.array(run.xi_seq)
prod = np.cumprod(1.0 - xi[1:])
print()
print(f"squared distance on H^2: c = {oracle.c:.4f}, xi target sqrt(2*mu*c) = {math.sqrt(a):.4f}")
print(f"{'k':>5} {'gap':>12} {'product envelope':>17} {'xi_k':>9} {'delta_k':>10}")
for k in (1, 5, 20, 60, 120, 200):
    print(f"{k:>5} {gaps[k]:>12.3e} {prod[k-1] * run.E0:>17.3e} {xi[k]:>9.5f}"
          f" {run.deltas[k-1]:>10.6f}")

first, slope = acc.xi_convergence_report(run.xi_seq[1:], obj.metadata.mu, oracle.c, 1e-6)
print(f"after the early distortion dip, xi re-enters the 1e-6 band of its limit"
      f" at k = {first + 1}; log-deviation slope {slope:.3f}")

rep = acc.shrink_diagnostics(run)
print()
print("distance diagnostics against the product-rate envelope")
print(f"{'k':>5} {'d(y_k,x*)':>12} {'envelope':>12} {'d(x_k,z_k)':>12} {'ratio':>8}")
for k in (1, 20, 60, 120, 200):
    print(f"{k:>5} {rep.d_y_star[k]:>12.3e} {rep.envelope_y[k]:>12.3e}"
          f" {rep.d_xz[k]:>12.3e} {rep.ratio[k]:>8.4f}")
print(f"fitted trend of the ratio over k: {rep.ratio_slope():+.5f} (no growth)")
