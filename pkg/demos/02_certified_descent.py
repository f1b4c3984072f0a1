#!/usr/bin/env python3
"""Three descent methods, each carrying a per-iteration decrease certificate
(p, c, direction): every step must lose at least c * ||grad f||^(p/(p-1)).
The certificate is re-checked on the recorded trace, independently of the
steps that produced it.

Run:  python demos/02_certified_descent.py
"""
import numpy as np

from geodescent.descent import (
    CubicNewton,
    DescentCertificate,
    GradientDescent,
    ProximalPoint,
    certify,
    default_tolerance,
    run_descent,
)
from geodescent.geometry import DomainSpec, Hyperboloid
from geodescent.objectives import SquaredDistance, estimate_hessian_lipschitz

rng = np.random.default_rng(1)

H = Hyperboloid(2, 1.0)
o = H.origin()
target = H.exp(o, H.tangent(o, [0.0, 0.8, 0.0]))
obj = SquaredDistance(H, target, domain=DomainSpec(o, 2.0))
obj.with_rho(estimate_hessian_lipschitz(obj, rng))
L, rho = obj.metadata.L, obj.metadata.rho
print(f"objective: half the squared distance to a point on H^2")
print(f"declared constants: L = {L:.4f} (curvature comparison), rho_hat = {rho:.4f}")

x0 = H.exp(o, H.tangent(o, [0.0, 0.3, 1.2]))
f0 = obj.value(x0)
tol = default_tolerance(f0)
print(f"start: f(x0) = {f0:.6f}, slack tolerance {tol:.1e}")
print()

algorithms = [
    ("gradient descent  ", GradientDescent(1.0 / L)),
    ("proximal point    ", ProximalPoint(1.0)),
    ("cubic Newton      ", CubicNewton()),
]
print(f"{'algorithm':<20} {'p':>3} {'c':>10} {'dir':>9} | {'f after 30 steps':>17} {'worst slack':>12} verdict")
for name, alg in algorithms:
    cert = alg.certificate(obj)
    trace = run_descent(alg, obj, x0, 30)
    ok, worst = certify(trace, cert, tol)
    print(f"{name:<20} {cert.p:>3.0f} {cert.c:>10.5f} {cert.direction:>9} |"
          f" {trace.values[-1]:>17.3e} {worst:>12.3e} {'certified' if ok else 'VIOLATED'}")

print()
print("a deliberately inflated constant fails, as it should:")
alg = GradientDescent(1.0 / L)
cert = alg.certificate(obj)
bad = DescentCertificate(cert.p, 4.0 * cert.c, cert.direction)
trace = run_descent(alg, obj, x0, 30)
ok, worst = certify(trace, bad, tol)
print(f"claimed c = {bad.c:.5f} (4x the certified value): "
      f"{'certified' if ok else f'violated by {worst:.3e}'}")
