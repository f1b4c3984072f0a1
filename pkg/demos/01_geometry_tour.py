#!/usr/bin/env python3
"""Tour of the closed-form geometry: exponential/logarithmic maps, parallel
transport and geodesic distances on flat, spherical and hyperbolic space.

Run:  python demos/01_geometry_tour.py
"""
import numpy as np

from geodescent.geometry import Euclidean, Hyperboloid, Sphere

rng = np.random.default_rng(0)

print("=" * 70)
print("Flat space: exp and log are vector addition and subtraction")
print("=" * 70)
E = Euclidean(2)
x = E.point([1.0, 2.0])
v = E.tangent(x, [0.5, -1.0])
y = E.exp(x, v)
print(f"exp((1,2), (0.5,-1))   = {y.coords}")
print(f"log back               = {E.log(x, y).coords}")

print()
print("=" * 70)
print("Sphere: a quarter great circle from the north pole")
print("=" * 70)
S = Sphere(2, 1.0)
pole = S.point([0.0, 0.0, 1.0])
v = S.tangent(pole, [np.pi / 2, 0.0, 0.0])
eq = S.exp(pole, v)
print(f"exp(pole, (pi/2,0,0))  = {eq.coords}   (lands on the equator)")
print(f"distance(pole, there)  = {S.distance(pole, eq):.6f} = pi/2")
w = S.tangent(pole, [0.0, 1.0, 0.0])
print(f"transport of the vector orthogonal to the arc: {S.transport(pole, eq, w).coords}")

print()
print("=" * 70)
print("Hyperboloid: negative curvature spreads geodesics apart")
print("=" * 70)
H = Hyperboloid(2, 1.0)
o = H.origin()
a = H.exp(o, H.tangent(o, [0.0, 1.0, 0.0]))
b = H.exp(o, H.tangent(o, [0.0, 0.0, 1.0]))
print(f"two unit geodesics leave the origin at a right angle")
print(f"  endpoint distance in the tangent space: {H.projected_distance(o, a, b):.6f} (= sqrt(2))")
print(f"  true geodesic distance between them:    {H.distance(a, b):.6f} (> sqrt(2))")
print("the tangent-space picture underestimates distances: that gap is the")
print("distortion the accelerated schedule has to pay for.")

print()
print("=" * 70)
print("Round trips and isometry on random inputs")
print("=" * 70)
for m in (E, S, H):
    worst_rt, worst_iso = 0.0, 0.0
    for _ in range(200):
        x = m.random_point(rng, 0.5)
        v = m.random_tangent(rng, x, 0.5)
        y = m.exp(x, v)
        back = m.log(x, y)
        worst_rt = max(worst_rt, float(np.linalg.norm(back.coords - v.coords)))
        w = m.random_tangent(rng, x, 1.0)
        worst_iso = max(worst_iso, abs(m.norm(y, m.transport(x, y, w)) - m.norm(x, w)))
    print(f"{m.key:<28} exp/log roundtrip {worst_rt:.2e}   transport isometry {worst_iso:.2e}")
