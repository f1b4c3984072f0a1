"""Shared sampling utilities and the benchmark objective set used across the
test modules."""

import numpy as np

from geodescent.geometry import DomainSpec, Euclidean, Hyperboloid, Sphere, TangentVector
from geodescent.objectives import FrechetMean, Quadratic, SphereRayleigh, SquaredDistance


def unit_tangent(m, rng, x):
    v = m.random_tangent(rng, x, 1.0)
    n = m.norm(x, v)
    if n < 1e-12:
        return m.orthonormal_basis(x)[0]
    return TangentVector(x, m._project_tangent(x.coords, v.coords / n))


def point_at(m, rng, center, dist):
    u = unit_tangent(m, rng, center)
    return m.exp(center, TangentVector(center, dist * u.coords))


def tangent_of_norm(m, rng, x, norm):
    u = unit_tangent(m, rng, x)
    return TangentVector(x, norm * u.coords)


def make_quadratic(scales=None):
    return Quadratic([0.7, -0.3], scales=scales)


def make_sqdist_h2(seed=3, target_distance=0.8, domain_radius=2.0):
    H = Hyperboloid(2, 1.0)
    rng = np.random.default_rng(seed)
    target = point_at(H, rng, H.origin(), target_distance)
    return SquaredDistance(H, target, domain=DomainSpec(H.origin(), domain_radius))


def make_frechet_h2(seed=7, num=5, spread=0.7, domain_radius=2.0, solve_reference=True):
    H = Hyperboloid(2, 1.0)
    rng = np.random.default_rng(seed)
    o = H.origin()
    pts = [H.exp(o, H.random_tangent(rng, o, spread)) for _ in range(num)]
    return FrechetMean(H, pts, domain=DomainSpec(o, domain_radius),
                       solve_reference=solve_reference)


def make_frechet_sphere(seed=11, num=4, spread=0.25, domain_radius=0.5):
    S = Sphere(2, 1.0)
    rng = np.random.default_rng(seed)
    o = S.origin()
    pts = [S.exp(o, S.random_tangent(rng, o, spread)) for _ in range(num)]
    return FrechetMean(S, pts, domain=DomainSpec(o, domain_radius))


def make_rayleigh(diag=(2.0, 1.0, 0.5)):
    return SphereRayleigh(Sphere(2, 1.0), np.diag(diag))


def euclidean2():
    return Euclidean(2)
