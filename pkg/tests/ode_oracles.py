"""Independent numerical oracles for the closed-form geometry.

The geodesic and parallel-transport equations of the embedded sphere and
hyperboloid are integrated with classical RK4 in ambient coordinates.  The
integrators know nothing about the closed forms they are used to check:
they only use each surface's second-fundamental-form relation

    sphere:       x'' = -(<x', x'> / R^2) x,      w' = -(<x', w> / R^2) x
    hyperboloid:  x'' = kappa * <x', x'>_L x,     w' = kappa * <x', w>_L x

with the flat case a straight line.  All functions are vectorized over a
batch of initial conditions (rows).
"""

import numpy as np

from geodescent.geometry import Hyperboloid, Sphere


def _acc(manifold, x, u):
    if isinstance(manifold, Sphere):
        return -(np.sum(u * u, axis=1, keepdims=True) / manifold.radius**2) * x
    if isinstance(manifold, Hyperboloid):
        lam = -u[:, :1] * u[:, :1] + np.sum(u[:, 1:] * u[:, 1:], axis=1, keepdims=True)
        return manifold.kappa * lam * x
    return np.zeros_like(x)


def _transport_rhs(manifold, x, u, w):
    if isinstance(manifold, Sphere):
        return -(np.sum(u * w, axis=1, keepdims=True) / manifold.radius**2) * x
    if isinstance(manifold, Hyperboloid):
        lam = -u[:, :1] * w[:, :1] + np.sum(u[:, 1:] * w[:, 1:], axis=1, keepdims=True)
        return manifold.kappa * lam * x
    return np.zeros_like(x)


def integrate_geodesic(manifold, x0, v0, n_steps=400):
    """Endpoint of the geodesic with initial position x0 and velocity v0
    (batched rows), integrated over unit time."""
    x = np.array(x0, dtype=float)
    u = np.array(v0, dtype=float)
    h = 1.0 / n_steps
    for _ in range(n_steps):
        k1x, k1u = u, _acc(manifold, x, u)
        k2x, k2u = u + 0.5 * h * k1u, _acc(manifold, x + 0.5 * h * k1x, u + 0.5 * h * k1u)
        k3x, k3u = u + 0.5 * h * k2u, _acc(manifold, x + 0.5 * h * k2x, u + 0.5 * h * k2u)
        k4x, k4u = u + h * k3u, _acc(manifold, x + h * k3x, u + h * k3u)
        x = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        u = u + (h / 6.0) * (k1u + 2 * k2u + 2 * k3u + k4u)
    return x


def integrate_transport(manifold, x0, v0, w0, n_steps=400):
    """Parallel transport of w0 along the geodesic (x0, v0), jointly
    integrating the geodesic so the oracle never calls exp."""
    x = np.array(x0, dtype=float)
    u = np.array(v0, dtype=float)
    w = np.array(w0, dtype=float)
    h = 1.0 / n_steps

    def rhs(x, u, w):
        return u, _acc(manifold, x, u), _transport_rhs(manifold, x, u, w)

    for _ in range(n_steps):
        k1 = rhs(x, u, w)
        k2 = rhs(x + 0.5 * h * k1[0], u + 0.5 * h * k1[1], w + 0.5 * h * k1[2])
        k3 = rhs(x + 0.5 * h * k2[0], u + 0.5 * h * k2[1], w + 0.5 * h * k2[2])
        k4 = rhs(x + h * k3[0], u + h * k3[1], w + h * k3[2])
        x = x + (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        u = u + (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        w = w + (h / 6.0) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    return x, w


__all__ = ["integrate_geodesic", "integrate_transport"]
