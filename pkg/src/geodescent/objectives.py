"""Benchmark objectives with exact gradients, Hessians and declared
regularity constants.

Each objective carries an analysis domain (a geodesic ball) on which its
declared constants are valid, and, where available, its exact minimizer.
Evaluation itself only fails where the function is mathematically undefined
(e.g. antipodal sample points on the sphere); leaving the analysis ball is
monitored by the drivers, not punished here.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from geodescent.geometry import (
    DomainSpec,
    Euclidean,
    Hyperboloid,
    Manifold,
    ManifoldPoint,
    Sphere,
    TangentVector,
)

__all__ = [
    "ObjectiveMetadata",
    "KnownSolution",
    "Objective",
    "Quadratic",
    "SquaredDistance",
    "FrechetMean",
    "SphereRayleigh",
    "grad_check",
    "estimate_hessian_lipschitz",
    "reference_minimize",
]

NONCONVEX = "nonconvex"
G_CONVEX = "g_convex"
STRONGLY_G_CONVEX = "strongly_g_convex"


@dataclass(frozen=True)
class ObjectiveMetadata:
    """Declared regularity constants, valid on the objective's domain."""

    convexity_class: str
    L: float | None = None
    mu: float | None = None
    rho: float | None = None
    grad_dom: tuple[float, float] | None = None  # (tau, p)
    L_ball_radius: float | None = None  # radius the comparison bound used

    def __post_init__(self):
        if self.convexity_class not in (NONCONVEX, G_CONVEX, STRONGLY_G_CONVEX):
            raise ValueError(f"unknown convexity class {self.convexity_class!r}")
        if self.convexity_class == STRONGLY_G_CONVEX and not (self.mu and self.mu > 0):
            raise ValueError("strongly g-convex objectives must declare mu > 0")


@dataclass(frozen=True)
class KnownSolution:
    x_star: ManifoldPoint
    f_star: float


class Objective:
    """Value / gradient / Hessian interface over one manifold."""

    manifold: Manifold
    domain: DomainSpec
    metadata: ObjectiveMetadata
    name: str = "objective"

    def value(self, x: ManifoldPoint) -> float:
        raise NotImplementedError

    def gradient(self, x: ManifoldPoint) -> TangentVector:
        raise NotImplementedError

    def hessian_matrix(self, x: ManifoldPoint) -> np.ndarray:
        """Hessian in ``orthonormal_basis(x)`` coordinates (symmetric)."""
        raise NotImplementedError

    @property
    def known_solution(self) -> KnownSolution | None:
        return getattr(self, "_known_solution", None)

    def _set_solution(self, x_star: ManifoldPoint, f_star: float | None = None, tol: float = 1e-10):
        gn = self.manifold.norm(x_star, self.gradient(x_star))
        if gn >= tol:
            raise ValueError(f"claimed minimizer has gradient norm {gn:.3e} >= {tol:g}")
        if f_star is None:
            f_star = self.value(x_star)
        self._known_solution = KnownSolution(x_star, float(f_star))

    def with_rho(self, rho: float) -> "Objective":
        """Same objective with a declared Hessian-Lipschitz constant."""
        self.metadata = replace(self.metadata, rho=float(rho))
        return self

    def __repr__(self):
        return f"{self.name}[{self.manifold.key}]"


def _comparison_upper(manifold: Manifold, d: float) -> float:
    """Largest Hessian eigenvalue of 0.5*d(., y)^2 at distance d from y."""
    if isinstance(manifold, Hyperboloid):
        t = np.sqrt(manifold.kappa) * d
        return 1.0 if t < 1e-12 else float(t / np.tanh(t))
    return 1.0  # Euclidean and sphere: transverse eigenvalue <= 1


def _comparison_lower(manifold: Manifold, d: float) -> float:
    """Smallest Hessian eigenvalue of 0.5*d(., y)^2 at distance d from y."""
    if isinstance(manifold, Sphere):
        t = d / manifold.radius
        return 1.0 if t < 1e-12 else float(t / np.tan(t)) if t < np.pi / 2 else 0.0
    return 1.0  # Euclidean and hyperboloid: radial eigenvalue is 1


def _dist_sq_hessian(manifold: Manifold, x: ManifoldPoint, target: ManifoldPoint,
                     basis: list[TangentVector]) -> np.ndarray:
    """Hessian matrix of 0.5*d(., target)^2 in the supplied basis.

    Eigenvalue 1 along the geodesic to the target, and the curvature
    comparison value on the orthogonal complement.
    """
    n = len(basis)
    d = manifold.distance(x, target)
    if d < 1e-14:
        return np.eye(n)
    if isinstance(manifold, Hyperboloid):
        t = np.sqrt(manifold.kappa) * d
        trans = t / np.tanh(t)
    elif isinstance(manifold, Sphere):
        t = d / manifold.radius
        trans = t / np.tan(t)
    else:
        trans = 1.0
    lg = manifold.log(x, target)
    u = np.array([manifold.inner(x, lg, b) for b in basis]) / d
    return trans * np.eye(n) + (1.0 - trans) * np.outer(u, u)


class Quadratic(Objective):
    """0.5 * sum_i scales_i * (x_i - b_i)^2 on Euclidean space.

    The isotropic default has L = mu = 1; anisotropic scales give the
    conditioning needed to observe sublinear accelerated rates.
    """

    name = "quadratic"

    def __init__(self, b, scales=None, domain_radius: float = 10.0):
        b = np.asarray(b, dtype=float)
        self.manifold = Euclidean(b.size)
        self.b = b
        self.scales = np.ones(b.size) if scales is None else np.asarray(scales, dtype=float)
        if np.any(self.scales <= 0):
            raise ValueError("quadratic scales must be positive")
        L = float(self.scales.max())
        mu = float(self.scales.min())
        self.metadata = ObjectiveMetadata(
            STRONGLY_G_CONVEX, L=L, mu=mu, rho=0.0, grad_dom=(1.0 / (2.0 * mu), 2.0)
        )
        self.domain = DomainSpec(self.manifold.point(b), domain_radius)
        self._set_solution(self.manifold.point(b), 0.0)

    def value(self, x):
        d = x.coords - self.b
        return 0.5 * float(np.dot(self.scales * d, d))

    def gradient(self, x):
        return TangentVector(x, self.scales * (x.coords - self.b))

    def hessian_matrix(self, x):
        return np.diag(self.scales)


class SquaredDistance(Objective):
    """0.5 * d(x, target)^2.

    On Hadamard manifolds this is 1-strongly g-convex with gradient
    -log(x, target); the Lipschitz constant comes from the curvature
    comparison bound on the analysis ball.
    """

    name = "squared_distance"

    def __init__(self, manifold: Manifold, target: ManifoldPoint, domain: DomainSpec | None = None,
                 domain_radius: float = 2.0):
        manifold._own(target)
        self.manifold = manifold
        self.target = target
        self.domain = domain if domain is not None else DomainSpec(target, domain_radius)
        d_max = self.domain.radius + manifold.distance(self.domain.center, target)
        L = _comparison_upper(manifold, d_max)
        mu = _comparison_lower(manifold, d_max)
        cls = STRONGLY_G_CONVEX if mu > 0 else G_CONVEX
        gd = (1.0 / (2.0 * mu), 2.0) if mu > 0 else None
        self.metadata = ObjectiveMetadata(cls, L=L, mu=mu if mu > 0 else None,
                                          grad_dom=gd, L_ball_radius=d_max)
        self._set_solution(target, 0.0)

    def value(self, x):
        return 0.5 * self.manifold.distance(x, self.target) ** 2

    def gradient(self, x):
        lg = self.manifold.log(x, self.target)
        return TangentVector(x, -lg.coords)

    def hessian_matrix(self, x):
        basis = self.manifold.orthonormal_basis(x)
        return _dist_sq_hessian(self.manifold, x, self.target, basis)


class FrechetMean(Objective):
    """(1/2N) * sum_i d(x, y_i)^2 over fixed sample points."""

    name = "frechet_mean"

    def __init__(self, manifold: Manifold, points: list[ManifoldPoint],
                 domain: DomainSpec | None = None, domain_radius: float = 2.0,
                 solve_reference: bool = True):
        if not points:
            raise ValueError("need at least one sample point")
        for p in points:
            manifold._own(p)
        self.manifold = manifold
        self.points = list(points)
        center = points[0]
        self.domain = domain if domain is not None else DomainSpec(center, domain_radius)
        d_max = self.domain.radius + max(
            manifold.distance(self.domain.center, p) for p in points
        )
        L = _comparison_upper(manifold, d_max)
        mu = _comparison_lower(manifold, d_max)
        cls = STRONGLY_G_CONVEX if mu > 0 else G_CONVEX
        gd = (1.0 / (2.0 * mu), 2.0) if mu > 0 else None
        self.metadata = ObjectiveMetadata(cls, L=L, mu=mu if mu > 0 else None,
                                          grad_dom=gd, L_ball_radius=d_max)
        if solve_reference:
            x_star = reference_minimize(self, self.domain.center)
            self._set_solution(x_star)

    def value(self, x):
        n = len(self.points)
        return sum(0.5 * self.manifold.distance(x, p) ** 2 for p in self.points) / n

    def gradient(self, x):
        n = len(self.points)
        g = np.zeros(self.manifold.ambient_dim)
        for p in self.points:
            g -= self.manifold.log(x, p).coords
        return TangentVector(x, g / n)

    def hessian_matrix(self, x):
        basis = self.manifold.orthonormal_basis(x)
        n = len(self.points)
        H = np.zeros((len(basis), len(basis)))
        for p in self.points:
            H += _dist_sq_hessian(self.manifold, x, p, basis)
        return H / n


class SphereRayleigh(Objective):
    """-0.5 * x^T Q x restricted to the sphere; non-convex, minimized at the
    leading eigenvector."""

    name = "sphere_rayleigh"

    def __init__(self, sphere: Sphere, Q: np.ndarray):
        Q = np.asarray(Q, dtype=float)
        if Q.shape != (sphere.ambient_dim, sphere.ambient_dim):
            raise ValueError("Q must be (n+1) x (n+1) for the embedded sphere")
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise ValueError("Q must be symmetric")
        self.manifold = sphere
        self.Q = Q
        evals, evecs = np.linalg.eigh(Q)
        lam_max = float(evals[-1])
        self.metadata = ObjectiveMetadata(NONCONVEX, L=2.0 * float(np.abs(evals).max()))
        self.domain = DomainSpec(sphere.origin(), 0.99 * np.pi * sphere.radius / 2.0)
        x_star = sphere.point(sphere.radius * evecs[:, -1])
        self._set_solution(x_star, -0.5 * lam_max * sphere.radius**2)

    def value(self, x):
        return -0.5 * float(x.coords @ self.Q @ x.coords)

    def gradient(self, x):
        g = self.manifold._project_tangent(x.coords, -self.Q @ x.coords)
        return TangentVector(x, g)

    def hessian_matrix(self, x):
        basis = self.manifold.orthonormal_basis(x)
        R2 = self.manifold.radius**2
        shift = float(x.coords @ self.Q @ x.coords) / R2
        n = len(basis)
        H = np.empty((n, n))
        for j, bj in enumerate(basis):
            col = -self.Q @ bj.coords
            for i, bi in enumerate(basis):
                H[i, j] = float(np.dot(bi.coords, col))
        H += shift * np.eye(n)
        return 0.5 * (H + H.T)


def grad_check(obj: Objective, x: ManifoldPoint, h: float = 1e-5) -> float:
    """Max relative error between the analytic gradient and central
    differences of ``f o exp`` over the orthonormal basis directions."""
    if not 1e-7 <= h <= 1e-3:
        raise ValueError("h must lie in [1e-7, 1e-3]")
    m = obj.manifold
    g = obj.gradient(x)
    worst = 0.0
    for e in m.orthonormal_basis(x):
        fp = obj.value(m.exp(x, TangentVector(x, h * e.coords)))
        fm = obj.value(m.exp(x, TangentVector(x, -h * e.coords)))
        fd = (fp - fm) / (2.0 * h)
        ge = m.inner(x, g, e)
        worst = max(worst, abs(fd - ge) / (1.0 + abs(ge)))
    return worst


def estimate_hessian_lipschitz(obj: Objective, rng: np.random.Generator,
                               n_samples: int = 200, step_scale: float = 0.5,
                               floor: float = 1e-6) -> float:
    """Numerical Hessian-Lipschitz constant: max third-order defect of the
    second-order model over sampled (x, s), doubled for safety.

    The floor keeps exactly-quadratic objectives usable by the cubic step
    (which requires M > rho/2 > 0).
    """
    m = obj.manifold
    worst = 0.0
    for _ in range(n_samples):
        x = m.exp(obj.domain.center,
                  m.random_tangent(rng, obj.domain.center, 0.4 * obj.domain.radius))
        s = m.random_tangent(rng, x, step_scale)
        ns = m.norm(x, s)
        if ns < 1e-8:
            continue
        basis = m.orthonormal_basis(x)
        sc = np.array([m.inner(x, s, b) for b in basis])
        H = obj.hessian_matrix(x)
        g = obj.gradient(x)
        model = obj.value(x) + m.inner(x, g, s) + 0.5 * float(sc @ H @ sc)
        defect = abs(obj.value(m.exp(x, s)) - model)
        worst = max(worst, 6.0 * defect / ns**3)
    return max(2.0 * worst, floor)


def reference_minimize(obj: Objective, x0: ManifoldPoint, grad_tol: float = 1e-12,
                       max_iter: int = 200_000) -> ManifoldPoint:
    """Plain gradient descent run to a tiny gradient norm; the reference
    oracle for minimizers without a closed form."""
    m = obj.manifold
    L = obj.metadata.L
    if L is None or L <= 0:
        raise ValueError("reference minimization needs a declared L")
    eta = 1.0 / L
    x = x0
    for _ in range(max_iter):
        g = obj.gradient(x)
        if m.norm(x, g) < grad_tol:
            return x
        x = m.exp(x, TangentVector(x, -eta * g.coords))
    raise RuntimeError(f"reference minimization did not reach grad norm {grad_tol:g}")
