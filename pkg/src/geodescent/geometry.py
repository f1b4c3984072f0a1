"""Closed-form Riemannian geometry for Euclidean space, the sphere and
hyperbolic space (hyperboloid model).

All operations are pure functions of their inputs and every manifold object
is immutable after construction, so instances can be shared freely across
concurrent runs.  Points and tangent vectors live in ambient coordinates;
the hyperboloid uses the Minkowski form ``<x, y> = -x0*y0 + sum_i xi*yi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GeometryError",
    "ManifoldMismatchError",
    "BaseMismatchError",
    "AntipodalPointsError",
    "ManifoldPoint",
    "TangentVector",
    "CurvatureBounds",
    "DomainSpec",
    "Manifold",
    "Euclidean",
    "Sphere",
    "Hyperboloid",
    "in_domain",
    "projected_distance",
]

POINT_TOL = 1e-10
ANTIPODAL_TOL = 1e-8


class GeometryError(ValueError):
    """Base class for geometry failures."""


class ManifoldMismatchError(GeometryError):
    """Operands live on different manifolds."""


class BaseMismatchError(GeometryError):
    """Tangent vector is based at a different point than required."""


class AntipodalPointsError(GeometryError):
    """Logarithm requested between (nearly) antipodal sphere points."""


@dataclass(frozen=True)
class ManifoldPoint:
    """A point on a manifold, stored in ambient coordinates."""

    manifold: "Manifold"
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))
        self.coords.setflags(write=False)

    @property
    def manifold_id(self) -> str:
        return self.manifold.key

    def __repr__(self):
        return f"ManifoldPoint({self.manifold.key}, {np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True)
class TangentVector:
    """A tangent vector attached to a base point."""

    base: ManifoldPoint
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))
        self.coords.setflags(write=False)

    @property
    def manifold(self) -> "Manifold":
        return self.base.manifold

    def __repr__(self):
        return f"TangentVector(base={np.array2string(self.base.coords, precision=6)}, coords={np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True)
class CurvatureBounds:
    """Sectional curvature bounds, units 1/length^2."""

    lower: float
    upper: float
    is_hadamard: bool

    def __post_init__(self):
        if self.lower > self.upper:
            raise GeometryError("curvature lower bound exceeds upper bound")
        if self.is_hadamard and self.upper > 0:
            raise GeometryError("Hadamard manifolds have nonpositive curvature")


@dataclass(frozen=True)
class DomainSpec:
    """A closed geodesic ball; the set the iterates are expected to stay in."""

    center: ManifoldPoint
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise GeometryError("domain radius must be nonnegative")
        m = self.center.manifold
        if isinstance(m, Sphere) and self.diameter >= np.pi * m.radius:
            raise GeometryError(
                "sphere domain diameter must stay below pi*R for geodesic uniqueness"
            )

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius


class Manifold:
    """Interface shared by the concrete geometries.

    Subclasses provide ``_exp``, ``_log``, ``_transport``, ``_distance``,
    ``_project_point``, ``_project_tangent`` and validity checks on raw
    coordinate arrays; the public methods handle wrapping, validation and
    the common error conditions.
    """

    dim: int
    ambient_dim: int
    key: str

    # -- construction -----------------------------------------------------

    def point(self, coords) -> ManifoldPoint:
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.ambient_dim,):
            raise GeometryError(
                f"expected {self.ambient_dim} ambient coordinates, got shape {coords.shape}"
            )
        if not np.all(np.isfinite(coords)):
            raise GeometryError("non-finite point coordinates")
        p = ManifoldPoint(self, coords)
        self.check_point(p)
        return p

    def tangent(self, base: ManifoldPoint, coords) -> TangentVector:
        self._own(base)
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.ambient_dim,):
            raise GeometryError(
                f"expected {self.ambient_dim} ambient coordinates, got shape {coords.shape}"
            )
        if not np.all(np.isfinite(coords)):
            raise GeometryError("non-finite tangent coordinates")
        v = TangentVector(base, coords)
        self.check_tangent(v)
        return v

    def zero_tangent(self, base: ManifoldPoint) -> TangentVector:
        return TangentVector(base, np.zeros(self.ambient_dim))

    # -- validation --------------------------------------------------------

    def check_point(self, x: ManifoldPoint, tol: float = POINT_TOL):
        err = self._point_defect(x.coords)
        if err > tol:
            raise GeometryError(f"point violates {self.key} constraint by {err:.3e}")

    def check_tangent(self, v: TangentVector, tol: float = POINT_TOL):
        err = self._tangent_defect(v.base.coords, v.coords)
        # absolute at unit scale, relative for large vectors / far points
        scale = 1.0 + float(np.linalg.norm(v.base.coords) * np.linalg.norm(v.coords))
        if err > tol * scale:
            raise GeometryError(f"tangent violates {self.key} constraint by {err:.3e}")

    def _own(self, x: ManifoldPoint):
        if x.manifold is not self and x.manifold.key != self.key:
            raise ManifoldMismatchError(
                f"point belongs to {x.manifold.key}, expected {self.key}"
            )

    def _same_base(self, x: ManifoldPoint, v: TangentVector):
        self._own(x)
        self._own(v.base)
        if not np.array_equal(x.coords, v.base.coords):
            raise BaseMismatchError("tangent vector is based at a different point")

    # -- metric ------------------------------------------------------------

    def inner(self, x: ManifoldPoint, v: TangentVector, w: TangentVector) -> float:
        self._same_base(x, v)
        self._same_base(x, w)
        return self._inner(x.coords, v.coords, w.coords)

    def norm(self, x: ManifoldPoint, v: TangentVector) -> float:
        self._same_base(x, v)
        return float(np.sqrt(max(self._inner(x.coords, v.coords, v.coords), 0.0)))

    # -- exponential / logarithm -------------------------------------------

    def exp(self, x: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
        self._same_base(x, v)
        if not np.all(np.isfinite(v.coords)):
            raise GeometryError("non-finite tangent coordinates")
        out = self._exp(x.coords, v.coords)
        return ManifoldPoint(self, self._project_point(out))

    def log(self, x: ManifoldPoint, y: ManifoldPoint) -> TangentVector:
        self._own(x)
        self._own(y)
        return TangentVector(x, self._log(x.coords, y.coords))

    def distance(self, x: ManifoldPoint, y: ManifoldPoint) -> float:
        self._own(x)
        self._own(y)
        return self._distance(x.coords, y.coords)

    def transport(self, x: ManifoldPoint, y: ManifoldPoint, v: TangentVector) -> TangentVector:
        """Parallel transport of ``v`` along the geodesic from ``x`` to ``y``."""
        self._same_base(x, v)
        self._own(y)
        return TangentVector(y, self._transport(x.coords, y.coords, v.coords))

    def projected_distance(self, x: ManifoldPoint, w: ManifoldPoint, v: ManifoldPoint) -> float:
        """Norm of ``log(x, w) - log(x, v)``, the tangent-space surrogate of d(w, v)."""
        lw = self.log(x, w)
        lv = self.log(x, v)
        d = lw.coords - lv.coords
        return float(np.sqrt(max(self._inner(x.coords, d, d), 0.0)))

    # -- bases and sampling --------------------------------------------------

    def orthonormal_basis(self, x: ManifoldPoint) -> list[TangentVector]:
        """Deterministic orthonormal tangent basis at ``x`` (Gram-Schmidt of the
        ambient basis projected to the tangent space)."""
        self._own(x)
        basis = []
        for i in range(self.ambient_dim):
            e = np.zeros(self.ambient_dim)
            e[i] = 1.0
            u = self._project_tangent(x.coords, e)
            for b in basis:
                u = u - self._inner(x.coords, u, b) * b
            nrm = np.sqrt(max(self._inner(x.coords, u, u), 0.0))
            if nrm > 1e-8:
                basis.append(u / nrm)
            if len(basis) == self.dim:
                break
        return [TangentVector(x, b) for b in basis]

    def random_point(self, rng: np.random.Generator, scale: float = 1.0) -> ManifoldPoint:
        """Point at exp of a Gaussian tangent vector from the origin (scale =
        std dev of the tangent coordinates)."""
        o = self.origin()
        v = self.random_tangent(rng, o, scale)
        return self.exp(o, v)

    def random_tangent(self, rng: np.random.Generator, x: ManifoldPoint, scale: float = 1.0) -> TangentVector:
        basis = self.orthonormal_basis(x)
        coeff = rng.normal(0.0, scale, size=self.dim)
        coords = sum(c * b.coords for c, b in zip(coeff, basis))
        return TangentVector(x, self._project_tangent(x.coords, coords))

    def origin(self) -> ManifoldPoint:
        raise NotImplementedError

    def curvature_bounds(self) -> CurvatureBounds:
        raise NotImplementedError

    # -- hooks ---------------------------------------------------------------

    def _inner(self, x, v, w) -> float:
        raise NotImplementedError

    def _exp(self, x, v):
        raise NotImplementedError

    def _log(self, x, y):
        raise NotImplementedError

    def _distance(self, x, y) -> float:
        raise NotImplementedError

    def _transport(self, x, y, v):
        raise NotImplementedError

    def _project_point(self, x):
        raise NotImplementedError

    def _project_tangent(self, x, v):
        raise NotImplementedError

    def _point_defect(self, x) -> float:
        raise NotImplementedError

    def _tangent_defect(self, x, v) -> float:
        raise NotImplementedError

    def __repr__(self):
        return self.key


class Euclidean(Manifold):
    """Flat space; exp/log/transport are +, - and the identity."""

    def __init__(self, n: int):
        self.dim = n
        self.ambient_dim = n
        self.key = f"euclidean(n={n})"

    def origin(self):
        return ManifoldPoint(self, np.zeros(self.dim))

    def curvature_bounds(self):
        return CurvatureBounds(0.0, 0.0, True)

    def _inner(self, x, v, w):
        return float(np.dot(v, w))

    def _exp(self, x, v):
        return x + v

    def _log(self, x, y):
        return y - x

    def _distance(self, x, y):
        return float(np.linalg.norm(y - x))

    def _transport(self, x, y, v):
        return v.copy()

    def _project_point(self, x):
        return x

    def _project_tangent(self, x, v):
        return v

    def _point_defect(self, x):
        return 0.0

    def _tangent_defect(self, x, v):
        return 0.0


class Sphere(Manifold):
    """Sphere of radius R embedded in R^{n+1}; sectional curvature 1/R^2."""

    def __init__(self, n: int, radius: float = 1.0):
        if radius <= 0:
            raise GeometryError("sphere radius must be positive")
        self.dim = n
        self.ambient_dim = n + 1
        self.radius = float(radius)
        self.key = f"sphere(n={n},R={radius:g})"

    def origin(self):
        c = np.zeros(self.ambient_dim)
        c[-1] = self.radius
        return ManifoldPoint(self, c)

    def curvature_bounds(self):
        k = 1.0 / self.radius**2
        return CurvatureBounds(k, k, False)

    def _inner(self, x, v, w):
        return float(np.dot(v, w))

    def _exp(self, x, v):
        R = self.radius
        nv = np.linalg.norm(v)
        if nv < 1e-300:
            return x.copy()
        t = nv / R
        return np.cos(t) * x + np.sin(t) * (R / nv) * v

    def _log(self, x, y):
        R = self.radius
        c = np.dot(x, y) / R**2
        if c < -1.0 + ANTIPODAL_TOL:
            raise AntipodalPointsError(
                "logarithm undefined within tolerance of the antipode"
            )
        w = y - c * x
        nw = np.linalg.norm(w)
        if nw < 1e-300:
            return np.zeros_like(x)
        # atan2 keeps full precision at both ends of the arc
        theta = np.arctan2(nw / R, c)
        return (R * theta / nw) * w

    def _distance(self, x, y):
        c = np.dot(x, y) / self.radius**2
        w = y - c * x
        return float(self.radius * np.arctan2(np.linalg.norm(w) / self.radius, c))

    def _transport(self, x, y, v):
        lg = self._log(x, y)
        d = np.linalg.norm(lg)
        if d < 1e-300:
            return self._project_tangent(y, v)
        u = lg / d
        theta = d / self.radius
        a = np.dot(v, u)
        u_y = np.cos(theta) * u - np.sin(theta) * x / self.radius
        out = (v - a * u) + a * u_y
        return self._project_tangent(y, out)

    def _project_point(self, x):
        return self.radius * x / np.linalg.norm(x)

    def _project_tangent(self, x, v):
        return v - (np.dot(x, v) / self.radius**2) * x

    def _point_defect(self, x):
        return abs(np.linalg.norm(x) - self.radius)

    def _tangent_defect(self, x, v):
        return abs(np.dot(x, v)) / self.radius


class Hyperboloid(Manifold):
    """Hyperboloid (Lorentz) model of hyperbolic space with sectional
    curvature ``-kappa``.

    Points satisfy ``<x, x>_L = -1/kappa`` with ``x[0] > 0`` where ``<.,.>_L``
    is the Minkowski form; the Riemannian metric is its restriction to
    tangent spaces, where it is positive definite.
    """

    def __init__(self, n: int, kappa: float = 1.0):
        if kappa <= 0:
            raise GeometryError("kappa must be positive (curvature is -kappa)")
        self.dim = n
        self.ambient_dim = n + 1
        self.kappa = float(kappa)
        self.key = f"hyperboloid(n={n},kappa={kappa:g})"

    def origin(self):
        c = np.zeros(self.ambient_dim)
        c[0] = 1.0 / np.sqrt(self.kappa)
        return ManifoldPoint(self, c)

    def curvature_bounds(self):
        return CurvatureBounds(-self.kappa, -self.kappa, True)

    @staticmethod
    def minkowski(u, v) -> float:
        return float(-u[0] * v[0] + np.dot(u[1:], v[1:]))

    def _inner(self, x, v, w):
        return self.minkowski(v, w)

    def _norm_tangent(self, v):
        return float(np.sqrt(max(self.minkowski(v, v), 0.0)))

    def _exp(self, x, v):
        sk = np.sqrt(self.kappa)
        nv = self._norm_tangent(v)
        if nv < 1e-300:
            return x.copy()
        t = sk * nv
        return np.cosh(t) * x + np.sinh(t) * v / (sk * nv)

    def _log(self, x, y):
        # tangential component of y at x under the Minkowski form
        w = y + self.kappa * self.minkowski(x, y) * x
        nw = self._norm_tangent(w)
        if nw < 1e-300:
            return np.zeros_like(x)
        sk = np.sqrt(self.kappa)
        d = np.arcsinh(sk * nw) / sk
        return (d / nw) * w

    def _distance(self, x, y):
        # asinh of the projected norm: exact at zero separation, where the
        # arccosh form loses half the significant digits
        w = y + self.kappa * self.minkowski(x, y) * x
        nw = self._norm_tangent(w)
        sk = np.sqrt(self.kappa)
        return float(np.arcsinh(sk * nw) / sk)

    def _transport(self, x, y, v):
        lg = self._log(x, y)
        d = self._norm_tangent(lg)
        if d < 1e-300:
            return self._project_tangent(y, v)
        u = lg / d
        sk = np.sqrt(self.kappa)
        t = sk * d
        a = self.minkowski(v, u)
        u_y = sk * np.sinh(t) * x + np.cosh(t) * u
        out = (v - a * u) + a * u_y
        return self._project_tangent(y, out)

    def _project_point(self, x):
        # re-solve the time coordinate from the spatial part to kill drift
        out = x.copy()
        out[0] = np.sqrt(1.0 / self.kappa + np.dot(x[1:], x[1:]))
        return out

    def _project_tangent(self, x, v):
        return v + self.kappa * self.minkowski(x, v) * x

    def _point_defect(self, x):
        if x[0] <= 0:
            return np.inf
        return abs(self.minkowski(x, x) + 1.0 / self.kappa) * self.kappa

    def _tangent_defect(self, x, v):
        return abs(self.minkowski(x, v)) * np.sqrt(self.kappa)


def in_domain(dom: DomainSpec, x: ManifoldPoint, tol: float = 1e-9) -> bool:
    """Whether ``x`` lies in the closed geodesic ball ``dom`` (boundary inclusive)."""
    m = dom.center.manifold
    return m.distance(dom.center, x) <= dom.radius + tol


def projected_distance(x: ManifoldPoint, w: ManifoldPoint, v: ManifoldPoint) -> float:
    """Module-level convenience for ``x.manifold.projected_distance``."""
    return x.manifold.projected_distance(x, w, v)
