"""Descent algorithms with per-iteration decrease certificates and the
closed-form rate envelopes they imply.

A certificate ``(p, c, direction)`` claims each step decreases f by at least
``c * ||grad f||^(p/(p-1))``, with the gradient taken at the new iterate
(forward) or the current one (backward).  ``certify`` re-checks the claim on
a recorded trace, independently of how the steps were produced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from geodescent.geometry import DomainSpec, ManifoldPoint, TangentVector, in_domain
from geodescent.objectives import Objective, _comparison_upper

__all__ = [
    "DescentCertificate",
    "IterateTrace",
    "RateConstants",
    "ProximalSolverError",
    "SubsolverError",
    "rgd_step",
    "proximal_step",
    "cubic_newton_step",
    "GradientDescent",
    "ProximalPoint",
    "CubicNewton",
    "run_descent",
    "certify",
    "rate_bound_gconvex",
    "rate_bound_nonconvex",
    "rate_bound_graddom",
    "default_tolerance",
]

FORWARD = "forward"
BACKWARD = "backward"


class ProximalSolverError(RuntimeError):
    """Inner proximal solve did not reach the optimality residual."""


class SubsolverError(RuntimeError):
    """Cubic subproblem solution failed the acceptance conditions."""


@dataclass(frozen=True)
class DescentCertificate:
    """Per-step decrease claim attached to an algorithm."""

    p: float
    c: float
    direction: str

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError("certificate order p must exceed 1")
        if not (np.isfinite(self.c) and self.c > 0):
            raise ValueError("descent constant c must be finite and positive")
        if self.direction not in (FORWARD, BACKWARD):
            raise ValueError(f"unknown direction {self.direction!r}")

    @property
    def exponent(self) -> float:
        return self.p / (self.p - 1.0)


@dataclass
class IterateTrace:
    """Recorded run: iterates x_0..x_K plus values, gradient norms and the
    per-step certificate slack (positive slack = inequality violated)."""

    iterates: list[ManifoldPoint]
    values: list[float]
    grad_norms: list[float]
    per_step_violation: list[float]
    domain_exit: int | None = None

    def __post_init__(self):
        n = len(self.iterates)
        if len(self.values) != n or len(self.grad_norms) != n:
            raise ValueError("trace column lengths are inconsistent")
        if len(self.per_step_violation) not in (0, n - 1):
            raise ValueError("need one violation entry per step")
        if not all(np.isfinite(v) for v in self.values):
            raise ValueError("non-finite objective values in trace")

    def __len__(self):
        return len(self.iterates)


@dataclass(frozen=True)
class RateConstants:
    """Constants of the g-convex rate envelope, in final combined form."""

    p: float
    c: float

    @property
    def C_fwd(self) -> float:
        return self.c ** (1.0 - self.p) * (self.p**2 - self.p) ** (self.p - 1.0)

    @property
    def C_bwd(self) -> float:
        return self.c ** (1.0 - self.p) * (self.p - 1.0) ** (self.p - 1.0)


def default_tolerance(f0: float) -> float:
    """Additive slack allowed in per-iteration inequality checks."""
    return 1e-9 * (1.0 + abs(f0))


# ---------------------------------------------------------------------------
# steps


def rgd_step(obj: Objective, x: ManifoldPoint, eta: float) -> ManifoldPoint:
    """One gradient step ``exp(x, -eta * grad f(x))``.

    Requires 0 < eta < 2/L for the declared L; the corresponding
    certificate is (2, eta*(1 - L*eta/2), backward).
    """
    L = obj.metadata.L
    if L is not None and not 0.0 < eta < 2.0 / L:
        raise ValueError(f"eta={eta:g} outside (0, 2/L) for L={L:g}")
    if eta <= 0:
        raise ValueError("eta must be positive")
    g = obj.gradient(x)
    return obj.manifold.exp(x, TangentVector(x, -eta * g.coords))


def proximal_step(obj: Objective, x: ManifoldPoint, eta: float,
                  tol_prox: float = 1e-9, max_inner: int = 50_000) -> ManifoldPoint:
    """Approximate proximal point: minimize ``f(y) + d(y, x)^2 / (2 eta)``.

    The inner problem is solved by gradient descent (it gains 1/eta in
    strong convexity) until the first-order residual
    ``||log(x', x) - eta * grad f(x')||`` drops below ``tol_prox``.
    Certificate: (2, eta/2, forward).
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    m = obj.manifold
    L_f = obj.metadata.L if obj.metadata.L is not None else 1.0
    # curvature bound for the proximal quadratic on the relevant region
    L_prox = _comparison_upper(m, 2.0 * obj.domain.radius + m.distance(obj.domain.center, x))
    step = 1.0 / (L_f + L_prox / eta)
    y = x
    for _ in range(max_inner):
        g_f = obj.gradient(y)
        back = m.log(y, x)
        residual = np.sqrt(max(m._inner(y.coords, back.coords - eta * g_f.coords,
                                        back.coords - eta * g_f.coords), 0.0))
        if residual < tol_prox:
            return y
        g_total = TangentVector(y, g_f.coords - back.coords / eta)
        y = m.exp(y, TangentVector(y, -step * g_total.coords))
    raise ProximalSolverError(
        f"optimality residual {residual:.3e} > {tol_prox:g} after {max_inner} inner iterations"
    )


def _solve_cubic_model(g: np.ndarray, H: np.ndarray, M: float) -> np.ndarray:
    """Global minimizer of ``<g,s> + s'Hs/2 + M*||s||^3/3`` via the secular
    equation in the eigenbasis of H (hard case included)."""
    evals, evecs = np.linalg.eigh(H)
    ghat = evecs.T @ g
    lam_min = float(evals[0])
    sigma_min = max(0.0, -lam_min)
    scale = 1.0 + float(np.abs(evals).max()) + float(np.linalg.norm(g))

    def snorm(sigma):
        return float(np.linalg.norm(ghat / (evals + sigma)))

    def phi(sigma):
        return snorm(sigma) - sigma / M

    # strictly interior evaluation point just above sigma_min
    lo = sigma_min + 1e-14 * scale
    if phi(lo) <= 0.0:
        # hard case: sigma pinned at sigma_min; pad with the bottom eigenvector
        denom = evals + sigma_min
        mask = denom > 1e-12 * scale
        s_hat = np.zeros_like(ghat)
        s_hat[mask] = -ghat[mask] / denom[mask]
        gap = (sigma_min / M) ** 2 - float(np.dot(s_hat, s_hat))
        if gap > 0 and not mask[0]:
            s_hat[0] += np.sqrt(gap)
        return evecs @ s_hat
    hi = max(2.0 * sigma_min, np.sqrt(M * np.linalg.norm(g)), 1e-8)
    while phi(hi) > 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise SubsolverError("secular equation bracket expansion failed")
    sigma = brentq(phi, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    s_hat = -ghat / (evals + sigma)
    return evecs @ s_hat


def cubic_newton_step(obj: Objective, x: ManifoldPoint, M: float, theta: float,
                      rho: float | None = None) -> tuple[ManifoldPoint, TangentVector]:
    """One cubic-regularized Newton step.

    Returns ``(exp(x, s), s)`` where s minimizes the cubic model
    ``m(s) = f(x) + <g,s> + s'Hs/2 + M||s||^3/3`` and satisfies the
    acceptance conditions ``m(s) <= m(0)`` and ``||grad m(s)|| <= theta ||s||^2``
    (re-verified here, up to float-level slack).  Certificate:
    (3, (M/3 - rho/6) * (theta + rho/2 + M)^(-3/2), forward).
    """
    rho = obj.metadata.rho if rho is None else rho
    if rho is None:
        raise ValueError("cubic Newton needs a Hessian-Lipschitz constant rho")
    if not M > rho / 2.0:
        raise ValueError(f"need M > rho/2, got M={M:g}, rho={rho:g}")
    if theta <= 0:
        raise ValueError("theta must be positive")
    m = obj.manifold
    basis = m.orthonormal_basis(x)
    g_vec = obj.gradient(x)
    g = np.array([m.inner(x, g_vec, b) for b in basis])
    H = obj.hessian_matrix(x)
    gn = float(np.linalg.norm(g))
    lam_min = float(np.linalg.eigvalsh(H)[0])
    atol = 1e-12 * (1.0 + gn + float(np.abs(H).max()))

    if gn <= atol and lam_min >= -atol:
        # stationary with PSD Hessian: s = 0 satisfies both conditions
        return x, m.zero_tangent(x)

    s = _solve_cubic_model(g, H, M)

    def model_drop(sv):
        return float(g @ sv + 0.5 * sv @ H @ sv + (M / 3.0) * np.linalg.norm(sv) ** 3)

    def model_grad(sv):
        return g + H @ sv + M * np.linalg.norm(sv) * sv

    if np.linalg.norm(model_grad(s)) > theta * np.dot(s, s) + atol:
        # fall back to gradient descent on the model
        step = 1.0 / (abs(lam_min) + float(np.abs(H).max()) + M * np.linalg.norm(s) + 1.0)
        for _ in range(20_000):
            gm = model_grad(s)
            if np.linalg.norm(gm) <= theta * np.dot(s, s) + atol:
                break
            s = s - step * gm
        else:
            raise SubsolverError("theta-condition unmet within iteration budget")
    if model_drop(s) > atol:
        raise SubsolverError("cubic model did not decrease at the returned step")

    s_coords = sum(si * b.coords for si, b in zip(s, basis))
    s_vec = TangentVector(x, m._project_tangent(x.coords, np.asarray(s_coords)))
    return m.exp(x, s_vec), s_vec


# ---------------------------------------------------------------------------
# algorithms (step + certificate)


class GradientDescent:
    """Riemannian gradient descent; 2-backward descent for L-g-smooth f."""

    def __init__(self, eta: float):
        self.eta = float(eta)

    def step(self, obj, x):
        return rgd_step(obj, x, self.eta)

    def certificate(self, obj) -> DescentCertificate:
        L = obj.metadata.L
        if L is None:
            raise ValueError("gradient descent certificate needs a declared L")
        return DescentCertificate(2.0, self.eta * (1.0 - L * self.eta / 2.0), BACKWARD)

    def __repr__(self):
        return f"GradientDescent(eta={self.eta:g})"


class ProximalPoint:
    """Proximal point method; 2-forward descent for any eta > 0."""

    def __init__(self, eta: float, tol_prox: float = 1e-9, max_inner: int = 50_000):
        self.eta = float(eta)
        self.tol_prox = tol_prox
        self.max_inner = max_inner

    def step(self, obj, x):
        return proximal_step(obj, x, self.eta, self.tol_prox, self.max_inner)

    def certificate(self, obj) -> DescentCertificate:
        return DescentCertificate(2.0, self.eta / 2.0, FORWARD)

    def __repr__(self):
        return f"ProximalPoint(eta={self.eta:g})"


class CubicNewton:
    """Cubic-regularized Newton; 3-forward descent for rho-Hessian-Lipschitz f.

    With the defaults theta = rho/2 and M = rho the certificate constant
    simplifies to 1/(12*sqrt(2)*sqrt(rho)).
    """

    def __init__(self, M: float | None = None, theta: float | None = None):
        self.M = M
        self.theta = theta

    def _params(self, obj):
        rho = obj.metadata.rho
        if rho is None and (self.M is None or self.theta is None):
            raise ValueError("cubic Newton defaults need a declared rho")
        M = self.M if self.M is not None else rho
        theta = self.theta if self.theta is not None else rho / 2.0
        return M, theta, rho if rho is not None else 2.0 * M

    def step(self, obj, x):
        M, theta, rho = self._params(obj)
        return cubic_newton_step(obj, x, M, theta, rho)[0]

    def certificate(self, obj) -> DescentCertificate:
        M, theta, rho = self._params(obj)
        c = (M / 3.0 - rho / 6.0) * (theta + rho / 2.0 + M) ** (-1.5)
        return DescentCertificate(3.0, c, FORWARD)

    def __repr__(self):
        return f"CubicNewton(M={self.M}, theta={self.theta})"


# ---------------------------------------------------------------------------
# driver and checks


def run_descent(alg, obj: Objective, x0: ManifoldPoint, k_max: int,
                dom: DomainSpec | None = None, callback=None) -> IterateTrace:
    """Run ``alg`` for up to ``k_max`` steps, recording values, gradient norms
    and the per-step certificate slack.  The first iterate outside ``dom`` is
    recorded (assumption monitor), not fatal.  ``callback(k, x, f, grad_norm,
    slack)`` fires after every recorded iterate (slack None at k=0)."""
    m = obj.manifold
    dom = dom if dom is not None else obj.domain
    cert = alg.certificate(obj)
    if not in_domain(dom, x0):
        raise ValueError("x0 must start inside the domain")
    xs = [x0]
    vals = [obj.value(x0)]
    gns = [m.norm(x0, obj.gradient(x0))]
    viol = []
    exit_k = None
    x = x0
    if callback is not None:
        callback(0, x0, vals[0], gns[0], None)
    for k in range(k_max):
        x_new = alg.step(obj, x)
        f_new = obj.value(x_new)
        gn_new = m.norm(x_new, obj.gradient(x_new))
        gn_ref = gn_new if cert.direction == FORWARD else gns[-1]
        viol.append(f_new - vals[-1] + cert.c * gn_ref**cert.exponent)
        xs.append(x_new)
        vals.append(f_new)
        gns.append(gn_new)
        if exit_k is None and not in_domain(dom, x_new):
            exit_k = k + 1
        if callback is not None:
            callback(k + 1, x_new, f_new, gn_new, viol[-1])
        x = x_new
    return IterateTrace(xs, vals, gns, viol, exit_k)


def certify(trace: IterateTrace, cert: DescentCertificate, tol: float) -> tuple[bool, float]:
    """Check the descent inequality on every step of a trace.

    Returns (passed, worst slack); slack above ``tol`` anywhere fails.
    """
    if len(trace) < 2:
        raise ValueError("need at least two iterates to certify")
    worst = -np.inf
    q = cert.exponent
    for k in range(len(trace) - 1):
        gn = trace.grad_norms[k + 1] if cert.direction == FORWARD else trace.grad_norms[k]
        slack = trace.values[k + 1] - trace.values[k] + cert.c * gn**q
        worst = max(worst, slack)
    return worst <= tol, float(worst)


def rate_bound_gconvex(p: float, c: float, diam: float, k: int, direction: str) -> float:
    """g-convex envelope ``C * diam^p / k^(p-1)`` with the combined constant."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rc = RateConstants(p, c)
    C = rc.C_fwd if direction == FORWARD else rc.C_bwd
    return C * diam**p / k ** (p - 1.0)


def rate_bound_nonconvex(c: float, p: float, f0_gap: float, k: int) -> float:
    """Upper bound on ``min_{t<=k} ||grad f(x_t)||`` without any assumptions."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if f0_gap < 0:
        raise ValueError("initial gap must be nonnegative")
    return (f0_gap / (c * k)) ** ((p - 1.0) / p)


def rate_bound_graddom(c: float, tau: float, k: int, direction: str, f0_gap: float) -> float:
    """Linear-rate envelope for (tau, p)-gradient-dominated objectives."""
    if direction == BACKWARD:
        if c > tau:
            raise ValueError("backward envelope needs c <= tau")
        return (1.0 - c / tau) ** k * f0_gap
    return (1.0 + c / tau) ** (-k) * f0_gap
