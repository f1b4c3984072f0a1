import numpy as np
import pytest

from geodescent.geometry import DomainSpec, Euclidean, Hyperboloid, Sphere, TangentVector
from geodescent.objectives import (
    FrechetMean,
    ObjectiveMetadata,
    Quadratic,
    SphereRayleigh,
    SquaredDistance,
    estimate_hessian_lipschitz,
    grad_check,
    reference_minimize,
)
from helpers import (
    make_frechet_h2,
    make_frechet_sphere,
    make_quadratic,
    make_rayleigh,
    make_sqdist_h2,
)


def _sample_inside(obj, rng, point_scale=0.4, step_scale=0.35):
    """(x, s) with x in the domain ball and exp_x(s) still inside it."""
    m = obj.manifold
    r = obj.domain.radius
    x = m.exp(obj.domain.center, m.random_tangent(rng, obj.domain.center, point_scale * r / 2))
    s = m.random_tangent(rng, x, step_scale * r / 2)
    return x, s


# ---------------------------------------------------------------------------
# metadata and solutions


def test_metadata_validation():
    with pytest.raises(ValueError):
        ObjectiveMetadata("strongly_g_convex")  # mu missing
    with pytest.raises(ValueError):
        ObjectiveMetadata("banana")


def test_quadratic_basics():
    obj = Quadratic([1.0, 0.0])
    E = obj.manifold
    assert obj.value(E.point([0.0, 0.0])) == pytest.approx(0.5)
    assert obj.value(E.point([1.0, 0.0])) == 0.0
    g = obj.gradient(E.point([3.0, 4.0]))
    np.testing.assert_allclose(g.coords, [2.0, 4.0])
    np.testing.assert_allclose(obj.hessian_matrix(E.point([0.0, 0.0])), np.eye(2))
    assert obj.metadata.L == 1.0 and obj.metadata.mu == 1.0
    assert obj.known_solution.f_star == 0.0


def test_quadratic_anisotropic_constants():
    obj = Quadratic([0.0, 0.0], scales=[1.0, 0.01])
    assert obj.metadata.L == 1.0
    assert obj.metadata.mu == pytest.approx(0.01)
    np.testing.assert_allclose(obj.hessian_matrix(obj.manifold.origin()),
                               np.diag([1.0, 0.01]))


def test_squared_distance_at_target():
    obj = make_sqdist_h2()
    t = obj.target
    assert obj.value(t) == 0.0
    assert obj.manifold.norm(t, obj.gradient(t)) == pytest.approx(0.0, abs=1e-12)
    assert obj.known_solution.x_star is t


def test_squared_distance_euclidean_matches_quadratic():
    E = Euclidean(2)
    target = E.point([1.0, 0.0])
    obj = SquaredDistance(E, target, domain=DomainSpec(target, 5.0))
    q = Quadratic([1.0, 0.0])
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = E.point(rng.normal(size=2))
        assert obj.value(x) == pytest.approx(q.value(x))
        np.testing.assert_allclose(obj.gradient(x).coords, q.gradient(x).coords, atol=1e-12)
    np.testing.assert_allclose(obj.hessian_matrix(E.point([3.0, -1.0])), np.eye(2), atol=1e-12)
    assert obj.metadata.L == 1.0 and obj.metadata.mu == 1.0


def test_frechet_value_is_direct_summation():
    obj = make_frechet_h2(solve_reference=False)
    m = obj.manifold
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = m.random_point(rng, 0.5)
        direct = sum(0.5 * m.distance(x, p) ** 2 for p in obj.points) / len(obj.points)
        assert obj.value(x) == pytest.approx(direct, rel=1e-14)


def test_frechet_gradient_vanishes_at_symmetric_mean():
    H = Hyperboloid(2, 1.0)
    o = H.origin()
    v = H.tangent(o, [0.0, 0.7, 0.0])
    p1 = H.exp(o, v)
    p2 = H.exp(o, TangentVector(o, -v.coords))
    obj = FrechetMean(H, [p1, p2], domain=DomainSpec(o, 2.0), solve_reference=False)
    assert H.norm(o, obj.gradient(o)) == pytest.approx(0.0, abs=1e-12)


def test_frechet_reference_solution():
    obj = make_frechet_h2()
    sol = obj.known_solution
    assert sol is not None
    gn = obj.manifold.norm(sol.x_star, obj.gradient(sol.x_star))
    assert gn < 1e-10
    assert sol.f_star == pytest.approx(obj.value(sol.x_star))


def test_known_solution_rejects_non_stationary_point():
    H = Hyperboloid(2, 1.0)
    o = H.origin()
    target = H.exp(o, H.tangent(o, [0.0, 0.5, 0.0]))
    obj = SquaredDistance(H, target)
    with pytest.raises(ValueError):
        obj._set_solution(o, 0.0)


def test_rayleigh_minimizer_and_constants():
    obj = make_rayleigh()
    S = obj.manifold
    sol = obj.known_solution
    assert sol.f_star == pytest.approx(-1.0)  # -0.5 * lambda_max * R^2
    assert abs(sol.x_star.coords[0]) == pytest.approx(1.0)
    assert obj.metadata.L == pytest.approx(4.0)
    assert obj.metadata.convexity_class == "nonconvex"
    assert S.norm(sol.x_star, obj.gradient(sol.x_star)) < 1e-12


# ---------------------------------------------------------------------------
# gradient and Hessian oracles


@pytest.mark.parametrize("make", [make_quadratic, make_sqdist_h2, make_rayleigh,
                                  make_frechet_sphere,
                                  lambda: make_frechet_h2(solve_reference=False)])
def test_grad_check_small(make):
    obj = make()
    rng = np.random.default_rng(2)
    for _ in range(5):
        x, _ = _sample_inside(obj, rng)
        assert grad_check(obj, x, 1e-5) < 1e-6


def test_grad_check_quadratic_is_exact():
    obj = make_quadratic()
    x = obj.manifold.point([0.3, -0.8])
    assert grad_check(obj, x, 1e-5) < 1e-8


def test_grad_check_at_stationary_point():
    obj = make_sqdist_h2()
    assert grad_check(obj, obj.target, 1e-5) < 1e-8


def test_grad_check_rejects_bad_h():
    obj = make_quadratic()
    with pytest.raises(ValueError):
        grad_check(obj, obj.manifold.origin(), 1e-2)


def test_sqdist_h2_hessian_eigenvalues():
    obj = make_sqdist_h2()
    H = obj.manifold
    rng = np.random.default_rng(3)
    for _ in range(10):
        x, _ = _sample_inside(obj, rng)
        d = H.distance(x, obj.target)
        if d < 1e-6:
            continue
        evals = np.sort(np.linalg.eigvalsh(obj.hessian_matrix(x)))
        expected = np.sort([1.0, d / np.tanh(d)])
        np.testing.assert_allclose(evals, expected, rtol=1e-10)


@pytest.mark.parametrize("make", [make_quadratic, make_sqdist_h2, make_rayleigh,
                                  lambda: make_frechet_h2(solve_reference=False)])
def test_hessian_matches_finite_differences(make):
    obj = make()
    m = obj.manifold
    rng = np.random.default_rng(4)
    h = 1e-4
    for _ in range(5):
        x, s = _sample_inside(obj, rng)
        ns = m.norm(x, s)
        if ns < 1e-8:
            continue
        basis = m.orthonormal_basis(x)
        sc = np.array([m.inner(x, s, b) for b in basis])
        Hm = obj.hessian_matrix(x)
        np.testing.assert_allclose(Hm, Hm.T, atol=1e-9)
        quad = float(sc @ Hm @ sc)
        fp = obj.value(m.exp(x, TangentVector(x, (h / ns) * s.coords)))
        fm = obj.value(m.exp(x, TangentVector(x, (-h / ns) * s.coords)))
        fd = (fp - 2.0 * obj.value(x) + fm) / h**2 * ns**2
        assert quad == pytest.approx(fd, rel=1e-4, abs=1e-7)


# ---------------------------------------------------------------------------
# convexity-class property checks


@pytest.mark.parametrize("make", [make_quadratic, make_sqdist_h2,
                                  make_frechet_sphere,
                                  lambda: make_frechet_h2(solve_reference=False)])
def test_first_order_gconvexity_lower_bound(make):
    obj = make()
    m = obj.manifold
    rng = np.random.default_rng(5)
    slack = 1e-9
    for _ in range(1000):
        x, s = _sample_inside(obj, rng)
        lhs = obj.value(m.exp(x, s))
        rhs = obj.value(x) + m.inner(x, obj.gradient(x), s)
        if obj.metadata.convexity_class == "strongly_g_convex":
            rhs += 0.5 * obj.metadata.mu * m.norm(x, s) ** 2
        assert lhs >= rhs - slack


@pytest.mark.parametrize("make", [make_quadratic, make_sqdist_h2, make_rayleigh,
                                  lambda: make_frechet_h2(solve_reference=False)])
def test_l_smoothness_upper_bound(make):
    obj = make()
    m = obj.manifold
    L = obj.metadata.L
    rng = np.random.default_rng(6)
    for _ in range(500):
        x, s = _sample_inside(obj, rng)
        y = m.exp(x, s)
        lg = m.log(x, y)
        bound = obj.value(x) + m.inner(x, obj.gradient(x), lg) + 0.5 * L * m.norm(x, lg) ** 2
        assert obj.value(y) <= bound + 1e-9


@pytest.mark.parametrize("make", [make_quadratic, make_sqdist_h2])
def test_gradient_domination(make):
    obj = make()
    m = obj.manifold
    mu = obj.metadata.mu
    f_star = obj.known_solution.f_star
    rng = np.random.default_rng(7)
    for _ in range(500):
        x, _ = _sample_inside(obj, rng)
        gap = obj.value(x) - f_star
        gn = m.norm(x, obj.gradient(x))
        assert gap <= gn**2 / (2.0 * mu) + 1e-9


# ---------------------------------------------------------------------------
# Hessian-Lipschitz estimation


def test_estimated_rho_bounds_third_order_defect():
    obj = make_sqdist_h2()
    rng = np.random.default_rng(8)
    rho = estimate_hessian_lipschitz(obj, rng, n_samples=150)
    obj.with_rho(rho)
    assert obj.metadata.rho == rho
    m = obj.manifold
    fresh = np.random.default_rng(9)
    for _ in range(300):
        x, s = _sample_inside(obj, fresh)
        ns = m.norm(x, s)
        if ns < 1e-6:
            continue
        basis = m.orthonormal_basis(x)
        sc = np.array([m.inner(x, s, b) for b in basis])
        model = obj.value(x) + m.inner(x, obj.gradient(x), s) + \
            0.5 * float(sc @ obj.hessian_matrix(x) @ sc)
        assert abs(obj.value(m.exp(x, s)) - model) <= rho / 6.0 * ns**3 + 1e-10


def test_estimated_rho_floor_for_quadratics():
    obj = make_quadratic()
    rho = estimate_hessian_lipschitz(obj, np.random.default_rng(10), n_samples=50)
    assert rho == pytest.approx(1e-6)


def test_reference_minimize_needs_L():
    obj = make_sqdist_h2()
    x = reference_minimize(obj, obj.domain.center)
    assert obj.manifold.distance(x, obj.target) < 1e-10
