import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypersc.errors import DegeneracyError, DomainError, UsageError
from hypersc.fields import (
    AffineField, Covector, LiftedField, LogBarrierField, QuadraticField, SquaredDistanceField, WeightedSumField,
    curvature_defect, dual_norm, jacobi_boundary, lcoth, local_norm, phi,
)
from hypersc.manifolds import Euclidean, Hyperboloid, Product, coords, from_coords
from hypersc.oracles import derivative_check, fd_mixed, fd_oracle, fd_oracle_all, jacobi_ode_boundary

from conftest import point_at, random_point, random_tangent, unit_tangent

C1, S1 = math.cosh(1.0), math.sinh(1.0)
COTH1 = 1.3130352854993313  # mpmath, 50 digits
PHI1 = 0.58897362453302119  # coth 1 + 1 - coth^2 1, mpmath


def test_reference_constants_with_mpmath():
    mpmath.mp.dps = 50
    assert float(mpmath.coth(1)) == COTH1
    assert float(mpmath.coth(1) + 1 - mpmath.coth(1) ** 2) == pytest.approx(PHI1, rel=1e-16)


@pytest.mark.parametrize("l", [0.0, 1e-8, 1e-4, 9.99e-4, 1e-3, 0.5, 1.0, 7.0, 19.9, 20.1, 50.0, 400.0])
def test_lcoth_phi_against_mpmath(l):
    mpmath.mp.dps = 50
    if l == 0.0:
        assert lcoth(l) == 1.0 and phi(l) == 0.0
        return
    L = mpmath.mpf(l)
    ref_c = L * mpmath.coth(L)
    ref_p = mpmath.coth(L) - L / mpmath.sinh(L) ** 2
    assert lcoth(l) == pytest.approx(float(ref_c), rel=1e-14)
    assert phi(l) == pytest.approx(float(ref_p), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("l", [0.1, 1.0, 10.0])
def test_phi_range(l):
    assert 0.0 <= phi(l) <= min(1.0, l)


def _radial_setup(l=1.0, kappa=1.0, dim=2):
    H = Hyperboloid(dim, kappa)
    p = H.origin()
    e = np.zeros(dim + 1)
    e[1] = l * math.sqrt(kappa)
    x = H.exp(p, e)
    f = SquaredDistanceField(H, p)
    gdot = -H.log(x, p) / H.distance(x, p)  # unit radial direction at x
    perp = np.zeros(dim + 1)
    perp[2] = math.sqrt(kappa)  # unit, orthogonal to the radial plane
    return H, f, x, gdot, perp


def test_sqdist_examples():
    H, f, x, gdot, perp = _radial_setup(1.0)
    np.testing.assert_allclose(x, [C1, S1, 0.0], atol=1e-15)
    # differential: Df(u) = <gdot, u>, |riesz| = l = 1
    d = f.differential(x)
    assert H.norm(x, d.riesz) == pytest.approx(1.0, rel=1e-14)
    assert d(H, gdot) == pytest.approx(1.0, rel=1e-14)
    assert fd_oracle(f, x, gdot, 1) == pytest.approx(1.0, rel=1e-10)
    # Hessian: 1 radially, coth 1 across
    B = H.tangent_basis(x)
    j = f.jet(x, B)
    g, q = coords(H, x, gdot, B), coords(H, x, perp, B)
    assert g @ j.hess @ g == pytest.approx(1.0, rel=1e-14)
    assert q @ j.hess @ q == pytest.approx(COTH1, rel=1e-14)
    assert fd_oracle(f, x, perp, 2) == pytest.approx(COTH1, rel=1e-9)
    # third derivative: 0 radially, Phi(1) for v radial and u across
    assert g @ j.hessian_derivative(g) @ g == pytest.approx(0.0, abs=1e-15)
    assert q @ j.hessian_derivative(g) @ q == pytest.approx(PHI1, rel=1e-13)
    assert fd_mixed(f, x, perp, gdot) == pytest.approx(PHI1, rel=1e-9)
    # minimizer
    z = f.jet(H.origin())
    assert np.array_equal(z.grad, np.zeros(2))


def test_sqdist_radial_second_derivative_is_one(space, rng):
    x = random_point(space, rng)
    p = point_at(space, x, 1.3 / math.sqrt(space.kappa), rng)
    f = SquaredDistanceField(space, p)
    u = -space.log(x, p) / space.distance(x, p)
    assert fd_oracle(f, x, u, 2) == pytest.approx(1.0, rel=1e-9)


def test_sqdist_strongly_convex(space, rng):
    for _ in range(50):
        x = random_point(space, rng)
        f = SquaredDistanceField(space, point_at(space, x, rng.uniform(0.01, 8.0), rng))
        u = random_tangent(space, x, rng)
        assert local_norm(f, x, u) ** 2 >= space.norm(x, u) ** 2 * (1 - 1e-12)


def test_sqdist_matches_fd(space, rng):
    for _ in range(40):
        x = random_point(space, rng)
        f = SquaredDistanceField(space, point_at(space, x, math.exp(rng.uniform(-4, 3)) / math.sqrt(space.kappa), rng))
        u, v = unit_tangent(space, x, rng), unit_tangent(space, x, rng)
        B = space.tangent_basis(x)
        j = f.jet(x, B)
        uc, vc = coords(space, x, u, B), coords(space, x, v, B)
        ref = (j.grad @ uc, uc @ j.hess @ uc, uc @ j.hessian_derivative(uc) @ uc)
        for r, e in zip(ref, fd_oracle_all(f, x, u)):
            assert abs(r - e) <= 1e-7 * max(1.0, abs(r))
        m = uc @ j.hessian_derivative(vc) @ uc
        assert abs(fd_mixed(f, x, u, v) - m) <= 1e-8 * max(1.0, abs(m))


def test_logbarrier_trivial_and_bounds(rng):
    H = Hyperboloid(2)
    P = Product(H, 1)
    zero = AffineField(P, [0.0])
    F = LogBarrierField(zero, 1.0)
    x = P.join(random_point(H, rng), np.array([0.2]))
    j = F.jet(x)
    assert j.value == 0.0 and not j.grad.any() and not j.hess.any() and not j.dhess.any()
    G = LogBarrierField(SquaredDistanceField(H, H.origin()), 8.0)
    for _ in range(50):
        y = random_point(H, rng, 3.5)
        jy = G.jet(y)
        u = rng.normal(size=2)
        assert (jy.grad @ u) ** 2 <= (u @ jy.hess @ u) * (1 + 1e-12)


def test_logbarrier_matches_fd(rng):
    H = Hyperboloid(2)
    R = 3.0
    F = LogBarrierField(SquaredDistanceField(H, H.origin()), R * R / 2)
    for _ in range(40):
        x = random_point(H, rng, R * rng.uniform(0.05, 0.98))
        B = H.tangent_basis(x)
        j = F.jet(x, B)
        u, v = unit_tangent(H, x, rng), unit_tangent(H, x, rng)
        uc, vc = coords(H, x, u, B), coords(H, x, v, B)
        # steps measured in the local norm keep the stencil inside the domain
        su, sv = 4.0 * math.sqrt(uc @ j.hess @ uc), 4.0 * math.sqrt(vc @ j.hess @ vc)
        ref = (j.grad @ uc, uc @ j.hess @ uc, uc @ j.hessian_derivative(uc) @ uc)
        for k, r in enumerate(ref, start=1):
            e = fd_oracle(F, x, u, k, scale=su)
            assert abs(e - r) <= 1e-6 * max(1.0, abs(r))
        m = uc @ j.hessian_derivative(vc) @ uc
        assert abs(fd_mixed(F, x, u, v, scale=sv) - m) <= 1e-6 * max(1.0, abs(m))


def test_logbarrier_domain():
    H = Hyperboloid(2)
    F = LogBarrierField(SquaredDistanceField(H, H.origin()), 0.5)
    far = H.exp(H.origin(), np.array([0.0, 2.0, 0.0]))
    assert not F.domain_contains(far)
    with pytest.raises(DomainError):
        F.value(far)


def test_weighted_sum(rng):
    H = Hyperboloid(3)
    x = random_point(H, rng)
    f = SquaredDistanceField(H, random_point(H, rng))
    g = SquaredDistanceField(H, random_point(H, rng))
    B = H.tangent_basis(x)
    single = WeightedSumField([(1.0, f)]).jet(x, B)
    ref = f.jet(x, B)
    for a, b in zip((single.value, single.grad, single.hess, single.dhess), (ref.value, ref.grad, ref.hess, ref.dhess)):
        np.testing.assert_array_equal(a, b)
    s = WeightedSumField([(0.3, f), (2.0, g)])
    u = unit_tangent(H, x, rng)
    for k in (1, 2, 3):
        assert fd_oracle(s, x, u, k) == pytest.approx(0.3 * fd_oracle(f, x, u, k) + 2.0 * fd_oracle(g, x, u, k), rel=1e-8, abs=1e-10)
    with pytest.raises(UsageError):
        WeightedSumField([])
    with pytest.raises(UsageError):
        WeightedSumField([(1.0, f), (1.0, SquaredDistanceField(Hyperboloid(2), Hyperboloid(2).origin()))])


def test_t_times_affine_plus_barrier_has_barrier_hessian(rng):
    H = Hyperboloid(2)
    P = Product(H, 1)
    ell = AffineField(P, [1.0])
    F = LogBarrierField(WeightedSumField([(2.0, LiftedField(P, SquaredDistanceField(H, H.origin()))), (-1.0, ell)]), 0.0)
    x = P.join(random_point(H, rng, 0.5), np.array([3.0]))
    B = P.tangent_basis(x)
    ht = WeightedSumField([(7.3, ell), (1.0, F)]).jet(x, B).hess
    np.testing.assert_array_equal(ht, F.jet(x, B).hess)


def test_quadratic_field_third_derivative_vanishes(rng):
    E = Euclidean(3)
    A = rng.normal(size=(3, 3))
    q = QuadraticField(E, A @ A.T + np.eye(3), rng.normal(size=3))
    x, u = rng.normal(size=3), rng.normal(size=3)
    assert abs(fd_oracle(q, x, u, 3)) < 1e-8
    assert not q.jet(x).dhess.any()
    assert fd_oracle(q, x, u, 2) == pytest.approx(u @ q.A @ u, rel=1e-9)


def test_curvature_defect(space, rng):
    x = random_point(space, rng)
    f = SquaredDistanceField(space, point_at(space, x, 1.7, rng))
    u, v, w = (unit_tangent(space, x, rng) for _ in range(3))
    assert curvature_defect(f, x, u, u, w) == 0.0
    for _ in range(30):
        y = random_point(space, rng)
        g = SquaredDistanceField(space, point_at(space, y, rng.uniform(0.01, 10.0), rng))
        u, v, w = (unit_tangent(space, y, rng) for _ in range(3))
        assert abs(curvature_defect(g, y, u, v, w)) <= 1e-9


def test_curvature_defect_euclidean(rng):
    E = Euclidean(3)
    q = QuadraticField(E, np.diag([1.0, 2.0, 3.0]))
    x = rng.normal(size=3)
    assert curvature_defect(q, x, *(rng.normal(size=3) for _ in range(3))) == 0.0


def test_jacobi_boundary(rng):
    H, f, x, gdot, perp = _radial_setup(1.0)
    p = H.origin()
    l = 1.0
    assert H.inner(x, jacobi_boundary(H, p, x, gdot), gdot) * l == pytest.approx(1.0, rel=1e-14)
    assert H.inner(x, jacobi_boundary(H, p, x, perp), perp) * l == pytest.approx(COTH1, rel=1e-14)
    for kappa in (1.0, 4.0):
        K = Hyperboloid(3, kappa)
        for _ in range(5):
            y = random_point(K, rng)
            q = point_at(K, y, rng.uniform(0.1, 6.0), rng)
            u = random_tangent(K, y, rng)
            np.testing.assert_allclose(jacobi_ode_boundary(K, q, y, u), jacobi_boundary(K, q, y, u), atol=1e-8)
            # Hf(u, u) = l <nabla X(l), u>
            Hu = local_norm(SquaredDistanceField(K, q), y, u) ** 2
            assert K.distance(q, y) * K.inner(y, jacobi_boundary(K, q, y, u), u) == pytest.approx(Hu, rel=1e-12)


def test_norms(rng):
    H = Hyperboloid(2)
    x = random_point(H, rng)
    p = point_at(H, x, 2.5, rng)
    f = SquaredDistanceField(H, p)
    # dual norm of Df equals the distance
    assert dual_norm(f, x, f.differential(x)) == pytest.approx(2.5, rel=1e-12)
    for _ in range(30):
        u = random_tangent(H, x, rng)
        c = Covector(x, random_tangent(H, x, rng))
        assert c(H, u) <= dual_norm(f, x, c) * local_norm(f, x, u) * (1 + 1e-12)
    E = Euclidean(2)
    q = QuadraticField(E, np.eye(2))
    y, u = rng.normal(size=2), rng.normal(size=2)
    assert local_norm(q, y, u) == pytest.approx(np.linalg.norm(u), rel=1e-15)
    assert dual_norm(q, y, u) == pytest.approx(np.linalg.norm(u), rel=1e-15)
    with pytest.raises(DegeneracyError):
        dual_norm(QuadraticField(E, np.zeros((2, 2))), y, u)


def test_fd_oracle_zero_direction():
    H = Hyperboloid(2)
    f = SquaredDistanceField(H, H.origin())
    assert fd_oracle(f, H.origin(), np.zeros(3), 2) == 0.0
    with pytest.raises(UsageError):
        fd_oracle(f, H.origin(), np.array([0.0, 1.0, 0.0]), 4)


def test_derivative_check_small():
    worst = derivative_check(dim=3, kappa=4.0, samples=50, seed=1)
    assert set(worst) == {"Df", "Hf", "nabla_u Hf(u,u)", "nabla_v Hf(u,u)"}
    assert max(w["error"] for w in worst.values()) < 1e-6
    assert derivative_check(dim=3, kappa=4.0, samples=50, seed=1) == worst
    with pytest.raises(UsageError):
        derivative_check(dim=1)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.02, 15.0), st.floats(0.0, math.pi))
def test_hessian_eigenvalues(l, angle):
    H = Hyperboloid(2)
    x = H.origin()
    p = H.exp(x, np.array([0.0, l * math.cos(angle), l * math.sin(angle)]))
    ev = np.linalg.eigvalsh(SquaredDistanceField(H, p).jet(x).hess)
    np.testing.assert_allclose(ev, sorted([1.0, lcoth(l)]), rtol=1e-12)
