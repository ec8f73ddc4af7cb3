"""Scalar fields with exact first, second and third covariant derivatives.

Every field computes a :class:`Jet` at a point: its value, and the
differential, Hessian and covariant derivative of the Hessian expressed in the
orthonormal frame ``manifold.tangent_basis(x)``.  In that frame

* ``grad[i] = Df(b_i)``
* ``hess[i, j] = Hf(b_i, b_j)``
* ``dhess[k, i, j] = (nabla_{b_k} Hf)(b_i, b_j)``

so every derivative query reduces to small dense linear algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DegeneracyError, DomainError, UsageError
from .manifolds import Euclidean, Hyperboloid, Product, coords, from_coords

COTH_SERIES_CUTOFF = 1e-3


@dataclass(frozen=True)
class Jet:
    value: float
    grad: np.ndarray
    hess: np.ndarray
    dhess: np.ndarray

    def hessian_derivative(self, vc):
        """Matrix of ``(u, w) -> nabla_v Hf(u, w)`` for ``v`` with frame coordinates ``vc``."""
        return np.tensordot(vc, self.dhess, axes=1)


@dataclass(frozen=True)
class Covector:
    """A differential stored by its Riesz vector in the manifold metric."""

    base: np.ndarray
    riesz: np.ndarray

    def __call__(self, manifold, u):
        return manifold.inner(self.base, self.riesz, u)


def lcoth(l):
    """``l coth l`` with its removable singularity at 0."""
    if l < COTH_SERIES_CUTOFF:
        l2 = l * l
        return 1.0 + l2 / 3.0 - l2 * l2 / 45.0 + 2.0 * l2**3 / 945.0
    return l / math.tanh(l)


def phi(l):
    """Derivative of ``l coth l``; equals ``coth l + l - l coth^2 l``."""
    if l < COTH_SERIES_CUTOFF:
        l2 = l * l
        return 2.0 * l / 3.0 - 4.0 * l * l2 / 45.0 + 12.0 * l * l2 * l2 / 945.0
    if l < 1.0:
        # (sinh 2l - 2l) / (2 sinh^2 l); the numerator's series has positive terms only
        z2 = 4.0 * l * l
        term = total = 8.0 * l**3 / 6.0
        k = 1
        while term > 1e-17 * total:
            term *= z2 / ((2 * k + 2) * (2 * k + 3))
            total += term
            k += 1
        return total / (2.0 * math.sinh(l) ** 2)
    if l > 20.0:
        # l / sinh(l)^2 underflows gracefully; coth(l) -> 1
        return 1.0 / math.tanh(l) - 4.0 * l * math.exp(-2.0 * l)
    return 1.0 / math.tanh(l) - l / math.sinh(l) ** 2


class ScalarField:
    """Base class.  Subclasses implement :meth:`jet` and :meth:`value`."""

    manifold = None

    def jet(self, x, basis=None):
        raise NotImplementedError

    def value(self, x):
        return self.jet(x).value

    def domain_contains(self, x):
        return True

    def _basis(self, x, basis):
        return self.manifold.tangent_basis(x) if basis is None else basis

    def differential(self, x):
        basis = self.manifold.tangent_basis(x)
        j = self.jet(x, basis)
        return Covector(np.asarray(x, float), from_coords(self.manifold, x, j.grad, basis))

    def hessian(self, x):
        return self.jet(x).hess

    def hessian_derivative(self, x, v):
        basis = self.manifold.tangent_basis(x)
        j = self.jet(x, basis)
        return j.hessian_derivative(coords(self.manifold, x, v, basis))


class SquaredDistanceField(ScalarField):
    """``f(x) = d(p, x)^2 / 2`` on a hyperboloid."""

    def __init__(self, manifold, pole):
        if not isinstance(manifold, Hyperboloid):
            raise UsageError("SquaredDistanceField lives on a Hyperboloid; lift it for products")
        self.manifold = manifold
        self.pole = manifold.check_point(pole)

    def value(self, x):
        return 0.5 * self.manifold.distance(self.pole, x) ** 2

    def radial(self, x):
        """Distance ``l`` (unit-curvature units) and the unit radial direction at ``x``."""
        H = self.manifold
        w, l1 = H.log_distance(x, self.pole)
        if l1 == 0.0:
            return 0.0, np.zeros_like(w)
        return l1, -w / l1

    def jet(self, x, basis=None):
        H = self.manifold
        basis = self._basis(x, basis)
        n = H.dim
        sk = math.sqrt(H.kappa)
        l1, gdot = self.radial(x)
        value = 0.5 * l1 * l1 / H.kappa
        if l1 == 0.0:
            return Jet(value, np.zeros(n), np.eye(n), np.zeros((n, n, n)))
        # unit radial direction in frame coordinates (frame is sqrt(kappa) * Lorentz-orthonormal)
        g = coords(H, x, gdot, basis) * sk
        g /= np.linalg.norm(g)
        C = lcoth(l1)
        P = np.outer(g, g)
        hess = C * (np.eye(n) - P) + P
        ph = phi(l1)
        eye = np.eye(n)
        # dhess[k, i, j] = nabla_{e_k} Hf(e_i, e_j)
        gi = g[None, :, None] * eye[:, None, :]  # g_i delta_kj
        gj = eye[:, :, None] * g[None, None, :]  # delta_ki g_j
        dhess = ph * g[:, None, None] * (eye - P) + (l1 - ph) * (2.0 * g[:, None, None] * P - gi - gj)
        return Jet(value, (l1 / sk) * g, hess, sk * dhess)


class AffineField(ScalarField):
    """``c . s + b`` on the Euclidean block of a manifold (zero Hessian)."""

    def __init__(self, manifold, c, offset=0.0):
        self.manifold = manifold
        self.c = np.atleast_1d(np.asarray(c, dtype=float))
        self.offset = float(offset)
        edim = _euclid_dim(manifold)
        if self.c.shape != (edim,):
            raise UsageError(f"coefficient vector must have length {edim}")

    def value(self, x):
        return float(self.c @ _euclid_part(self.manifold, x)) + self.offset

    def jet(self, x, basis=None):
        n = self.manifold.dim
        grad = np.zeros(n)
        grad[n - self.c.size:] = self.c
        return Jet(self.value(x), grad, np.zeros((n, n)), np.zeros((n, n, n)))


class QuadraticField(ScalarField):
    """``s^T A s / 2 + b . s`` on a Euclidean manifold."""

    def __init__(self, manifold, A, b=None):
        if not isinstance(manifold, Euclidean):
            raise UsageError("QuadraticField lives on a Euclidean manifold")
        self.manifold = manifold
        A = np.asarray(A, dtype=float)
        self.A = 0.5 * (A + A.T)
        self.b = np.zeros(manifold.dim) if b is None else np.asarray(b, dtype=float)

    def value(self, x):
        x = np.asarray(x, float)
        return float(0.5 * x @ self.A @ x + self.b @ x)

    def jet(self, x, basis=None):
        x = np.asarray(x, float)
        n = self.manifold.dim
        return Jet(self.value(x), self.A @ x + self.b, self.A.copy(), np.zeros((n, n, n)))


class LiftedField(ScalarField):
    """A field on the hyperbolic factor viewed as a field on ``H^n x R^k``."""

    def __init__(self, product, field):
        if not isinstance(product, Product) or field.manifold != product.h:
            raise UsageError("LiftedField needs a Product whose hyperbolic factor matches the field")
        self.manifold = product
        self.inner_field = field

    def value(self, x):
        return self.inner_field.value(self.manifold.split(x)[0])

    def domain_contains(self, x):
        return self.inner_field.domain_contains(self.manifold.split(x)[0])

    def jet(self, x, basis=None):
        P = self.manifold
        basis = self._basis(x, basis)
        xh, _ = P.split(x)
        nh = P.h.dim
        j = self.inner_field.jet(xh, basis[:nh, : P.h.ambient_dim])
        n = P.dim
        grad = np.zeros(n)
        grad[:nh] = j.grad
        hess = np.zeros((n, n))
        hess[:nh, :nh] = j.hess
        dhess = np.zeros((n, n, n))
        dhess[:nh, :nh, :nh] = j.dhess
        return Jet(j.value, grad, hess, dhess)


class WeightedSumField(ScalarField):
    """``sum_i c_i f_i`` over a common manifold."""

    def __init__(self, terms):
        terms = [(float(c), f) for c, f in terms]
        if not terms:
            raise UsageError("WeightedSumField needs at least one term")
        self.manifold = terms[0][1].manifold
        if any(f.manifold != self.manifold for _, f in terms):
            raise UsageError("all terms must share one manifold")
        self.terms = terms

    def value(self, x):
        if not self.domain_contains(x):
            raise DomainError("point outside the domain of a summand")
        return sum(c * f.value(x) for c, f in self.terms)

    def domain_contains(self, x):
        return all(f.domain_contains(x) for _, f in self.terms)

    def jet(self, x, basis=None):
        basis = self._basis(x, basis)
        jets = [(c, f.jet(x, basis)) for c, f in self.terms]
        return Jet(
            sum(c * j.value for c, j in jets),
            sum(c * j.grad for c, j in jets),
            sum(c * j.hess for c, j in jets),
            sum(c * j.dhess for c, j in jets),
        )


class LogBarrierField(ScalarField):
    """``F(x) = -log(level - f(x))`` on ``{f < level}``."""

    def __init__(self, inner, level):
        self.inner_field = inner
        self.level = float(level)
        self.manifold = inner.manifold

    def slack(self, x):
        return self.level - self.inner_field.value(x)

    def domain_contains(self, x):
        return self.inner_field.domain_contains(x) and self.slack(x) > 0.0

    def value(self, x):
        w = self.slack(x)
        if not w > 0.0:
            raise DomainError(f"barrier evaluated outside its domain (slack {w!r})")
        return -math.log(w)

    def jet(self, x, basis=None):
        j = self.inner_field.jet(x, self._basis(x, basis))
        w = self.level - j.value
        if not w > 0.0:
            raise DomainError(f"barrier evaluated outside its domain (slack {w!r})")
        g, Hf = j.grad, j.hess
        gg = np.outer(g, g)
        hess = Hf / w + gg / w**2
        Hg = Hf  # columns Hf e_k
        dhess = (
            j.dhess / w
            + g[:, None, None] * Hf[None] / w**2
            + (g[None, :, None] * Hg.T[:, None, :] + Hg.T[:, :, None] * g[None, None, :]) / w**2
            + 2.0 * g[:, None, None] * gg[None] / w**3
        )
        return Jet(-math.log(w), g / w, hess, dhess)


def _euclid_dim(manifold):
    if isinstance(manifold, Euclidean):
        return manifold.dim
    if isinstance(manifold, Product):
        return manifold.e.dim
    raise UsageError("affine fields need a Euclidean factor")


def _euclid_part(manifold, x):
    if isinstance(manifold, Euclidean):
        return np.asarray(x, float)
    return manifold.split(x)[1]


def scaled(field, c):
    return WeightedSumField([(c, field)])


# -- norms and derived quantities ---------------------------------------------


def _cholesky(hess):
    try:
        return linalg.cho_factor(hess, lower=True, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise DegeneracyError("Hessian is not positive definite") from exc


def local_norm(field, x, u):
    """``sqrt(Hf(u, u))``."""
    M = field.manifold
    basis = M.tangent_basis(x)
    j = field.jet(x, basis)
    uc = coords(M, x, u, basis)
    q = float(uc @ j.hess @ uc)
    if q < 0.0:
        raise DegeneracyError("Hessian is not positive semidefinite")
    return math.sqrt(q)


def dual_norm(field, x, p):
    """``sqrt(p^T Hf^{-1} p)`` for a covector ``p`` (a :class:`Covector` or frame coordinates)."""
    M = field.manifold
    basis = M.tangent_basis(x)
    j = field.jet(x, basis)
    pc = coords(M, x, p.riesz, basis) if isinstance(p, Covector) else np.asarray(p, float)
    return dual_norm_coords(j.hess, pc)


def dual_norm_coords(hess, pc):
    c = _cholesky(hess)
    return math.sqrt(max(float(pc @ linalg.cho_solve(c, pc)), 0.0))


def curvature_defect(field, x, u, v, w):
    """``nabla_u Hf(v, w) - nabla_v Hf(u, w) + Df(R(u, v) w)``; vanishes identically."""
    M = field.manifold
    basis = M.tangent_basis(x)
    j = field.jet(x, basis)
    uc, vc, wc = (coords(M, x, a, basis) for a in (u, v, w))
    r = coords(M, x, M.curvature(x, u, v, w), basis)
    return float(vc @ j.hessian_derivative(uc) @ wc - uc @ j.hessian_derivative(vc) @ wc + j.grad @ r)


def jacobi_boundary(manifold, p, x, u):
    """``nabla_{gamma'(l)} X(l)`` for the Jacobi field with ``X(0) = 0``, ``X(l) = u``.

    ``gamma`` is the unit-speed geodesic from ``p`` to ``x``.  Then
    ``Hf_p(u, u) = l <nabla X(l), u>`` for ``f_p = d(p, .)^2 / 2``.
    """
    l = manifold.distance(p, x)
    if l == 0.0:
        raise UsageError("jacobi_boundary needs p != x")
    gdot = -manifold.log(x, p) / l
    a = manifold.inner(x, u, gdot)
    sk = math.sqrt(manifold.kappa)
    radial = gdot * a
    return radial / l + (lcoth(sk * l) / l) * (np.asarray(u, float) - radial)
