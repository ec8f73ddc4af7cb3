"""Hyperbolic space in the hyperboloid model, Euclidean space, and their product.

Points and tangent vectors are plain 1-D float arrays in ambient coordinates.
For the hyperboloid, index 0 is the timelike coordinate and points live on the
unit sheet ``<x, x>_L = -1``; curvature ``-kappa`` enters only through the
metric, which is ``<u, w>_L / kappa`` on tangent vectors.  Distances therefore
scale as ``d_kappa = d_1 / sqrt(kappa)`` while the exponential map, logarithm
and parallel transport act on the same ambient vectors for every kappa.

A :class:`Product` of a hyperboloid and a Euclidean factor stores the two
blocks concatenated: ``[x_0, ..., x_n, s_1, ..., s_k]``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import UsageError, ValidationError

SHEET_TOL = 1e-10
TANGENT_TOL = 1e-10
CLAMP_TOL = 1e-8
SERIES_CUTOFF = 1e-6


def minkowski_inner(a, b):
    """Lorentzian inner product ``-a0*b0 + sum_{i>=1} ai*bi``."""
    if type(a) is not np.ndarray or a.dtype != np.float64:
        a = np.asarray(a, dtype=float)
    if type(b) is not np.ndarray or b.dtype != np.float64:
        b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise UsageError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(a[1:] @ b[1:]) - float(a[0]) * float(b[0])


def _sinhc(r):
    # sinh(r)/r with the removable singularity filled in
    if r < SERIES_CUTOFF:
        return 1.0 + r * r / 6.0
    return math.sinh(r) / r


def _chord(x, y):
    """Unnormalized ``log_x y`` direction and its Lorentz norm ``sinh d``.

    Far apart, ``y + <x, y> x`` avoids forming ``<y, y>``; nearby, the
    difference form avoids cancellation in ``y - x``.
    """
    c = -minkowski_inner(x, y)
    if c > 2.0:
        return y - c * x, math.sqrt((c - 1.0) * (c + 1.0)), c
    delta = y - x
    w = delta + minkowski_inner(x, delta) * x
    return w, math.sqrt(max(minkowski_inner(w, w), 0.0)), c


def _asinhc(r):
    # asinh(r)/r
    if r < SERIES_CUTOFF:
        return 1.0 - r * r / 6.0
    return math.asinh(r) / r


class Hyperboloid:
    """Hyperbolic n-space of curvature ``-kappa`` on the unit hyperboloid sheet."""

    def __init__(self, dim, kappa=1.0):
        if int(dim) != dim or dim < 1:
            raise UsageError(f"dimension must be a positive integer, got {dim}")
        if not (kappa > 0 and math.isfinite(kappa)):
            raise UsageError(f"kappa must be positive and finite, got {kappa}")
        self.dim = int(dim)
        self.kappa = float(kappa)
        self.ambient_dim = self.dim + 1
        # tangent inner products are sum(metric_diag * u * w)
        self.metric_diag = np.concatenate(([-1.0], np.ones(self.dim))) / self.kappa

    def __repr__(self):
        return f"Hyperboloid(dim={self.dim}, kappa={self.kappa:g})"

    def __eq__(self, other):
        return isinstance(other, Hyperboloid) and (self.dim, self.kappa) == (other.dim, other.kappa)

    def __hash__(self):
        return hash(("H", self.dim, self.kappa))

    # -- validation ----------------------------------------------------

    def origin(self):
        """The apex ``(1, 0, ..., 0)``."""
        x = np.zeros(self.ambient_dim)
        x[0] = 1.0
        return x

    def _shape_check(self, a, what="point"):
        a = np.asarray(a, dtype=float)
        if a.shape != (self.ambient_dim,):
            raise UsageError(f"{what} must have {self.ambient_dim} coordinates, got shape {a.shape}")
        # a finite sum implies finite entries; only fall back on overflow
        if not math.isfinite(float(a.sum())) and not np.all(np.isfinite(a)):
            raise ValidationError(f"{what} has non-finite entries")
        return a

    def check_point(self, x):
        x = self._shape_check(x)
        scale = max(1.0, float(x @ x))
        if abs(minkowski_inner(x, x) + 1.0) > SHEET_TOL * scale or x[0] < 1.0 - SHEET_TOL:
            raise ValidationError(f"point {x} is not on the upper hyperboloid sheet")
        return x

    def check_tangent(self, x, u):
        u = self._shape_check(u, "tangent vector")
        scale = max(1.0, math.sqrt(float(x @ x) * float(u @ u)))
        if abs(minkowski_inner(x, u)) > TANGENT_TOL * scale:
            raise ValidationError("vector is not tangent at the base point")
        return u

    def project_point(self, x):
        """Recompute the timelike coordinate so that ``x`` lies on the sheet."""
        x = np.array(x, dtype=float)
        x[0] = math.sqrt(1.0 + float(x[1:] @ x[1:]))
        return x

    def from_spatial(self, xbar):
        """Lift spatial coordinates onto the sheet."""
        xbar = np.asarray(xbar, dtype=float)
        return np.concatenate(([math.sqrt(1.0 + float(xbar @ xbar))], xbar))

    def project_tangent(self, x, u):
        """Minkowski-orthogonal projection of an ambient vector onto ``T_x``."""
        return np.asarray(u, dtype=float) + minkowski_inner(x, u) * np.asarray(x, dtype=float)

    # -- metric ----------------------------------------------------------

    def inner(self, x, u, w):
        return minkowski_inner(u, w) / self.kappa

    def norm(self, x, u):
        return math.sqrt(max(minkowski_inner(u, u), 0.0) / self.kappa)

    def distance(self, x, y):
        """Geodesic distance ``arccosh(-<x, y>_L) / sqrt(kappa)``."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        c = -minkowski_inner(x, y)
        if c < 1.0 - CLAMP_TOL * max(1.0, abs(c)):
            raise ValidationError(f"-<x, y>_L = {c!r} < 1: points are off the sheet")
        if c > 2.0:
            d = math.acosh(c)
        else:
            d = math.asinh(_chord(x, y)[1])
        return d / math.sqrt(self.kappa)

    # -- exponential map and friends -------------------------------------

    def exp(self, x, u, check=True):
        if check:
            x = self.check_point(x)
            u = self.check_tangent(x, u)
        r = math.sqrt(max(minkowski_inner(u, u), 0.0))
        if r == 0.0:
            return x.copy()
        y = math.cosh(r) * x + _sinhc(r) * u
        return self.project_point(y)

    def log(self, x, y):
        return self.log_distance(x, y)[0]

    def log_distance(self, x, y):
        """``(log_x y, d)`` with ``d`` the unit-curvature distance, sharing one chord."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        self._shape_check(x)
        self._shape_check(y)
        w, n, c = _chord(x, y)
        if c < 1.0 - CLAMP_TOL * max(1.0, abs(c)):
            raise ValidationError(f"-<x, y>_L = {c!r} < 1: points are off the sheet")
        if n == 0.0:
            return np.zeros(self.ambient_dim), 0.0
        d = math.acosh(c) if c > 2.0 else math.asinh(n)
        return ((d / n) * w if n >= SERIES_CUTOFF else _asinhc(n) * w), d

    def transport(self, x, y, u):
        """Parallel transport of ``u`` from ``T_x`` to ``T_y`` along the geodesic."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        u = np.asarray(u, dtype=float)
        c = -minkowski_inner(x, y)
        out = u + (minkowski_inner(y, u) / (1.0 + c)) * (x + y)
        return self.project_tangent(y, out)

    def curvature(self, x, u, v, w):
        """``R(u, v)w = -kappa (<v, w> u - <u, w> v)`` in the local metric."""
        return -self.kappa * (self.inner(x, v, w) * np.asarray(u, float) - self.inner(x, u, w) * np.asarray(v, float))

    def tangent_basis(self, x):
        """Orthonormal basis of ``T_x`` (rows), local metric.

        The canonical basis ``e_1..e_n`` at the apex is parallel transported
        to ``x``: ``b_i = e_i + x_i (x + e_0) / (1 + x_0)``.
        """
        x = np.asarray(x, dtype=float)
        n = self.dim
        basis = np.zeros((n, n + 1))
        basis[:, 1:] = np.eye(n)
        w = x.copy()
        w[0] += 1.0
        basis += np.outer(x[1:] / (1.0 + x[0]), w)
        return basis * math.sqrt(self.kappa)


class Euclidean:
    """Flat ``R^k``; the exponential map is vector addition."""

    def __init__(self, dim):
        if int(dim) != dim or dim < 1:
            raise UsageError(f"dimension must be a positive integer, got {dim}")
        self.dim = int(dim)
        self.ambient_dim = self.dim
        self.kappa = 0.0
        self.metric_diag = np.ones(self.dim)

    def __repr__(self):
        return f"Euclidean(dim={self.dim})"

    def __eq__(self, other):
        return isinstance(other, Euclidean) and self.dim == other.dim

    def __hash__(self):
        return hash(("E", self.dim))

    def origin(self):
        return np.zeros(self.dim)

    def _shape_check(self, a, what="point"):
        a = np.asarray(a, dtype=float)
        if a.shape != (self.dim,):
            raise UsageError(f"{what} must have {self.dim} coordinates, got shape {a.shape}")
        # a finite sum implies finite entries; only fall back on overflow
        if not math.isfinite(float(a.sum())) and not np.all(np.isfinite(a)):
            raise ValidationError(f"{what} has non-finite entries")
        return a

    def check_point(self, x):
        return self._shape_check(x)

    def check_tangent(self, x, u):
        return self._shape_check(u, "tangent vector")

    def project_point(self, x):
        return np.array(x, dtype=float)

    def project_tangent(self, x, u):
        return np.array(u, dtype=float)

    def inner(self, x, u, w):
        return float(np.dot(u, w))

    def norm(self, x, u):
        return float(np.linalg.norm(u))

    def distance(self, x, y):
        return float(np.linalg.norm(np.asarray(y, float) - np.asarray(x, float)))

    def exp(self, x, u, check=True):
        if not check:
            return x + u
        return self.check_point(x) + self.check_tangent(x, u)

    def log(self, x, y):
        return np.asarray(y, float) - np.asarray(x, float)

    def transport(self, x, y, u):
        return np.array(u, dtype=float)

    def curvature(self, x, u, v, w):
        return np.zeros(self.dim)

    def tangent_basis(self, x):
        return np.eye(self.dim)


class Product:
    """Riemannian product ``H^n x R^k``; every operation acts blockwise."""

    def __init__(self, hyperbolic, euclidean):
        if isinstance(euclidean, int):
            euclidean = Euclidean(euclidean)
        self.h = hyperbolic
        self.e = euclidean
        self.dim = self.h.dim + self.e.dim
        self.ambient_dim = self.h.ambient_dim + self.e.ambient_dim
        self.kappa = self.h.kappa
        self._cut = self.h.ambient_dim
        self.metric_diag = np.concatenate((self.h.metric_diag, self.e.metric_diag))

    def __repr__(self):
        return f"Product({self.h!r}, {self.e!r})"

    def __eq__(self, other):
        return isinstance(other, Product) and (self.h, self.e) == (other.h, other.e)

    def __hash__(self):
        return hash(("P", self.h, self.e))

    def split(self, a):
        a = np.asarray(a, dtype=float)
        if a.shape != (self.ambient_dim,):
            raise UsageError(f"expected {self.ambient_dim} coordinates, got shape {a.shape}")
        return a[: self._cut], a[self._cut:]

    def join(self, a, b):
        return np.concatenate((a, b))

    def origin(self):
        return self.join(self.h.origin(), self.e.origin())

    def check_point(self, x):
        xh, xe = self.split(x)
        return self.join(self.h.check_point(xh), self.e.check_point(xe))

    def check_tangent(self, x, u):
        xh, xe = self.split(x)
        uh, ue = self.split(u)
        return self.join(self.h.check_tangent(xh, uh), self.e.check_tangent(xe, ue))

    def project_point(self, x):
        xh, xe = self.split(x)
        return self.join(self.h.project_point(xh), xe)

    def project_tangent(self, x, u):
        xh, _ = self.split(x)
        uh, ue = self.split(u)
        return self.join(self.h.project_tangent(xh, uh), ue)

    def inner(self, x, u, w):
        xh, xe = self.split(x)
        uh, ue = self.split(u)
        wh, we = self.split(w)
        return self.h.inner(xh, uh, wh) + self.e.inner(xe, ue, we)

    def norm(self, x, u):
        return math.sqrt(max(self.inner(x, u, u), 0.0))

    def distance(self, x, y):
        xh, xe = self.split(x)
        yh, ye = self.split(y)
        return math.hypot(self.h.distance(xh, yh), self.e.distance(xe, ye))

    def exp(self, x, u, check=True):
        xh, xe = self.split(x)
        uh, ue = self.split(u)
        return self.join(self.h.exp(xh, uh, check), self.e.exp(xe, ue, check))

    def log(self, x, y):
        xh, xe = self.split(x)
        yh, ye = self.split(y)
        return self.join(self.h.log(xh, yh), self.e.log(xe, ye))

    def transport(self, x, y, u):
        xh, xe = self.split(x)
        yh, ye = self.split(y)
        uh, ue = self.split(u)
        return self.join(self.h.transport(xh, yh, uh), self.e.transport(xe, ye, ue))

    def curvature(self, x, u, v, w):
        xh, xe = self.split(x)
        parts = [self.split(a) for a in (u, v, w)]
        rh = self.h.curvature(xh, *(p[0] for p in parts))
        re = self.e.curvature(xe, *(p[1] for p in parts))
        return self.join(rh, re)

    def tangent_basis(self, x):
        xh, xe = self.split(x)
        bh = self.h.tangent_basis(xh)
        be = self.e.tangent_basis(xe)
        out = np.zeros((self.dim, self.ambient_dim))
        out[: self.h.dim, : self._cut] = bh
        out[self.h.dim:, self._cut:] = be
        return out


def coords(manifold, x, u, basis=None):
    """Coordinates of tangent ``u`` in the orthonormal ``tangent_basis(x)``."""
    if basis is None:
        basis = manifold.tangent_basis(x)
    return (basis * manifold.metric_diag) @ np.asarray(u, dtype=float)


def from_coords(manifold, x, c, basis=None):
    """Tangent vector with coordinates ``c`` in ``tangent_basis(x)``."""
    if basis is None:
        basis = manifold.tangent_basis(x)
    return np.asarray(c, dtype=float) @ basis


def geodesic(manifold, x, u, t):
    """Point ``exp_x(t u)``."""
    return manifold.exp(x, t * np.asarray(u, dtype=float))
