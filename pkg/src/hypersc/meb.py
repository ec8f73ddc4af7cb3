"""Minimum enclosing ball in hyperbolic space by path-following.

With ``R = 2 max d(p_i, p_j)`` and ``K = sqrt(2^{-1/2} (R + 1)^2 + 9/4)`` the
problem ``min s  s.t.  d(p_i, x)^2 <= s <= R^2`` on ``H^n x R`` has the barrier

    F(x, s) = -sum_i K^2 log(s - d(p_i, x)^2) - log(R^2 - s),

a self-concordant barrier with parameter ``nu = m K^2 + 1``.  Everything is
solved at unit curvature and rescaled: distances at curvature ``-kappa`` are
unit-curvature distances divided by ``sqrt(kappa)``.

``oracle_solve`` is an independent farthest-point iteration used to validate
the interior-point answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numba
import numpy as np

from .errors import UsageError, ValidationError
from .fields import AffineField, LiftedField, LogBarrierField, SquaredDistanceField, WeightedSumField
from .manifolds import Hyperboloid, Product, from_coords
from .pathfollow import BarrierProblem, PathParams, solve as path_solve

COINCIDENT_TOL = 1e-12


@dataclass(frozen=True)
class MebInstance:
    """Points on the hyperboloid sheet (rows, ambient coordinates) at curvature ``-kappa``."""

    points: np.ndarray
    kappa: float = 1.0
    epsilon: float = 1e-5

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        object.__setattr__(self, "points", pts)
        if pts.shape[0] < 1 or pts.shape[1] < 2:
            raise UsageError("need at least one point of dimension >= 1")
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise UsageError("kappa must be positive and finite")
        if not self.epsilon > 0:
            raise UsageError("epsilon must be positive")
        H = self.unit_space
        for i, p in enumerate(pts):
            try:
                H.check_point(p)
            except ValidationError as exc:
                raise ValidationError(f"point {i}: {exc}") from exc
        for i in range(len(pts)):
            for j in range(i):
                if H.distance(pts[i], pts[j]) <= COINCIDENT_TOL:
                    raise UsageError(f"points {j} and {i} coincide")

    @property
    def dim(self):
        return self.points.shape[1] - 1

    @property
    def unit_space(self):
        return Hyperboloid(self.dim, 1.0)

    def pairwise(self):
        """Unit-curvature pairwise distances ``d(p_i, p_j)`` for ``i < j``."""
        H = self.unit_space
        m = len(self.points)
        return np.array([H.distance(self.points[i], self.points[j]) for i in range(m) for j in range(i + 1, m)])


@dataclass(frozen=True)
class MebSolution:
    center: np.ndarray
    radius: float
    s: float
    gap_certificate: float
    radius_error_bound: float
    iterations: dict
    method: str = "path-following"
    target_gap: float = math.nan
    trace: object = dc_field(default=None, compare=False, repr=False)


def barrier_constants(R):
    """``(K, K^2)`` for enclosing radius bound ``R`` (unit curvature)."""
    K2 = 2.0**-0.5 * (R + 1.0) ** 2 + 2.25
    return math.sqrt(K2), K2


def build_problem(instance):
    """Barrier formulation at unit curvature; returns ``(problem, R)``."""
    pts = instance.points
    m = len(pts)
    if m < 2:
        raise UsageError("the barrier formulation needs m >= 2 points")
    H = instance.unit_space
    P = Product(H, 1)
    R = 2.0 * float(instance.pairwise().max())
    _, K2 = barrier_constants(R)
    s_field = AffineField(P, [1.0])
    terms = []
    for p in pts:
        # d(p, x)^2 - s <= 0
        g = WeightedSumField([(2.0, LiftedField(P, SquaredDistanceField(H, p))), (-1.0, s_field)])
        terms.append((K2, LogBarrierField(g, 0.0)))
    terms.append((1.0, LogBarrierField(s_field, R * R)))
    F = WeightedSumField(terms)
    nu = m * K2 + 1.0
    # F >= -(m K^2 + 1) log(R^2) on the domain, since every slack is below R^2
    problem = BarrierProblem(objective=s_field, barrier=F, nu=nu, sc_sigma=1.0, gap_range=R * R,
                             barrier_lower_bound=-nu * math.log(R * R))
    return problem, R


def accuracy_target(epsilon, dmin, dmax):
    """Objective gap that guarantees ``sqrt(s) - r* <= epsilon`` (unit curvature).

    ``sqrt(s) - r* <= (s - s*) / (sqrt(s) + r*)`` and ``sqrt(s) + r* >= dmax``.
    The min-distance form ``epsilon / dmin`` and the cap ``epsilon^2`` are
    kept as well; the smallest of the three is used.
    """
    return min(epsilon / dmin, epsilon * epsilon, epsilon * dmax)


def solve(instance, params=PathParams()):
    """Path-following MEB; radius and certificate are reported at the instance's curvature."""
    H = instance.unit_space
    pts = instance.points
    sk = math.sqrt(instance.kappa)
    eps1 = instance.epsilon * sk
    if len(pts) == 1:
        return MebSolution(pts[0].copy(), 0.0, 0.0, 0.0, 0.0, {"centering": 0, "path": 0}, target_gap=0.0)
    problem, R = build_problem(instance)
    d = instance.pairwise()
    x0 = np.concatenate((pts[0], [R * R / 2.0]))
    target = accuracy_target(eps1, float(d.min()), float(d.max()))
    if eps1 >= R:
        # sqrt(s) - r* < R already meets the accuracy; centring alone suffices
        target = max(target, problem.gap_range)
    state, trace = path_solve(problem, x0, target, params)
    xh, s_arr = problem.manifold.split(state.x)
    s = float(s_arr[0])
    gap = float(state.gap_bound)
    r_err = min(gap / (math.sqrt(s) + float(d.max()) / 2.0), math.sqrt(s))
    return MebSolution(
        center=H.project_point(xh),
        radius=math.sqrt(s) / sk,
        s=s / instance.kappa,
        gap_certificate=gap / instance.kappa,
        radius_error_bound=r_err / sk,
        iterations={"centering": trace.centering_iterations, "path": trace.path_iterations},
        target_gap=target / instance.kappa,
        trace=trace,
    )


# -- farthest-point oracle -------------------------------------------------------


@numba.njit(cache=True)
def _lorentz(a, b):
    acc = -a[0] * b[0]
    for i in range(1, a.shape[0]):
        acc += a[i] * b[i]
    return acc


@numba.njit(cache=True)
def _dist(a, b):
    c = -_lorentz(a, b)
    if c < 1.0:
        c = 1.0
    return math.acosh(c)


@numba.njit(cache=True)
def _farthest_point_iterations(pts, x0, iterations):
    x = x0.copy()
    m, n1 = pts.shape
    for k in range(iterations):
        far, dfar = 0, -1.0
        for i in range(m):
            d = _dist(x, pts[i])
            if d > dfar:
                far, dfar = i, d
        if dfar <= 0.0:
            break
        # move a fraction 1/(k+2) of the way along the geodesic to the farthest point
        t = 1.0 / (k + 2.0)
        sd = math.sinh(dfar)
        a = math.sinh((1.0 - t) * dfar) / sd
        b = math.sinh(t * dfar) / sd
        for j in range(n1):
            x[j] = a * x[j] + b * pts[far, j]
        sq = 0.0
        for j in range(1, n1):
            sq += x[j] * x[j]
        x[0] = math.sqrt(1.0 + sq)
    r = 0.0
    for i in range(m):
        d = _dist(x, pts[i])
        if d > r:
            r = d
    return x, r


def oracle_solve(instance, iterations=1_000_000):
    """Farthest-point geodesic iteration started at ``p_1``; deterministic."""
    pts = np.ascontiguousarray(instance.points, dtype=float)
    sk = math.sqrt(instance.kappa)
    if len(pts) == 1:
        return MebSolution(pts[0].copy(), 0.0, 0.0, 0.0, 0.0, {"oracle": 0}, method="oracle")
    x, r = _farthest_point_iterations(pts, pts[0].copy(), int(iterations))
    r_k = r / sk
    return MebSolution(x, r_k, r_k * r_k, math.nan, math.nan, {"oracle": int(iterations)}, method="oracle")


# -- SC certification of the MEB barrier ------------------------------------------


def barrier_family(instance, spread=1.0, name="meb-barrier"):
    """Sampling family for the MEB barrier, certified against the 1-SC bounds.

    Samples ``x`` within ``spread * max d(p_i, p_j)`` of a random input point
    (so ``max_i d(p_i, x) < R``) and ``s`` between ``max_i d(p_i, x)^2`` and
    ``R^2``, uniform half of the time and log-close to either wall otherwise.
    """
    from .analyzer import PointFamily

    problem, R = build_problem(instance)
    H = instance.unit_space
    P = problem.manifold
    pts = instance.points
    diam = float(instance.pairwise().max())
    radius = min(spread, 0.999) * diam

    def sampler(rng):
        p = pts[rng.integers(len(pts))]
        c = rng.normal(size=H.dim)
        c *= radius * rng.uniform() ** (1.0 / H.dim) / np.linalg.norm(c)
        xh = H.exp(p, from_coords(H, p, c))
        lo = max(H.distance(q, xh) for q in pts) ** 2
        hi = R * R
        mode = rng.integers(3)
        if mode == 0:
            frac = rng.uniform()
        else:
            frac = 10.0 ** rng.uniform(-8.0, 0.0)
            frac = frac if mode == 1 else 1.0 - frac
        s = lo + (hi - lo) * min(max(frac, 1e-12), 1.0 - 1e-12)
        return P.join(xh, np.array([s]))

    return PointFamily(problem.barrier, sampler, (1.0, 1.0), name=name,
                       config={"points": len(pts), "dim": instance.dim, "R": R, "nu": problem.nu})
