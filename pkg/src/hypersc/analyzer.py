"""Numerical certification and falsification of self-concordance.

Ratios are evaluated from a field's :class:`~hypersc.fields.Jet`, so once a
jet is computed any number of direction pairs cost only small matrix
products.  Random search is complemented by extremal-direction probes for the
squared distance, because the suprema are only approached as ``l -> inf`` and
uniform sampling finds them slowly.

Samplers keep the evaluation point ``x`` near the apex of the hyperboloid and
move the pole instead.  The ratios are isometry invariant, and tangent
computations at points far from the apex lose all precision in float64.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import linalg, optimize

from .errors import DegeneracyError, UsageError
from .fields import (
    LogBarrierField,
    SquaredDistanceField,
    coords,
    dual_norm_coords,
    lcoth,
    phi,
)
from .manifolds import Hyperboloid, from_coords

SLACK = 1e-9
WSC_SUP = 2.0 / math.sqrt(27.0)


# -- ratios -------------------------------------------------------------------


def _quad(h, a, b=None):
    return float(a @ h @ (a if b is None else b))


def sc_ratio_coords(jet, uc, vc):
    """``|nabla_v Hf(u, u)| / (2 Hf(v, v)^{1/2} Hf(u, u))`` from frame coordinates."""
    huu = _quad(jet.hess, uc)
    hvv = _quad(jet.hess, vc)
    if not (huu > 0.0 and hvv > 0.0):
        raise DegeneracyError("Hessian is not positive definite along the given directions")
    return abs(float(vc @ ((jet.dhess @ uc) @ uc))) / (2.0 * math.sqrt(hvv) * huu)


def wsc_ratio_coords(jet, uc):
    """``|nabla_u Hf(u, u)| / (2 Hf(u, u)^{3/2})`` from frame coordinates."""
    huu = _quad(jet.hess, uc)
    if not huu > 0.0:
        raise DegeneracyError("Hessian is not positive definite along the given direction")
    return abs(float(uc @ ((jet.dhess @ uc) @ uc))) / (2.0 * huu**1.5)


def sc_ratio(field, x, u, v):
    """Self-concordance ratio of ``field`` at ``x`` for tangent vectors ``u``, ``v``."""
    M = field.manifold
    basis = M.tangent_basis(x)
    jet = field.jet(x, basis)
    return sc_ratio_coords(jet, coords(M, x, u, basis), coords(M, x, v, basis))


def wsc_ratio(field, x, u):
    """Weak self-concordance ratio, i.e. :func:`sc_ratio` with ``v = u``."""
    M = field.manifold
    basis = M.tangent_basis(x)
    jet = field.jet(x, basis)
    return wsc_ratio_coords(jet, coords(M, x, u, basis))


# -- closed-form probe values for the squared distance (unit curvature) -------


def sc_probe_value(l):
    """Ratio at the extremal directions ``phi = pi/2``, ``tan^2 theta = 1/(l coth l)``."""
    return (l - phi(l)) * math.tanh(l) / (2.0 * l)


def wsc_probe_value(l):
    """``max_theta`` of the weak ratio at distance ``l``: ``|-3/l - tanh l + 3 coth l| / sqrt(27)``."""
    return abs(-3.0 / l - math.tanh(l) + 3.0 / math.tanh(l)) / math.sqrt(27.0)


def sc_probe_angles(l):
    return math.atan(1.0 / math.sqrt(lcoth(l))), math.pi / 2.0, 0.0


def wsc_probe_angle(l):
    return math.atan(math.sqrt(2.0 * math.tanh(l) / l))


def barrier_sigma(sigma, gap):
    """SC constant of ``-log(beta - f)`` for a ``sigma``-SC ``f`` with ``beta - f* = gap``."""
    return math.sqrt((sigma * math.sqrt(gap) + 1.0) ** 2 + 2.25)


def _radial_frame(field, x, basis):
    """Unit radial coordinates ``g`` and a unit ``e1`` (and ``e2`` when ``dim >= 3``) orthogonal to it."""
    n = field.manifold.dim
    l1, gdot = field.radial(x)
    if l1 == 0.0:
        raise UsageError("probe directions need x != pole")
    g = coords(field.manifold, x, gdot, basis)
    g /= np.linalg.norm(g)
    # complete g to an orthonormal frame deterministically
    q, _ = np.linalg.qr(np.column_stack([g, np.eye(n)]))
    e = q[:, 1:n]
    e *= np.sign(q[:, 0] @ g)
    return l1, g, [e[:, k] for k in range(n - 1)]


def probe_coords(g, es, theta, phi_, alpha):
    """Frame coordinates of the probe pair ``(u, v)`` for spherical angles against ``g``."""
    u = math.cos(theta) * g + math.sin(theta) * es[0]
    side = math.cos(alpha) * es[0]
    if len(es) > 1:
        side = side + math.sin(alpha) * es[1]
    v = math.cos(phi_) * g + math.sin(phi_) * side
    return u, v


def probe_directions(field, x, theta, phi_, alpha):
    """Ambient probe vectors ``(u, v)`` at ``x`` for a squared-distance ``field``."""
    M = field.manifold
    basis = M.tangent_basis(x)
    _, g, es = _radial_frame(field, x, basis)
    uc, vc = probe_coords(g, es, theta, phi_, alpha)
    return from_coords(M, x, uc, basis), from_coords(M, x, vc, basis)


def refine_probe(jet, g, es, start):
    """Local maximisation of the SC ratio over the probe angles, started at ``start``."""

    def neg(a):
        uc, vc = probe_coords(g, es, *a)
        return -sc_ratio_coords(jet, uc, vc)

    res = optimize.minimize(neg, np.asarray(start, float), method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000})
    best = res.x if res.fun < neg(start) else np.asarray(start, float)
    return -neg(best), probe_coords(g, es, *best)


# -- sampling families --------------------------------------------------------


def _near_apex(H, rng, spread=0.5):
    """Random point within metric distance ``spread / sqrt(kappa)`` of the apex."""
    o = H.origin()
    d = rng.normal(size=H.dim)
    d *= spread * rng.uniform() / np.linalg.norm(d)
    return H.exp(o, from_coords(H, o, d) / math.sqrt(H.kappa))


def _pole_at(H, x, l1, rng):
    """Point at unit-curvature distance ``l1`` from ``x`` in a uniform random direction."""
    basis = H.tangent_basis(x)
    d = rng.normal(size=H.dim)
    d /= np.linalg.norm(d)
    return H.exp(x, from_coords(H, x, d * l1 / math.sqrt(H.kappa), basis))


@dataclass(frozen=True)
class Candidate:
    source: str
    field: object
    x: np.ndarray
    uc: np.ndarray
    vc: np.ndarray


class SqdistFamily:
    """Squared-distance fields ``d(p, .)^2 / 2`` with ``l = d(p, x)`` log-uniform (unit curvature)."""

    name = "sqdist"

    def __init__(self, dim=2, kappa=1.0, lmin=0.01, lmax=50.0, probe_points=25, probe_lmax=200.0):
        if dim < 2:
            raise UsageError("dim must be at least 2")
        if not 0.0 < lmin < lmax:
            raise UsageError("need 0 < lmin < lmax")
        self.H = Hyperboloid(dim, kappa)
        self.lmin, self.lmax = float(lmin), float(lmax)
        self.probe_points = int(probe_points)
        # the suprema are limits as l -> inf, so probes reach past the sampled range
        self.probe_lmax = max(float(probe_lmax), self.lmax)

    @property
    def bounds(self):
        k = self.H.kappa
        return math.sqrt(k) / 2.0, math.sqrt(4.0 * k / 27.0)

    def config(self):
        return {"family": self.name, "dim": self.H.dim, "kappa": self.H.kappa,
                "lmin": self.lmin, "lmax": self.lmax, "probe_lmax": self.probe_lmax}

    def draw(self, rng):
        x = _near_apex(self.H, rng)
        l1 = math.exp(rng.uniform(math.log(self.lmin), math.log(self.lmax)))
        return SquaredDistanceField(self.H, _pole_at(self.H, x, l1, rng)), x

    def describe(self, field):
        return {"pole": field.pole}

    def _at_distance(self, l1):
        x = self.H.origin()
        e = np.zeros(self.H.ambient_dim)
        e[1] = l1  # ambient length l1 is unit-curvature distance l1
        pole = self.H.exp(x, e)
        return SquaredDistanceField(self.H, pole), x

    def probes(self):
        """Extremal-direction candidates and the probe curve ``(l, sc, sc_refined, wsc)``."""
        cands, curve = [], []
        grid = np.geomspace(self.lmin, self.probe_lmax, self.probe_points)
        ls = np.unique(np.concatenate([grid, [20.0, self.lmax, self.probe_lmax]]))
        ls = ls[(ls >= self.lmin) & (ls <= self.probe_lmax)]
        for l1 in ls:
            f, x = self._at_distance(float(l1))
            basis = self.H.tangent_basis(x)
            jet = f.jet(x, basis)
            _, g, es = _radial_frame(f, x, basis)
            start = sc_probe_angles(float(l1))
            uc, vc = probe_coords(g, es, *start)
            sc = sc_ratio_coords(jet, uc, vc)
            cands.append(Candidate(f"sc-probe l={l1:.6g}", f, x, uc, vc))
            sc_ref, (ucr, vcr) = refine_probe(jet, g, es, start)
            cands.append(Candidate(f"sc-probe-refined l={l1:.6g}", f, x, ucr, vcr))
            uw, _ = probe_coords(g, es, wsc_probe_angle(float(l1)), 0.0, 0.0)
            wsc = wsc_ratio_coords(jet, uw)
            cands.append(Candidate(f"wsc-probe l={l1:.6g}", f, x, uw, uw))
            curve.append({"l": float(l1), "sc": sc, "sc_refined": sc_ref, "wsc": wsc})
        return cands, curve


class BallBarrierFamily:
    """``F = -log(R^2/2 - d(p, .)^2/2)`` with ``x`` anywhere in the open ball ``B(p, R)``."""

    name = "ball-barrier"

    def __init__(self, radius, dim=2, kappa=1.0):
        if not radius > 0:
            raise UsageError("radius must be positive")
        self.H = Hyperboloid(dim, kappa)
        self.radius = float(radius)

    @property
    def bounds(self):
        s = barrier_sigma(math.sqrt(self.H.kappa) / 2.0, self.radius**2 / 2.0)
        return s, s

    def config(self):
        return {"family": self.name, "dim": self.H.dim, "kappa": self.H.kappa, "radius": self.radius}

    def field(self, pole):
        return LogBarrierField(SquaredDistanceField(self.H, pole), self.radius**2 / 2.0)

    def draw(self, rng):
        x = _near_apex(self.H, rng)
        # distance fraction: uniform bulk plus log-uniform approach to the boundary
        frac = rng.uniform() if rng.uniform() < 0.5 else 1.0 - 10.0 ** rng.uniform(-6.0, 0.0)
        l1 = frac * self.radius * math.sqrt(self.H.kappa)
        return self.field(_pole_at(self.H, x, l1, rng)), x

    def describe(self, field):
        return {"pole": field.inner_field.pole}

    def probes(self):
        cands, curve = [], []
        for pt in tightness_scan([self.radius], dim=self.H.dim, kappa=self.H.kappa):
            cands.append(Candidate(f"tightness R={pt.R:.6g}", pt.field, pt.x, pt.uc, pt.uc))
            curve.append({"R": pt.R, "wsc": pt.ratio, "lower_bound": pt.lower_bound})
        return cands, curve


class PointFamily:
    """A fixed field sampled at points produced by ``sampler(rng)``; bounds supplied by the caller."""

    def __init__(self, field, sampler, bounds, name="custom", config=None):
        self.fixed = field
        self.sampler = sampler
        self.bounds = tuple(bounds)
        self.name = name
        self._config = dict(config or {})

    def config(self):
        return {"family": self.name, **self._config}

    def draw(self, rng):
        return self.fixed, self.sampler(rng)

    def describe(self, field):
        return {}

    def probes(self):
        return [], []


# -- certification ------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    ratio: float
    source: str
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    params: dict = dc_field(default_factory=dict)

    def to_dict(self):
        out = {"ratio": self.ratio, "source": self.source, "x": self.x.tolist(),
               "u": self.u.tolist(), "v": self.v.tolist()}
        out.update({k: np.asarray(v).tolist() for k, v in self.params.items()})
        return out


@dataclass(frozen=True)
class SCReport:
    max_sc_ratio: float
    max_wsc_ratio: float
    sc_witness: Witness
    wsc_witness: Witness
    samples: int
    seed: int
    sc_bound: float
    wsc_bound: float
    probe_curve: tuple = ()
    config: dict = dc_field(default_factory=dict)

    @property
    def witness(self):
        return self.sc_witness

    def within_bounds(self, slack=SLACK):
        return self.max_sc_ratio <= self.sc_bound + slack and self.max_wsc_ratio <= self.wsc_bound + slack

    def to_dict(self):
        return {
            "config": self.config,
            "seed": self.seed,
            "samples": self.samples,
            "max_sc_ratio": self.max_sc_ratio,
            "max_wsc_ratio": self.max_wsc_ratio,
            "sc_bound": self.sc_bound,
            "wsc_bound": self.wsc_bound,
            "within_bounds": self.within_bounds(),
            "sc_witness": self.sc_witness.to_dict(),
            "wsc_witness": self.wsc_witness.to_dict(),
            "probe_curve": list(self.probe_curve),
        }


def thread_count():
    """Sampler parallelism: ``HYPERSC_THREADS`` if set, else the machine's CPU count."""
    raw = os.environ.get("HYPERSC_THREADS")
    if raw:
        try:
            n = int(raw)
        except ValueError as exc:
            raise UsageError(f"HYPERSC_THREADS must be an integer, got {raw!r}") from exc
        if n < 1:
            raise UsageError("HYPERSC_THREADS must be at least 1")
        return n
    return os.cpu_count() or 1


def _best(a, b):
    """Associative max keeping the earlier entry on ties."""
    if a is None:
        return b
    if b is None or a[0] >= b[0]:
        return a
    return b


def _run_batch(family, seed_seq, count, tag):
    rng = np.random.default_rng(seed_seq)
    best_sc = best_wsc = None
    for i in range(count):
        f, x = family.draw(rng)
        M = f.manifold
        basis = M.tangent_basis(x)
        jet = f.jet(x, basis)
        uc = rng.normal(size=M.dim)
        vc = rng.normal(size=M.dim)
        uc /= np.linalg.norm(uc)
        vc /= np.linalg.norm(vc)
        src = f"sample {tag}:{i}"
        for a, b in ((uc, vc), (vc, uc)):
            r = sc_ratio_coords(jet, a, b)
            best_sc = _best(best_sc, (r, src, f, x, basis, a, b))
        for a in (uc, vc):
            r = wsc_ratio_coords(jet, a)
            best_wsc = _best(best_wsc, (r, src, f, x, basis, a, a))
    return best_sc, best_wsc


def _witness(family, entry):
    r, src, f, x, basis, a, b = entry
    M = f.manifold
    return Witness(float(r), src, np.asarray(x), from_coords(M, x, a, basis), from_coords(M, x, b, basis),
                   family.describe(f))


def certify(family, samples=10_000, seed=0, batch=2_000, probes=True, threads=None):
    """Search for the suprema of the SC and WSC ratios over ``family``.

    Batches get seeds spawned from ``seed`` and are reduced in batch order,
    so the report does not depend on the number of threads.
    """
    if samples < 0 or batch < 1:
        raise UsageError("samples must be >= 0 and batch >= 1")
    counts = [batch] * (samples // batch) + ([samples % batch] if samples % batch else [])
    seeds = np.random.SeedSequence(seed).spawn(len(counts))
    workers = threads or thread_count()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda k: _run_batch(family, seeds[k], counts[k], k), range(len(counts))))
    best_sc = best_wsc = None
    for bs, bw in results:
        best_sc, best_wsc = _best(best_sc, bs), _best(best_wsc, bw)
    curve = []
    if probes:
        cands, curve = family.probes()
        for c in cands:
            M = c.field.manifold
            basis = M.tangent_basis(c.x)
            jet = c.field.jet(c.x, basis)
            best_sc = _best(best_sc, (sc_ratio_coords(jet, c.uc, c.vc), c.source, c.field, c.x, basis, c.uc, c.vc))
            if np.array_equal(c.uc, c.vc):
                best_wsc = _best(best_wsc, (wsc_ratio_coords(jet, c.uc), c.source, c.field, c.x, basis, c.uc, c.uc))
    if best_sc is None:
        raise UsageError("certify needs at least one sample or probe")
    # the weak ratio is the diagonal of the strong one
    best_sc = _best(best_sc, best_wsc)
    sc_b, wsc_b = family.bounds
    return SCReport(
        max_sc_ratio=float(best_sc[0]),
        max_wsc_ratio=float(best_wsc[0]),
        sc_witness=_witness(family, best_sc),
        wsc_witness=_witness(family, best_wsc),
        samples=int(samples),
        seed=int(seed),
        sc_bound=float(sc_b),
        wsc_bound=float(wsc_b),
        probe_curve=tuple(curve),
        config=family.config(),
    )


# -- barrier parameter and sum rule -------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    worst: float
    bound: float
    witness: object = None


def barrier_parameter_check(field, nu, points, slack=SLACK):
    """Largest ``DF(u)^2 / HF(u, u)`` over the sampled points.

    For a fixed point the supremum over ``u`` is ``(||DF||*)^2``, so directions
    need not be sampled.
    """
    worst, wit = -math.inf, None
    M = field.manifold
    for x in points:
        jet = field.jet(x, M.tangent_basis(x))
        # a vanishing differential has ratio 0 even where the Hessian degenerates
        r = dual_norm_coords(jet.hess, jet.grad) ** 2 if jet.grad.any() else 0.0
        if r > worst:
            worst, wit = r, x
    if wit is None:
        raise UsageError("barrier_parameter_check needs at least one point")
    return CheckResult(worst <= nu + slack * max(1.0, nu), float(worst), float(nu), wit)


def sum_rule_check(f1, sigma1, f2, sigma2, a, b, points, rng, directions=8, slack=SLACK):
    """Sampled SC ratio of ``a f1 + b f2`` against ``max(sigma1/sqrt(a), sigma2/sqrt(b))``."""
    from .fields import WeightedSumField

    if not (a > 0 and b > 0):
        raise UsageError("weights must be positive")
    g = WeightedSumField([(a, f1), (b, f2)])
    bound = max(sigma1 / math.sqrt(a), sigma2 / math.sqrt(b))
    worst, wit = 0.0, None
    M = g.manifold
    for x in points:
        basis = M.tangent_basis(x)
        jet = g.jet(x, basis)
        for _ in range(directions):
            uc, vc = rng.normal(size=M.dim), rng.normal(size=M.dim)
            r = sc_ratio_coords(jet, uc, vc)
            if r > worst:
                worst, wit = r, (x, from_coords(M, x, uc, basis), from_coords(M, x, vc, basis))
    return CheckResult(worst <= bound + slack, float(worst), float(bound), wit)


# -- Dikin ellipsoid and transport comparison ---------------------------------


def omega(t):
    """``t - log(1 + t)``."""
    return t - math.log1p(t)


def omega_star(t):
    """``-t - log(1 - t)`` for ``t < 1``."""
    return -t - math.log1p(-t)


@dataclass(frozen=True)
class DikinCheck:
    r: float
    inside: bool
    checks: dict
    slack: float = SLACK

    @property
    def violations(self):
        return [k for k, (lhs, rhs) in self.checks.items() if lhs > rhs + self.slack * max(1.0, abs(lhs), abs(rhs))]

    @property
    def ok(self):
        return self.inside and not self.violations


def dikin_step_check(field, sigma, x, u, slack=SLACK):
    """Check the Dikin-ellipsoid guarantees along ``t -> exp_x(t u)`` for ``0 <= t <= 1``.

    Each entry of ``checks`` is a pair ``(lhs, rhs)`` meaning ``lhs <= rhs``:
    tangent-norm bounds at the endpoint, the two-sided bounds on the change of
    the directional derivative, and the ``omega`` / ``omega_*`` value bounds.
    """
    M = field.manifold
    b0 = M.tangent_basis(x)
    j0 = field.jet(x, b0)
    uc = coords(M, x, u, b0)
    r = math.sqrt(max(_quad(j0.hess, uc), 0.0))
    if not sigma * r < 1.0:
        raise UsageError(f"step has local norm {r!r}, need < 1/sigma = {1.0 / sigma!r}")
    y = M.exp(x, u)
    inside = bool(field.domain_contains(y))
    if not inside:
        return DikinCheck(r, False, {}, slack)
    b1 = M.tangent_basis(y)
    j1 = field.jet(y, b1)
    u1 = coords(M, y, M.transport(x, y, u), b1)
    r1 = math.sqrt(max(_quad(j1.hess, u1), 0.0))
    d0, d1 = float(j0.grad @ uc), float(j1.grad @ u1)
    sr = sigma * r
    excess = j1.value - j0.value - d0
    checks = {
        "norm_lower": (r / (1.0 + sr), r1),
        "norm_upper": (r1, r / (1.0 - sr)),
        "df_lower": (r * r / (1.0 + sr), d1 - d0),
        "df_upper": (d1 - d0, r * r / (1.0 - sr)),
        "f_lower": (omega(sr) / sigma**2, excess),
        "f_upper": (excess, omega_star(sr) / sigma**2),
    }
    return DikinCheck(r, inside, checks, slack)


def _pulled_back_hessian(field, x, u, t, b0):
    """``tau_t^* Hf_{gamma(t)}`` in the frame ``b0`` at ``x``."""
    M = field.manifold
    y = M.exp(x, t * np.asarray(u, float))
    b1 = M.tangent_basis(y)
    T = np.array([coords(M, y, M.transport(x, y, b), b1) for b in b0]).T
    return T.T @ field.jet(y, b1).hess @ T


@dataclass(frozen=True)
class TransportCheck:
    r: float
    eigenvalues: np.ndarray
    lower: float
    upper: float
    integral_eigenvalues: np.ndarray = None
    integral_lower: float = None
    integral_upper: float = None
    slack: float = SLACK

    @property
    def ok(self):
        s = self.slack
        good = bool(np.all(self.eigenvalues >= self.lower - s) and np.all(self.eigenvalues <= self.upper + s))
        if self.integral_eigenvalues is not None:
            ie = self.integral_eigenvalues
            good = good and bool(np.all(ie >= self.integral_lower - s) and np.all(ie <= self.integral_upper + s))
        return good


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def transport_comparison(field, sigma, x, u, integral=True, slack=SLACK):
    """Eigenvalues of ``Hf_x^{-1} tau^* Hf_{exp_x u}``, with the bounds ``(1 - sigma r)^{+-2}``.

    With ``integral`` the eigenvalues of ``int_0^1 Hf_x^{-1} tau_t^* Hf_t dt``
    (12-point Gauss-Legendre) are checked against
    ``[1 - sigma r + (sigma r)^2 / 3, 1 / (1 - sigma r)]`` too.
    """
    M = field.manifold
    b0 = M.tangent_basis(x)
    H0 = field.jet(x, b0).hess
    uc = coords(M, x, u, b0)
    r = math.sqrt(max(_quad(H0, uc), 0.0))
    sr = sigma * r
    if not sr < 1.0:
        raise UsageError("transport comparison needs sigma * r < 1")
    try:
        mu = linalg.eigh(_pulled_back_hessian(field, x, u, 1.0, b0), H0, eigvals_only=True)
    except linalg.LinAlgError as exc:
        raise DegeneracyError("Hessian is not positive definite") from exc
    out = dict(r=r, eigenvalues=mu, lower=(1.0 - sr) ** 2, upper=(1.0 - sr) ** -2, slack=slack)
    if integral:
        ts = 0.5 * (_GL_NODES + 1.0)
        A = sum(0.5 * w * _pulled_back_hessian(field, x, u, t, b0) for t, w in zip(ts, _GL_WEIGHTS))
        out.update(
            integral_eigenvalues=linalg.eigh(A, H0, eigvals_only=True),
            integral_lower=1.0 - sr + sr * sr / 3.0,
            integral_upper=1.0 / (1.0 - sr),
        )
    return TransportCheck(**out)


# -- tightness -----------------------------------------------------------------


@dataclass(frozen=True)
class TightnessPoint:
    R: float
    l: float
    ratio: float
    lower_bound: float
    upper_bound: float
    field: object = None
    x: np.ndarray = None
    uc: np.ndarray = None


def tightness_lower_bound(R, l):
    """Analytic lower bound on the weak ratio of the unit-curvature ball barrier at distance ``l``.

    ``(R^2 - l^2) / (8 sqrt(R^2 + l^2)) |2 tanh l - 3 Phi(l) tanh l / l| - 5 / 2^{5/2}``.
    The ratio carries a factor 2 in its denominator, which halves the
    constants of the cruder estimate ``|N| / HF^{3/2}``.
    """
    th = math.tanh(l)
    return (R * R - l * l) / (8.0 * math.sqrt(R * R + l * l)) * abs(2.0 * th - 3.0 * phi(l) * th / l) - 5.0 / 2**2.5


def tightness_scan(radii, dim=2, kappa=1.0):
    """Weak ratio of ``F_{p,R}`` at ``d(p, x)^2 = R^2/2`` along the extremal direction.

    Radii are metric radii.  Rescaling the metric only adds a constant to the
    barrier, so everything depends on ``R`` and ``kappa`` through ``sqrt(kappa) R``.
    """
    H = Hyperboloid(dim, kappa)
    sk = math.sqrt(kappa)
    out = []
    for R in radii:
        R = float(R)
        if not R > 0:
            raise UsageError("radii must be positive")
        R1 = R * sk
        l1 = R1 / math.sqrt(2.0)
        x = H.origin()
        e = np.zeros(H.ambient_dim)
        e[1] = l1
        pole = H.exp(x, e)
        F = LogBarrierField(SquaredDistanceField(H, pole), R * R / 2.0)
        basis = H.tangent_basis(x)
        jet = F.jet(x, basis)
        _, g, es = _radial_frame(F.inner_field, x, basis)
        w1 = R1 * R1 / 2.0 - l1 * l1 / 2.0
        theta = math.atan(math.sqrt((w1 + l1 * l1) / w1 * math.tanh(l1) / l1))
        uc = math.cos(theta) * g + math.sin(theta) * es[0]
        ratio = wsc_ratio_coords(jet, uc)
        out.append(TightnessPoint(
            R=R, l=l1 / sk, ratio=ratio,
            lower_bound=tightness_lower_bound(R1, l1),
            upper_bound=barrier_sigma(sk / 2.0, R * R / 2.0),
            field=F, x=x, uc=uc,
        ))
    return out
