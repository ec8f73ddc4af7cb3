"""Independent numerical routes to the quantities the closed forms compute.

Nothing here calls a field's derivative formulas, except the mixed-direction
oracle, which differentiates the closed-form Hessian along a transported frame
by design.  Everything is finite differences along exact geodesics or ODE
integration.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

from .errors import UsageError
from .manifolds import Hyperboloid, coords, from_coords, minkowski_inner

# Nine-point central stencils on offsets -4..4.
_STENCILS = {
    1: np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280]),
    2: np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560]),
    3: np.array([-7 / 240, 3 / 10, -169 / 120, 61 / 30, 0.0, -61 / 30, 169 / 120, -3 / 10, 7 / 240]),
}
_OFFSETS = np.arange(-4, 5)

# Steps in curvature-normalised length units (divided by sqrt(kappa) when kappa > 0).
FD_STEPS = {1: 2e-2, 2: 2e-2, 3: 2e-2}


def _step(manifold, order, h, r):
    if order not in FD_STEPS:
        raise UsageError(f"order must be 1, 2 or 3, got {order}")
    base = FD_STEPS[order] if h is None else h
    kappa = getattr(manifold, "kappa", 0.0)
    if kappa > 0:
        base /= math.sqrt(kappa)
    return base / r


def central_differences(g, orders, h):
    """Derivatives of a univariate function at 0, one nine-point stencil per order, shared samples."""
    for order in orders:
        if order not in _STENCILS:
            raise UsageError(f"order must be 1, 2 or 3, got {order}")
    if tuple(orders) == (1,):
        # the centre weight is zero: skip that sample
        vals = np.array([g(k * h) if k else 0.0 for k in _OFFSETS])
    else:
        vals = np.array([g(k * h) for k in _OFFSETS])
        # pin the centre value to cancel a common offset before weighting
        vals = vals - vals[4]
    return [float(_STENCILS[order] @ vals) / h**order for order in orders]


def central_difference(g, order, h):
    """Derivative of a univariate function at 0 from a nine-point stencil."""
    return central_differences(g, (order,), h)[0]


def _validated(M, x, u):
    x = M.check_point(x)
    return x, M.check_tangent(x, u)


def fd_oracle(field, x, u, order, h=None, scale=None):
    """Finite-difference estimate of ``d^k/dt^k f(exp_x(t u))`` at ``t = 0``.

    Order 1, 2, 3 estimate ``Df(u)``, ``Hf(u, u)`` and ``nabla_u Hf(u, u)``.
    The step is measured against ``scale`` (default: the metric length of
    ``u``); barriers near their boundary should pass a local norm instead so
    the stencil stays inside the domain.
    """
    M = field.manifold
    r = M.norm(x, u) if scale is None else float(scale)
    if r == 0.0:
        return 0.0
    step = _step(M, order, h, r)
    x, u = _validated(M, x, u)
    return central_difference(lambda t: field.value(M.exp(x, t * u, check=False)), order, step)


def fd_oracle_all(field, x, u, h=None, scale=None):
    """Orders 1, 2 and 3 of :func:`fd_oracle` from one shared set of samples."""
    M = field.manifold
    r = M.norm(x, u) if scale is None else float(scale)
    if r == 0.0:
        return [0.0, 0.0, 0.0]
    steps = {_step(M, k, h, r) for k in (1, 2, 3)}
    x, u = _validated(M, x, u)
    g = lambda t: field.value(M.exp(x, t * u, check=False))  # noqa: E731
    if len(steps) == 1:
        return central_differences(g, (1, 2, 3), steps.pop())
    return [central_difference(g, k, _step(M, k, h, r)) for k in (1, 2, 3)]


def fd_mixed(field, x, u, v, h=None, scale=None):
    """Estimate ``nabla_v Hf(u, u)`` as ``d/ds Hf_{c(s)}(tau u, tau u)``, ``c(s) = exp_x(s v)``."""
    M = field.manifold
    r = M.norm(x, v) if scale is None else float(scale)
    if r == 0.0:
        return 0.0
    step = _step(M, 1, h, r)
    x, v = _validated(M, x, v)
    u = M.check_tangent(x, u)

    def hess_along(s):
        y = M.exp(x, s * v, check=False)
        basis = M.tangent_basis(y)
        tu = M.transport(x, y, u)
        uc = coords(M, y, tu, basis)
        return float(uc @ field.jet(y, basis).hess @ uc)

    return central_difference(hess_along, 1, step)


def geodesic_ode(manifold, x, u, t=1.0, rtol=1e-12, atol=1e-13):
    """Integrate the hyperboloid geodesic equation ``y'' = <y', y'>_L y`` from ``(x, u)``."""
    n = manifold.ambient_dim

    def rhs(_, z):
        y, yd = z[:n], z[n:]
        return np.concatenate((yd, minkowski_inner(yd, yd) * y))

    sol = solve_ivp(rhs, (0.0, t), np.concatenate((x, u)), method="DOP853", rtol=rtol, atol=atol)
    return sol.y[:n, -1]


def jacobi_ode_boundary(manifold, p, x, u, rtol=1e-11, atol=1e-12):
    """``nabla X(l)`` for the Jacobi field with ``X(0) = 0``, ``X(l) = u``, by shooting.

    The Jacobi equation ``X'' + R(X, gamma') gamma' = 0`` is integrated in a
    parallel orthonormal frame.  Hyperbolic space is locally symmetric
    (``nabla R = 0``), so in such a frame the curvature term is a constant
    matrix, which is read off ``manifold.curvature`` at ``x``.  Integration
    runs backwards from ``x`` (where ``X = u``) to ``p`` (where ``X = 0``),
    which keeps all frame computations at ``x``.
    """
    l = manifold.distance(p, x)
    if l == 0.0:
        raise UsageError("jacobi_ode_boundary needs p != x")
    n = manifold.dim
    frame = manifold.tangent_basis(x)
    back = manifold.log(x, p) / l  # velocity of the reversed geodesic
    K = np.array([[manifold.inner(x, bi, manifold.curvature(x, bj, back, back)) for bj in frame] for bi in frame])

    def rhs(_, z):
        return np.concatenate((z[n:], -K @ z[:n]))

    def shoot(a0, ad0):
        sol = solve_ivp(rhs, (0.0, l), np.concatenate((a0, ad0)), method="DOP853", rtol=rtol, atol=atol)
        return sol.y[:n, -1]

    a0 = np.array([manifold.inner(x, b, u) for b in frame])
    # Y(s) = X(l - s): Y(0) = u, Y(l) = 0 and Y'(0) = -nabla X(l); solve for Y'(0)
    free = shoot(a0, np.zeros(n))
    basis_shots = np.array([shoot(np.zeros(n), e) for e in np.eye(n)]).T
    c = np.linalg.solve(basis_shots, -free)
    return -(c @ frame)


# -- closed form versus finite differences --------------------------------------

DERIVATIVE_QUANTITIES = ("Df", "Hf", "nabla_u Hf(u,u)", "nabla_v Hf(u,u)")


def _unit(M, x, rng, basis):
    c = rng.normal(size=M.dim)
    return from_coords(M, x, c / np.linalg.norm(c), basis)


def derivative_check(dim=2, kappa=1.0, samples=1000, seed=0, lmin=0.01, lmax=20.0):
    """Compare the squared-distance closed forms with finite differences.

    Each sample draws ``x`` near the apex, a pole at unit-curvature distance
    ``l`` (log-uniform in ``[lmin, lmax]``) and unit directions ``u, v``.
    The error of a quantity is ``|fd - closed| / max(|closed|, 1)``.  Returns
    a dict with the worst error per quantity and the sample attaining it.
    """
    from .fields import SquaredDistanceField

    if dim < 2:
        raise UsageError("dim must be at least 2")
    if samples < 1:
        raise UsageError("samples must be positive")
    if not (kappa > 0 and math.isfinite(kappa)):
        raise UsageError("kappa must be positive")
    H = Hyperboloid(dim, kappa)
    rng = np.random.default_rng(seed)
    sk = math.sqrt(kappa)
    o = H.origin()
    worst = {q: {"error": 0.0} for q in DERIVATIVE_QUANTITIES}
    for i in range(samples):
        x = H.exp(o, from_coords(H, o, rng.normal(size=dim) * 0.3 / sk))
        basis = H.tangent_basis(x)
        l = math.exp(rng.uniform(math.log(lmin), math.log(lmax)))
        p = H.exp(x, _unit(H, x, rng, basis) * l / sk)
        u, v = _unit(H, x, rng, basis), _unit(H, x, rng, basis)
        f = SquaredDistanceField(H, p)
        jet = f.jet(x, basis)
        uc, vc = coords(H, x, u, basis), coords(H, x, v, basis)
        closed = (jet.grad @ uc, uc @ jet.hess @ uc,
                  uc @ jet.hessian_derivative(uc) @ uc, uc @ jet.hessian_derivative(vc) @ uc)
        fd = (*fd_oracle_all(f, x, u), fd_mixed(f, x, u, v))
        for q, c, e in zip(DERIVATIVE_QUANTITIES, closed, fd):
            err = abs(e - c) / max(abs(c), 1.0)
            if err > worst[q]["error"] or i == 0:
                worst[q] = {"error": float(err), "sample": i, "closed": float(c), "fd": float(e),
                            "l": l, "x": x.tolist(), "pole": p.tolist(), "u": u.tolist(), "v": v.tolist()}
    return worst
