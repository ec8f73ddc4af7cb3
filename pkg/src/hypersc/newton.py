"""Newton direction, full and damped Newton steps, and a two-phase minimizer.

Every guarantee the step rules come with is checked at runtime: the
quadratic contraction of the decrement for full steps and the ``omega``
descent for damped steps.  A violated guarantee raises
:class:`~hypersc.errors.InvariantError` with the offending record attached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import linalg
from scipy.integrate import quad_vec

from .analyzer import omega
from .errors import ConvergenceError, DomainError, InvariantError, UsageError
from .fields import _cholesky, coords, from_coords

QUADRATIC_ENTRY = 0.38  # times 1/sigma; inside (3 - sqrt 5)/2 = 0.381966...
RESIDUAL_TOL = 1e-10
SLACK = 1e-9
FULL_CAP = 60


@dataclass(frozen=True)
class NewtonState:
    """Newton data at ``x``: direction ``u`` (ambient), decrement and value.

    ``grad`` and ``hess`` are kept in the frame ``basis`` for reuse.
    """

    x: np.ndarray
    direction: np.ndarray
    decrement: float
    value: float
    residual: float
    basis: np.ndarray
    grad: np.ndarray
    hess: np.ndarray
    uc: np.ndarray


@dataclass(frozen=True)
class NewtonRecord:
    iter: int
    kind: str  # "damped" or "full"
    decrement: float
    value: float
    bound: float  # predicted decrement bound (full) or required value drop (damped)
    x: np.ndarray = None  # iterate the step started from


@dataclass
class SolveTrace:
    records: list = dc_field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def count(self, kind):
        return sum(r.kind == kind for r in self.records)


def newton_direction(field, x):
    """Solve ``Hf(u, .) = -Df`` by Cholesky in the tangent frame at ``x``."""
    M = field.manifold
    basis = M.tangent_basis(x)
    jet = field.jet(x, basis)
    c = _cholesky(jet.hess)
    uc = -linalg.cho_solve(c, jet.grad)
    # backward error of the solve, relative to the sizes involved
    scale = np.linalg.norm(jet.hess, 2) * np.linalg.norm(uc) + np.linalg.norm(jet.grad)
    residual = float(np.linalg.norm(jet.hess @ uc + jet.grad) / scale) if scale > 0 else 0.0
    if residual > RESIDUAL_TOL:
        raise InvariantError(f"Newton system residual {residual:.3e} exceeds {RESIDUAL_TOL:g}", witness=x)
    lam = math.sqrt(max(float(uc @ jet.hess @ uc), 0.0))
    return NewtonState(np.asarray(x, float), from_coords(M, x, uc, basis), lam, jet.value, residual,
                       basis, jet.grad, jet.hess, uc)


def newton_step(field, x, sigma=None, state=None):
    """Full Newton step ``exp_x(u)``; with ``sigma`` the precondition ``sigma * lambda < 1`` is enforced."""
    st = state or newton_direction(field, x)
    if sigma is not None and not sigma * st.decrement < 1.0:
        raise UsageError(f"full Newton step needs sigma * lambda < 1, got {sigma * st.decrement!r}")
    y = field.manifold.exp(x, st.direction)
    if not field.domain_contains(y):
        raise DomainError("full Newton step left the domain")
    return y


def damped_step(field, x, sigma, state=None):
    """Damped Newton step ``exp_x(u / (1 + sigma * lambda))``."""
    if not sigma > 0:
        raise UsageError("sigma must be positive")
    st = state or newton_direction(field, x)
    y = field.manifold.exp(x, st.direction / (1.0 + sigma * st.decrement))
    if not field.domain_contains(y):
        raise InvariantError("damped Newton step left the domain", witness=(x, st.direction))
    return y


def quadratic_bound(sigma, lam):
    """Decrement bound after a full step: ``sigma lambda^2 / (1 - sigma lambda)^2``."""
    return sigma * lam * lam / (1.0 - sigma * lam) ** 2


def damped_cap(sigma, f0, lower_bound):
    if lower_bound is None:
        return 10_000
    return 10 * math.ceil(sigma**2 * max(f0 - lower_bound, 0.0) / omega(QUADRATIC_ENTRY)) + 100


def minimize(field, x0, sigma, lambda_target, lower_bound=None, full_cap=FULL_CAP):
    """Damped steps until ``lambda < 0.38/sigma``, then full steps until ``lambda <= lambda_target``.

    ``lower_bound`` (a known lower bound on the minimum) sets the damped-phase
    iteration cap.  Returns the final point, its :class:`NewtonState` and the trace.
    """
    if not sigma > 0:
        raise UsageError("sigma must be positive")
    if not field.domain_contains(x0):
        raise DomainError("starting point outside the domain")
    trace = SolveTrace()
    x = np.asarray(x0, float)
    st = newton_direction(field, x)
    cap = damped_cap(sigma, st.value, lower_bound)
    it = damped = full = 0
    while st.decrement > lambda_target:
        sl = sigma * st.decrement
        if sl < QUADRATIC_ENTRY:
            if full >= full_cap:
                raise ConvergenceError("full Newton phase exceeded its iteration cap", trace)
            bound = quadratic_bound(sigma, st.decrement)
            x = newton_step(field, x, state=st)
            new = newton_direction(field, x)
            rec = NewtonRecord(it, "full", st.decrement, st.value, bound, st.x)
            trace.records.append(rec)
            if new.decrement > bound + SLACK:
                raise InvariantError(f"quadratic contraction violated: {new.decrement!r} > {bound!r}", witness=rec)
            full += 1
        else:
            if damped >= cap:
                raise ConvergenceError("damped Newton phase exceeded its iteration cap", trace)
            drop = omega(sl) / sigma**2
            x = damped_step(field, x, sigma, state=st)
            new = newton_direction(field, x)
            rec = NewtonRecord(it, "damped", st.decrement, st.value, drop, st.x)
            trace.records.append(rec)
            if new.value - st.value > -drop + SLACK * max(1.0, abs(st.value)):
                raise InvariantError(f"damped descent violated: {new.value - st.value!r} > {-drop!r}", witness=rec)
            damped += 1
        st = new
        it += 1
    return x, st, trace


# -- transport-comparison form of the next Newton direction --------------------


def _pullback(field, x, u, t, b0):
    """``(T_t, Hf_t)``: frame map of ``tau_t`` from ``b0`` and the Hessian at ``exp_x(t u)``."""
    M = field.manifold
    y = M.exp(x, t * np.asarray(u, float))
    b1 = M.tangent_basis(y)
    T = np.array([coords(M, y, M.transport(x, y, b), b1) for b in b0]).T
    return T, field.jet(y, b1).hess, y, b1


def newton_identity_residual(field, x, epsabs=1e-12, epsrel=1e-11):
    """Relative mismatch in ``delta^{-1} u+ = u - int_0^1 delta_t^{-1} tau_t u dt``.

    ``u`` and ``u+`` are the Newton directions at ``x`` and ``exp_x u``; the
    integral is evaluated by adaptive quadrature.
    """
    st = newton_direction(field, x)
    M = field.manifold
    b0 = st.basis
    H0 = st.hess
    T1, H1, y, b1 = _pullback(field, x, st.direction, 1.0, b0)
    nxt = newton_direction(field, y)
    up_c = coords(M, y, nxt.direction, b1)
    lhs = linalg.solve(H0, T1.T @ H1 @ up_c, assume_a="pos")

    def integrand(t):
        T, Ht, _, _ = _pullback(field, x, st.direction, t, b0)
        return linalg.solve(H0, T.T @ Ht @ T @ st.uc, assume_a="pos")

    integral, _ = quad_vec(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel)
    rhs = st.uc - integral
    scale = max(math.sqrt(float(st.uc @ H0 @ st.uc)), 1e-300)
    diff = lhs - rhs
    return math.sqrt(max(float(diff @ H0 @ diff), 0.0)) / scale
