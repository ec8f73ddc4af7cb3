"""Short-step path-following for ``min l(x)`` over the domain of a ``nu``-self-concordant barrier.

The central path is ``t -> argmin t l + F``.  Each step raises ``t`` by
``alpha / ||Dl||*`` and takes one full Newton step for ``t l + F``; the
decrement bound and the geometric growth of ``t`` are asserted after every
step, and ``(nu + (beta + sqrt nu) beta / (1 - beta)) / t`` bounds the gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import linalg

from .errors import ConvergenceError, DomainError, InvariantError, UsageError
from .fields import _cholesky, coords, dual_norm_coords, from_coords
from .newton import minimize

SLACK = 1e-9
ITER_C = 50


@dataclass(frozen=True)
class BarrierProblem:
    """``min objective`` over ``{barrier < inf}``.

    ``gap_range`` is an a-priori bound on ``objective(x) - min`` over the
    domain (``inf`` when unknown); it serves as the certificate at ``t = 0``.
    """

    objective: object
    barrier: object
    nu: float
    sc_sigma: float = 1.0
    gap_range: float = math.inf
    barrier_lower_bound: float = None

    @property
    def manifold(self):
        return self.barrier.manifold


@dataclass(frozen=True)
class PathParams:
    beta: float = 1.0 / 9.0

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0 or not self.alpha > 0.0:
            raise UsageError(f"beta must satisfy 0 < beta < sqrt(beta)/(1 + sqrt(beta)), got {self.beta!r}")

    @property
    def alpha(self):
        rb = math.sqrt(self.beta)
        return rb / (1.0 + rb) - self.beta


@dataclass(frozen=True)
class CentralPathState:
    x: np.ndarray
    t: float
    decrement: float
    gap_bound: float
    objective: float


@dataclass(frozen=True)
class PathRecord:
    iter: int
    phase: str  # "centering" or "path"
    t: float
    decrement: float
    objective: float
    gap_bound: float = None


@dataclass
class PathTrace:
    records: list = dc_field(default_factory=list)
    centering_iterations: int = 0
    path_iterations: int = 0
    iteration_bound: float = None
    dl_dual0: float = None


def gap_bound(problem, t, params=PathParams()):
    """``(nu + (beta + sqrt nu) beta / (1 - beta)) / t``."""
    if not t > 0:
        raise UsageError("gap bound needs t > 0")
    b, nu = params.beta, problem.nu
    return (nu + (b + math.sqrt(nu)) * b / (1.0 - b)) / t


def _frame(problem, x):
    M = problem.manifold
    basis = M.tangent_basis(x)
    jF = problem.barrier.jet(x, basis)
    jl = problem.objective.jet(x, basis)
    return basis, jF, jl


def _decrement(problem, x, t):
    _, jF, jl = _frame(problem, x)
    return dual_norm_coords(jF.hess, t * jl.grad + jF.grad)


def analytic_center(problem, x_start, params=PathParams()):
    """Damped Newton on the barrier alone until ``lambda_F <= beta``."""
    x_start = np.asarray(x_start, float)
    if not problem.barrier.domain_contains(x_start):
        raise DomainError("start point is not strictly feasible")
    x, st, trace = minimize(problem.barrier, x_start, problem.sc_sigma, params.beta,
                            lower_bound=problem.barrier_lower_bound)
    state = CentralPathState(x, 0.0, st.decrement, problem.gap_range, problem.objective.value(x))
    return state, trace


def pf_step(problem, state, params=PathParams()):
    """Raise ``t`` and take one full Newton step for ``t l + F``."""
    if state.decrement > params.beta + SLACK:
        raise UsageError("pf_step needs decrement <= beta")
    M = problem.manifold
    x, t = state.x, state.t
    basis, jF, jl = _frame(problem, x)
    if np.any(jl.hess != 0.0):
        raise InvariantError("objective is not affine along geodesics")
    # Hessian of t l + F is HF exactly
    Ht = t * jl.hess + jF.hess
    if not np.array_equal(Ht, jF.hess):
        raise InvariantError("Hessian of t l + F differs from HF")
    dl = dual_norm_coords(jF.hess, jl.grad)
    t_new = t + params.alpha / dl
    if t > 0:
        growth = 1.0 + params.alpha / (params.beta + math.sqrt(problem.nu))
        if t_new / t < growth - SLACK:
            raise InvariantError(f"t grew by {t_new / t!r} < {growth!r}", witness=state)
    g = t_new * jl.grad + jF.grad
    uc = -linalg.cho_solve(_cholesky(Ht), g)
    y = M.exp(x, from_coords(M, x, uc, basis))
    if not problem.barrier.domain_contains(y):
        raise InvariantError("path-following step left the domain", witness=state)
    lam = _decrement(problem, y, t_new)
    if lam > params.beta + SLACK:
        raise InvariantError(f"decrement {lam!r} exceeds beta = {params.beta!r} after a step", witness=state)
    return CentralPathState(y, t_new, lam, gap_bound(problem, t_new, params), problem.objective.value(y))


def iteration_bound(problem, dl_dual0, epsilon, c=ITER_C):
    """``c sqrt(nu) log(nu ||Dl_x0||* / epsilon) + c``."""
    arg = problem.nu * dl_dual0 / epsilon
    return c * math.sqrt(problem.nu) * max(math.log(arg), 0.0) + c


def solve(problem, x_start, epsilon, params=PathParams()):
    """Centre, then follow the path until the gap bound is at most ``epsilon``."""
    if not epsilon > 0:
        raise UsageError("epsilon must be positive")
    state, ntrace = analytic_center(problem, x_start, params)
    trace = PathTrace()
    for r in ntrace.records:
        trace.records.append(PathRecord(r.iter, "centering", 0.0, r.decrement, problem.objective.value(r.x)))
    trace.records.append(PathRecord(len(ntrace.records), "centering", 0.0, state.decrement, state.objective))
    trace.centering_iterations = len(ntrace.records)
    _, jF, jl = _frame(problem, state.x)
    trace.dl_dual0 = dual_norm_coords(jF.hess, jl.grad)
    trace.iteration_bound = iteration_bound(problem, trace.dl_dual0, epsilon)
    if state.gap_bound <= epsilon:
        return state, trace
    k = 0
    while state.t == 0.0 or state.gap_bound > epsilon:
        if k >= trace.iteration_bound:
            raise ConvergenceError(f"path-following exceeded {trace.iteration_bound:.1f} iterations", trace)
        state = pf_step(problem, state, params)
        k += 1
        trace.records.append(PathRecord(k, "path", state.t, state.decrement, state.objective, state.gap_bound))
    trace.path_iterations = k
    return state, trace


def scb_direction_check(barrier, nu, x, y):
    """``DF_x(log_x y)`` for feasible ``y``; a ``nu``-barrier keeps it below ``nu``."""
    M = barrier.manifold
    basis = M.tangent_basis(x)
    jet = barrier.jet(x, basis)
    val = float(jet.grad @ coords(M, x, M.log(x, y), basis))
    return val < nu, val
