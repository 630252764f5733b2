"""Accelerated method for strongly convex-concave saddle problems.

The saddle problem is solved through its primal function
``g(x) = max_{y in Q_y} f(x, y)``. When the partial gradients of ``f`` are
Hoelder continuous with exponent ``nu`` (and ``grad_y f`` is Lipschitz in
``y``), ``grad g`` is Hoelder with exponent ``nu / (2 - nu)``, hence ``g``
admits an inexact ``(delta, L, mu_x)``-model. The outer loop is a fast
gradient method on that model; each outer step asks an accelerated inner
solver for ``y~`` within ``Delta~`` of ``argmax_y f(x, y)`` and uses
``grad_x f(x, y~)`` as the inexact gradient.
"""
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._inner import minimize_certified
from .errors import ConstantsMisdeclaredError, PlanningError, RejectedInputError, UncertifiedError
from .problems import saddle_gap
from .report import SolveReport

PLAN_MAX_SWEEPS = 100
PLAN_RTOL = 1e-12
INNER_MAX_ITER = 100_000


@dataclass(frozen=True)
class HolderProfile:
    L_tilde: float
    nu_tilde: float
    L_xx: float
    L_xy: float
    mu_y: float
    D: float
    nu: float


def holder_profile(L_xx, L_xy, mu_y, D, nu):
    """Hoelder constant and exponent of ``grad g`` for ``g(x) = max_y f(x, y)``.

    ``L~ = L_xy (2 L_xy / mu_y)^(nu / (2 - nu)) + L_xx D^((nu - nu^2) / (2 - nu))``
    and ``nu~ = nu / (2 - nu)``.
    """
    if not 0.0 <= nu <= 1.0:
        raise RejectedInputError("Hoelder exponent must lie in [0, 1]")
    if L_xx < 0 or L_xy < 0 or not mu_y > 0 or D < 0:
        raise RejectedInputError("need L_xx, L_xy >= 0, mu_y > 0 and D >= 0")
    a = nu / (2.0 - nu)
    b = (nu - nu * nu) / (2.0 - nu)
    L_tilde = L_xy * (2.0 * L_xy / mu_y) ** a + L_xx * D ** b
    return HolderProfile(L_tilde, a, L_xx, L_xy, mu_y, D, nu)


def model_L(L_tilde, nu_tilde, delta0):
    """Smoothness constant of the ``(delta0, L, mu)``-model of a Hoelder-gradient function.

    ``L = L~ (L~ / (2 delta0) * (1 - nu~) / (1 + nu~)) ^ ((1 - nu~) / (1 + nu~))``.
    """
    if not 0.0 <= nu_tilde <= 1.0:
        raise RejectedInputError("nu_tilde must lie in [0, 1]")
    if nu_tilde == 1.0:
        return float(L_tilde)
    if not delta0 > 0:
        raise RejectedInputError("delta0 must be positive when nu_tilde < 1 (L is unbounded)")
    e = (1.0 - nu_tilde) / (1.0 + nu_tilde)
    return float(L_tilde * (L_tilde / (2.0 * delta0) * e) ** e)


@dataclass
class TolerancePlan:
    epsilon: float
    delta0: float
    Delta: float
    Delta_tilde: float
    L: float
    outer_iters: int
    mu_x: float
    D: float
    R_x: float
    profile: HolderProfile
    sweeps: int = 0
    logs: dict = field(default_factory=dict)

    @property
    def delta(self):
        """Total model inexactness ``D * Delta + delta0``."""
        return self.D * self.Delta + self.delta0

    @property
    def accumulation(self):
        return 1.0 + math.sqrt(self.L / self.mu_x)

    def as_dict(self):
        return dict(epsilon=self.epsilon, delta0=self.delta0, Delta=self.Delta,
                    Delta_tilde=self.Delta_tilde, L=self.L, L_tilde=self.profile.L_tilde,
                    nu_tilde=self.profile.nu_tilde, delta=self.delta,
                    outer_iters=self.outer_iters, R_x=self.R_x, sweeps=self.sweeps,
                    **self.logs)


def outer_budget(L, mu_x, R_x, epsilon):
    """``ceil(2 sqrt(L / mu_x) log(2 L R_x^2 / eps))``, at least one step."""
    arg = 2.0 * L * R_x ** 2 / epsilon
    if arg <= 1.0:
        return 1
    return max(1, math.ceil(2.0 * math.sqrt(L / mu_x) * math.log(arg)))


def tolerance_plan(problem, epsilon):
    """Mutually consistent ``delta0``, ``L``, ``Delta``, ``Delta~`` and outer budget.

    ``L`` depends on ``delta0`` through :func:`model_L` and the cap on
    ``delta0`` depends on ``L``; the pair is found by fixed-point iteration on
    ``delta0 = eps / (4 (1 + sqrt(L(delta0) / mu_x)))``.
    """
    if not epsilon > 0:
        raise RejectedInputError("epsilon must be positive")
    mu_x = problem.mu_x
    if not (mu_x > 0 and problem.mu_y > 0):
        raise RejectedInputError("the accelerated method needs mu_x > 0 and mu_y > 0")
    D, R = problem.D, problem.R
    if not (np.isfinite(D) and np.isfinite(R)):
        raise RejectedInputError("Q_x and Q_y must be compact")
    prof = holder_profile(problem.L_xx, problem.L_xy, problem.mu_y, D, problem.nu)

    def cap(L):
        return epsilon / (4.0 * (1.0 + math.sqrt(L / mu_x)))

    sweeps = 0
    if prof.nu_tilde == 1.0:
        L = prof.L_tilde
        delta0 = cap(L)
    else:
        d = epsilon / 8.0
        for sweeps in range(1, PLAN_MAX_SWEEPS + 1):
            d_new = cap(model_L(prof.L_tilde, prof.nu_tilde, d))
            done = abs(d_new - d) <= PLAN_RTOL * d
            d = d_new
            if done:
                break
        else:
            raise PlanningError(f"delta0/L fixed point did not settle in {PLAN_MAX_SWEEPS} sweeps")
        # step just below the fixed point, where the cap holds strictly
        delta0 = d * (1.0 - 1e-9)
        L = model_L(prof.L_tilde, prof.nu_tilde, delta0)
        if delta0 > cap(L):
            raise PlanningError("fixed point violates the delta0 cap")
    Delta = epsilon / (4.0 * D * (1.0 + math.sqrt(L / mu_x))) if D > 0 else np.inf
    if problem.nu == 0.0:
        if problem.L_xy > Delta:
            raise PlanningError(
                f"nu = 0: gradient inexactness is stuck at L_xy = {problem.L_xy:g}, which "
                f"exceeds the allowed Delta = {Delta:g}")
        Delta_tilde = R
    elif problem.L_xy == 0.0:
        Delta_tilde = R
    else:
        Delta_tilde = min((Delta / problem.L_xy) ** (1.0 / problem.nu), R)
    R_x = D
    logs = {
        "inner_log": math.log(max(2.0 * problem.L_yy * R ** 2 / epsilon, 1.0)),
        "outer_log": math.log(max(2.0 * L * D ** 2 / epsilon, 1.0)),
    }
    return TolerancePlan(
        epsilon=epsilon, delta0=delta0, Delta=Delta, Delta_tilde=Delta_tilde, L=L,
        outer_iters=outer_budget(L, mu_x, R_x, epsilon), mu_x=mu_x, D=D, R_x=R_x,
        profile=prof, sweeps=sweeps, logs=logs)


@dataclass
class InnerMax:
    y: np.ndarray
    dist_bound: float
    iterations: int
    grad_calls: int


def inner_max_solve(problem, x, Delta_tilde, y0=None, max_iter=INNER_MAX_ITER):
    """``y~`` in ``Q_y`` with a certified ``||y~ - argmax_y f(x, y)|| <= Delta~``."""
    x = np.asarray(x, dtype=float)
    Qy = problem.Q_y
    start = Qy.interior_point() if y0 is None else y0
    res = minimize_certified(
        lambda y: -problem.f(x, y), lambda y: -problem.grad_y(x, y), Qy.project, start,
        problem.mu_y, problem.L_yy, dist_tol=Delta_tilde, diameter=Qy.diameter,
        max_iter=max_iter)
    if not res.certified:
        raise UncertifiedError(
            f"inner maximization stopped at distance bound {res.dist_bound:.3e} > {Delta_tilde:.3e}",
            residual=res.dist_bound, iterate=res.x)
    return InnerMax(res.x, res.dist_bound, res.iterations, res.grad_calls)


class ModelOracle:
    """Values and inexact gradients of ``g(x) = max_y f(x, y)`` under a plan."""

    def __init__(self, problem, plan):
        self.problem = problem
        self.plan = plan
        self.inner_iterations = 0
        self.inner_calls = 0
        self._y = None

    @property
    def L(self):
        return self.plan.L

    @property
    def mu(self):
        return self.plan.mu_x

    @property
    def delta(self):
        return self.plan.delta

    def argmax(self, x, warm=True):
        r = inner_max_solve(self.problem, x, self.plan.Delta_tilde,
                            y0=self._y if warm else None)
        self.inner_iterations += r.iterations
        self.inner_calls += r.grad_calls
        if warm:
            self._y = r.y
        return r.y

    def grad(self, x, warm=True):
        return self.problem.grad_x(x, self.argmax(x, warm))

    def value(self, x, tol=1e-12):
        """``g(x)``: closed form when the problem provides ``y_star``, else a tight inner solve."""
        p = self.problem
        if p.y_star is not None:
            return p.f(x, p.y_star(x))
        res = minimize_certified(
            lambda y: -p.f(x, y), lambda y: -p.grad_y(x, y), p.Q_y.project,
            p.Q_y.interior_point(), p.mu_y, p.L_yy, value_tol=tol)
        return -res.value


def model_audit(problem, plan, n_pairs=200, seed=0, rtol=1e-8):
    """Worst slack of the two-sided model inequality on random pairs.

    Checks ``mu/2 |d|^2 + <G, d> + g(x1) - delta <= g(x2) <= g(x1) + <G, d> + L/2 |d|^2 + delta``
    with ``G`` the inexact gradient at ``x1`` and ``d = x2 - x1``.
    Returns ``(worst_lower_slack, worst_upper_slack)``; both should be >= 0.
    """
    rng = np.random.default_rng(seed)
    oracle = ModelOracle(problem, plan)
    X1, X2 = problem.Q_x.sample(rng, n_pairs), problem.Q_x.sample(rng, n_pairs)
    lo = hi = np.inf
    for x1, x2 in zip(X1, X2):
        g1, g2 = oracle.value(x1), oracle.value(x2)
        G = oracle.grad(x1, warm=False)
        d = x2 - x1
        lin = g1 + float(G @ d)
        sq = float(d @ d)
        tol = rtol * (abs(g1) + abs(g2) + 1.0)
        lo = min(lo, g2 - (lin + 0.5 * plan.mu_x * sq - plan.delta) + tol)
        hi = min(hi, (lin + 0.5 * plan.L * sq + plan.delta) - g2 + tol)
    return lo, hi


def fgm_solve(problem, epsilon, x0=None, audit_pairs=0, certify=True, track_values=False,
              seed=0):
    """Fast gradient method on ``g(x) = max_y f(x, y)`` with inexact gradients.

    Uses the similar-triangles form for mu-strongly convex objectives:
    ``L a_{k+1}^2 = A_{k+1} (1 + mu A_k)``, gradient queried at the convex
    combination of ``u_k`` and ``x_k``, ``u_{k+1}`` minimizing the accumulated
    regularized linear models, ``x_{k+1}`` the same combination with ``u_{k+1}``.

    Returns ``(x~, y~, report)`` where ``y~`` is the certified inner maximizer at ``x~``.
    """
    t0 = time.perf_counter()
    plan = tolerance_plan(problem, epsilon)
    if audit_pairs:
        lo, hi = model_audit(problem, plan, audit_pairs, seed)
        if min(lo, hi) < 0:
            raise ConstantsMisdeclaredError(
                f"model inequality violated (lower slack {lo:.3e}, upper slack {hi:.3e})")
    Qx = problem.Q_x
    x_start = Qx.interior_point() if x0 is None else Qx.project(np.asarray(x0, dtype=float))
    oracle = ModelOracle(problem, plan)
    L, mu = plan.L, plan.mu_x
    x = u = x_start.copy()
    A = 0.0
    acc = np.zeros_like(x)
    A_hist, values = [], []
    for _ in range(plan.outer_iters):
        q = 1.0 + mu * A
        alpha = (q + math.sqrt(q * q + 4.0 * L * A * q)) / (2.0 * L)
        A_new = A + alpha
        y = (alpha * u + A * x) / A_new
        G = oracle.grad(y)
        acc += alpha * (mu * y - G)
        u = Qx.project((x_start + acc) / (1.0 + mu * A_new))
        x = (alpha * u + A * x) / A_new
        A = A_new
        A_hist.append(A)
        if track_values:
            values.append(oracle.value(x))
    y_out = inner_max_solve(problem, x, plan.Delta_tilde, y0=oracle._y).y
    gaps = []
    if certify:
        gaps.append(saddle_gap(problem, x, y_out, tol=epsilon * 1e-3))
    info = dict(plan=plan.as_dict(), inner_iterations=oracle.inner_iterations,
                inner_grad_calls=oracle.inner_calls, A_final=A,
                rate_bound=L * plan.R_x ** 2 * math.exp(-0.5 * plan.outer_iters * math.sqrt(mu / L))
                + plan.delta * plan.accumulation)
    if track_values:
        info["values"] = values
    report = SolveReport(
        solver="saddle-fgm", x=np.concatenate([x, y_out]), iterations=plan.outer_iters,
        oracle_calls=plan.outer_iters + oracle.inner_calls, wall_time=time.perf_counter() - t0,
        gaps=gaps, trace={"A": A_hist}, config=dict(epsilon=epsilon), info=info)
    return x, y_out, report
