"""Operators, saddle problems, the saddle-to-VI reduction and gap certificates."""
from dataclasses import dataclass, field

import numpy as np

from . import sets as _sets
from ._inner import minimize_certified
from .errors import RejectedInputError
from .prox import bregman


@dataclass(eq=False)
class VIOperator:
    """A monotone-type operator ``x -> g(x)`` with optionally declared constants.

    ``affine=(A, b)`` marks ``g(x) = A x + b``, which enables exact gap
    certification. ``eval_inexact(x, delta)`` defaults to the exact oracle.
    """

    dim: int
    eval: callable
    eval_inexact: callable = None
    M: float = None
    sigma: float = None
    mu: float = None
    L: float = None
    holder: dict = None
    affine: tuple = None
    feasible: _sets.FeasibleSet = None
    solution: np.ndarray = None
    name: str = "operator"

    def __call__(self, x):
        return self.eval(x)

    def inexact(self, x, delta):
        if self.eval_inexact is None:
            return self.eval(x)
        return self.eval_inexact(x, delta)


@dataclass(eq=False)
class SaddleProblem:
    """``min_{x in Q_x} max_{y in Q_y} f(x, y)`` with declared smoothness constants.

    ``D`` and ``R`` are the l2 diameters of ``Q_x`` and ``Q_y``. ``y_star``,
    when given, is the closed-form inner maximizer ``x -> argmax_y f(x, y)``.
    """

    f: callable
    grad_x: callable
    grad_y: callable
    mu_x: float
    mu_y: float
    L_xx: float
    L_xy: float
    L_yy: float
    nu: float
    Q_x: _sets.FeasibleSet
    Q_y: _sets.FeasibleSet
    name: str = "saddle"
    y_star: callable = None
    solution: tuple = None
    affine_vi: tuple = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.nu <= 1.0:
            raise RejectedInputError("Hoelder exponent must lie in [0, 1]")

    @property
    def D(self):
        return self.Q_x.diameter

    @property
    def R(self):
        return self.Q_y.diameter

    @property
    def n(self):
        return self.Q_x.dim

    @property
    def m(self):
        return self.Q_y.dim


@dataclass
class GapCertificate:
    """A gap estimate with the strength of its certification.

    ``value`` is the reported gap. ``lower`` is attained by an explicit point,
    ``upper`` is a proven bound (``inf`` when nothing could be proven).
    """

    kind: str
    value: float
    method: str
    budget: int
    lower: float = -np.inf
    upper: float = np.inf
    certified: bool = False
    tolerance: float = np.inf

    def to_dict(self):
        return {k: (float(v) if isinstance(v, (float, np.floating)) else v)
                for k, v in self.__dict__.items()}


def saddle_to_vi(problem):
    """Operator ``G(x, y) = (grad_x f, -grad_y f)`` on ``Q_x x Q_y``."""
    n = problem.n
    feasible = _sets.Product([problem.Q_x, problem.Q_y])

    def G(z):
        x, y = z[:n], z[n:]
        return np.concatenate([problem.grad_x(x, y), -problem.grad_y(x, y)])

    mu = min(problem.mu_x, problem.mu_y)
    L = None
    if problem.nu == 1.0:
        L = max(problem.L_xx, problem.L_yy) + problem.L_xy
    sol = None
    if problem.solution is not None:
        sol = np.concatenate(problem.solution)
    return VIOperator(
        dim=feasible.dim, eval=G, mu=mu if mu > 0 else None, sigma=0.0, L=L,
        affine=problem.affine_vi, feasible=feasible, solution=sol,
        name=f"vi[{problem.name}]",
    )


def saddle_gap(problem, x_t, y_t, tol=1e-8, max_iter=100_000):
    """Certified upper bound on ``max_y f(x~, y) - min_x f(x, y~)``.

    Both inner problems are solved to value accuracy ``tol`` by the certified
    accelerated solver; ``value`` is a proven upper bound on the true gap and
    ``lower`` a value attained by explicit points, so the true gap lies in
    ``[lower, value]`` and ``value - lower <= 2 tol`` when certified.
    """
    x_t = np.asarray(x_t, dtype=float)
    y_t = np.asarray(y_t, dtype=float)
    Qx, Qy = problem.Q_x, problem.Q_y
    mx = minimize_certified(
        lambda y: -problem.f(x_t, y), lambda y: -problem.grad_y(x_t, y), Qy.project, y_t,
        problem.mu_y, problem.L_yy, value_tol=tol,
        lmo=(lambda c: Qy.linear_max(c)[0]) if Qy.compact else None, max_iter=max_iter)
    mn = minimize_certified(
        lambda x: problem.f(x, y_t), lambda x: problem.grad_x(x, y_t), Qx.project, x_t,
        problem.mu_x, max(problem.L_xx, 1e-12), value_tol=tol,
        lmo=(lambda c: Qx.linear_max(c)[0]) if Qx.compact else None, max_iter=max_iter)
    attained = -mx.value - mn.value
    upper = attained + mx.value_bound + mn.value_bound
    certified = mx.certified and mn.certified
    return GapCertificate(
        kind="saddle", value=float(upper), lower=float(attained), upper=float(upper),
        method="accelerated-inner-solves", budget=mx.grad_calls + mn.grad_calls,
        certified=certified, tolerance=float(upper - attained))


def vi_gap(op, feasible, x_t, budget=2000, tol=1e-9, seed=0):
    """Restricted gap ``max_{x in set} <g(x), x~ - x>``.

    Affine monotone operators on compact sets get an exact, certified value
    (accelerated ascent closed by a Frank-Wolfe bound). Otherwise the value is
    a sampled lower bound refined by local ascent, and when the operator
    declares ``sigma`` the monotone bound ``<g(x~), x~ - x> + sigma`` supplies
    a proven upper bound.
    """
    x_t = np.asarray(x_t, dtype=float)
    if not feasible.compact:
        raise RejectedInputError("gap certification needs a compact feasible set")

    if op.affine is not None:
        A, b = (np.asarray(a, dtype=float) for a in op.affine)
        return _affine_gap(A, b, feasible, x_t, tol, budget)

    def h(x):
        return float(op(x) @ (x_t - x))

    rng = np.random.default_rng(seed)
    n_samples = max(budget // 2, 1)
    pts = np.vstack([x_t[None, :], feasible.sample(rng, n_samples)])
    vals = np.array([h(p) for p in pts])
    calls = len(pts)
    order = np.argsort(vals)[::-1][:3]
    best = float(vals.max())
    for i in order:
        x, v, used = _local_ascent(h, feasible, pts[i], max(budget - calls, 0) // len(order))
        calls += used
        best = max(best, v)
    upper = np.inf
    if op.sigma is not None:
        gx = op(x_t)
        upper = float(gx @ x_t + feasible.linear_max(-gx)[0] + op.sigma)
    return GapCertificate(
        kind="vi-restricted", value=best, lower=best, upper=upper,
        method="sampled-local-ascent" + ("+monotone-bound" if np.isfinite(upper) else ""),
        budget=calls, certified=bool(upper - best <= tol), tolerance=float(upper - best))


def _affine_gap(A, b, feasible, x_t, tol, budget):
    # h(x) = <Ax + b, x~ - x>, concave when sym(A) is PSD
    sym = A + A.T
    eig = np.linalg.eigvalsh(sym)
    if eig[0] < -1e-12:
        raise RejectedInputError("affine operator is not monotone; exact gap is unavailable")
    c = A.T @ x_t - b

    def neg_h(x):
        return float(x @ (A @ x) - c @ x - b @ x_t)

    def neg_grad(x):
        return sym @ x - c

    res = minimize_certified(
        neg_h, neg_grad, feasible.project, x_t, max(eig[0], 0.0), max(eig[-1], 1e-12),
        value_tol=tol, lmo=lambda v: feasible.linear_max(v)[0],
        max_iter=max(budget, 10) * 50)
    lower = -res.value
    upper = lower + res.value_bound
    return GapCertificate(
        kind="vi-restricted", value=float(upper), lower=float(lower), upper=float(upper),
        method="affine-exact", budget=res.grad_calls, certified=res.certified,
        tolerance=float(res.value_bound))


def _local_ascent(h, feasible, x, budget, step=0.1):
    # finite-difference projected ascent; each gradient costs 2 * dim calls
    dim = x.size
    used = 0
    v = h(x)
    fd = 1e-6
    while used + 2 * dim + 1 <= budget and step > 1e-10:
        g = np.empty(dim)
        for i in range(dim):
            e = np.zeros(dim)
            e[i] = fd
            g[i] = (h(feasible.project(x + e)) - h(feasible.project(x - e))) / (2 * fd)
        used += 2 * dim
        cand = feasible.project(x + step * g)
        vc = h(cand)
        used += 1
        if vc > v:
            x, v = cand, vc
            step *= 1.5
        else:
            step *= 0.5
    return x, v, used


# ---------------------------------------------------------------- audits


@dataclass
class AuditResult:
    name: str
    worst: float
    passed: bool
    pairs: int

    def __str__(self):
        return f"{self.name}: worst slack {self.worst:.3e} over {self.pairs} pairs -> " + (
            "ok" if self.passed else "VIOLATED")


def audit_monotone(op, feasible, n_pairs=1000, seed=0, tol=1e-8):
    """Check ``<g(y) - g(x), y - x> >= mu ||y - x||^2 - sigma`` on random pairs."""
    rng = np.random.default_rng(seed)
    X, Y = feasible.sample(rng, n_pairs), feasible.sample(rng, n_pairs)
    mu = op.mu or 0.0
    sigma = op.sigma or 0.0
    worst = np.inf
    for x, y in zip(X, Y):
        d = y - x
        worst = min(worst, float((op(y) - op(x)) @ d) - mu * float(d @ d) + sigma)
    return AuditResult(f"monotonicity[{op.name}]", worst, worst >= -tol, n_pairs)


def audit_relative_bounded(op, setup, feasible, M=None, n_pairs=1000, seed=0, tol=1e-8):
    """Check ``<g(x), y - x> <= M sqrt(2 V(y, x))`` on random pairs."""
    M = op.M if M is None else M
    rng = np.random.default_rng(seed)
    X, Y = feasible.sample(rng, n_pairs), feasible.sample(rng, n_pairs)
    worst = np.inf
    for x, y in zip(X, Y):
        lhs = float(op(x) @ (y - x))
        worst = min(worst, M * np.sqrt(2.0 * bregman(setup, y, x)) - lhs)
    return AuditResult(f"relative-boundedness[{op.name}]", worst, worst >= -tol, n_pairs)


def audit_saddle_constants(problem, n_pairs=1000, seed=0, tol=1e-6):
    """Strong convexity/concavity and the four Hoelder bounds on random pairs."""
    rng = np.random.default_rng(seed)
    X1, X2 = problem.Q_x.sample(rng, n_pairs), problem.Q_x.sample(rng, n_pairs)
    Y1, Y2 = problem.Q_y.sample(rng, n_pairs), problem.Q_y.sample(rng, n_pairs)
    nu = problem.nu
    worst = {k: np.inf for k in ("strong_convexity", "strong_concavity",
                                 "L_xx", "L_xy", "L_yx", "L_yy")}
    for x1, x2, y1, y2 in zip(X1, X2, Y1, Y2):
        dx, dy = x1 - x2, y1 - y2
        nx, ny = np.linalg.norm(dx), np.linalg.norm(dy)
        gx11, gx21 = problem.grad_x(x1, y1), problem.grad_x(x2, y1)
        gy11, gy12 = problem.grad_y(x1, y1), problem.grad_y(x1, y2)
        gx12, gy21 = problem.grad_x(x1, y2), problem.grad_y(x2, y1)
        _upd(worst, "strong_convexity", float((gx11 - gx21) @ dx) - problem.mu_x * nx ** 2)
        _upd(worst, "strong_concavity", -float((gy11 - gy12) @ dy) - problem.mu_y * ny ** 2)
        _upd(worst, "L_xx", problem.L_xx * nx ** nu - np.linalg.norm(gx11 - gx21))
        _upd(worst, "L_xy", problem.L_xy * ny ** nu - np.linalg.norm(gx11 - gx12))
        _upd(worst, "L_yx", problem.L_xy * nx ** nu - np.linalg.norm(gy11 - gy21))
        _upd(worst, "L_yy", problem.L_yy * ny - np.linalg.norm(gy11 - gy12))
    return [AuditResult(f"{k}[{problem.name}]", v, v >= -tol, n_pairs) for k, v in worst.items()]


def _upd(store, key, val):
    store[key] = min(store[key], float(val))


def fd_gradient(fun, x, h=1e-6):
    """Central finite-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g


def fd_relative_error(fun, grad, x, h=1e-6):
    g = np.asarray(grad(x), dtype=float)
    fd = fd_gradient(fun, x, h)
    return float(np.linalg.norm(g - fd) / max(np.linalg.norm(fd), np.linalg.norm(g), 1.0))


# ---------------------------------------------------------------- built-ins


def bilinear_saddle(n=3, m=3, radius=1.0, seed=0):
    """``f = x^T B y + a^T x + b^T y`` on balls, with an interior saddle point."""
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, m))
    U, s, Vt = np.linalg.svd(B, full_matrices=False)
    s = np.clip(s, 0.5, None)
    B = U @ np.diag(s) @ Vt
    x_star = 0.3 * radius * _unit(rng.standard_normal(n))
    y_star = 0.3 * radius * _unit(rng.standard_normal(m))
    a = -B @ y_star
    b = -B.T @ x_star
    L = float(np.linalg.norm(B, 2))
    Qx, Qy = _sets.Ball(n, radius), _sets.Ball(m, radius)
    return SaddleProblem(
        f=lambda x, y: float(x @ B @ y + a @ x + b @ y),
        grad_x=lambda x, y: B @ y + a,
        grad_y=lambda x, y: B.T @ x + b,
        mu_x=0.0, mu_y=0.0, L_xx=0.0, L_xy=L, L_yy=0.0, nu=1.0, Q_x=Qx, Q_y=Qy,
        name="bilinear", solution=(x_star, y_star),
        affine_vi=(np.block([[np.zeros((n, n)), B], [-B.T, np.zeros((m, m))]]),
                   np.concatenate([a, -b])),
        params=dict(n=n, m=m, radius=radius, seed=seed, B=B, a=a, b=b))


def quadratic_saddle(n=3, m=2, mu_x=1.0, mu_y=1.0, radius=3.0, coupling=1.0, spread=0.0,
                     y_radius=None, seed=0):
    """``f = 1/2 (x-a)^T P (x-a) + x^T B y - 1/2 (y-b)^T S (y-b)`` on balls.

    With ``spread = 0`` the curvatures are ``P = mu_x I`` and ``S = mu_y I``;
    a positive ``spread`` adds random PSD parts with spectral norm
    ``spread * mu``, so ``L_xx`` and ``L_yy`` exceed the moduli. The saddle
    point solves a linear system and must sit inside both balls.
    """
    rng = np.random.default_rng(seed)
    B = coupling * rng.standard_normal((n, m)) / np.sqrt(max(n, m))
    a = 0.5 * _unit(rng.standard_normal(n))
    b = 0.5 * _unit(rng.standard_normal(m))
    P = mu_x * (np.eye(n) + spread * _rand_psd(rng, n))
    S = mu_y * (np.eye(m) + spread * _rand_psd(rng, m))
    K = np.block([[P, B], [B.T, -S]])
    rhs = np.concatenate([P @ a, -S @ b])
    z = np.linalg.solve(K, rhs)
    x_star, y_star = z[:n], z[n:]
    Qx = _sets.Ball(n, radius)
    Qy = _sets.Ball(m, radius if y_radius is None else y_radius)
    if not (Qx.contains(x_star) and Qy.contains(y_star)):
        raise RejectedInputError("saddle point falls outside the balls; enlarge the radius")
    L_xy = float(np.linalg.norm(B, 2))
    A_vi = np.block([[P, B], [-B.T, S]])
    b_vi = np.concatenate([-P @ a, -S @ b])
    S_inv = np.linalg.inv(S)

    def y_star_of(x):
        y = b + S_inv @ (B.T @ x)
        if Qy.contains(y, tol=0.0):
            return y
        if spread == 0.0:
            # isotropic curvature: the constrained maximizer is a projection
            return Qy.project(y)
        return None

    return SaddleProblem(
        f=lambda x, y: float(0.5 * (x - a) @ P @ (x - a) + x @ B @ y
                             - 0.5 * (y - b) @ S @ (y - b)),
        grad_x=lambda x, y: P @ (x - a) + B @ y,
        grad_y=lambda x, y: B.T @ x - S @ (y - b),
        mu_x=float(np.linalg.eigvalsh(P)[0]), mu_y=float(np.linalg.eigvalsh(S)[0]),
        L_xx=float(np.linalg.eigvalsh(P)[-1]), L_xy=L_xy, L_yy=float(np.linalg.eigvalsh(S)[-1]),
        nu=1.0, Q_x=Qx, Q_y=Qy, name="quadratic-saddle",
        y_star=y_star_of if spread == 0.0 else None,
        solution=(x_star, y_star), affine_vi=(A_vi, b_vi),
        params=dict(n=n, m=m, mu_x=mu_x, mu_y=mu_y, radius=radius, coupling=coupling,
                    spread=spread, seed=seed, y_star_unconstrained=y_star_of))


def separable_saddle(n=2, m=2, mu_x=1.0, mu_y=1.0, radius=1.0):
    """``f = mu_x/2 ||x||^2 - mu_y/2 ||y||^2``; saddle point at the origin."""
    Qx, Qy = _sets.Ball(n, radius), _sets.Ball(m, radius)
    return SaddleProblem(
        f=lambda x, y: float(0.5 * mu_x * x @ x - 0.5 * mu_y * y @ y),
        grad_x=lambda x, y: mu_x * x,
        grad_y=lambda x, y: -mu_y * y,
        mu_x=mu_x, mu_y=mu_y, L_xx=mu_x, L_xy=0.0, L_yy=mu_y, nu=1.0, Q_x=Qx, Q_y=Qy,
        name="separable", y_star=lambda x: np.zeros(m),
        solution=(np.zeros(n), np.zeros(m)),
        affine_vi=(np.diag(np.r_[np.full(n, mu_x), np.full(m, mu_y)]), np.zeros(n + m)),
        params=dict(n=n, m=m, mu_x=mu_x, mu_y=mu_y, radius=radius))


def affine_vi(dim=2, mu=1.0, skew=0.0, radius=1.0, x_star=None, seed=0):
    """``g(x) = A (x - x*)`` with ``A = mu I + skew * S`` (S skew-symmetric) on a ball.

    Declares ``mu``, ``sigma = 0``, ``L = ||A||`` and the Euclidean relative
    boundedness constant ``M = ||A|| (radius + ||x*||)``.
    """
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((dim, dim))
    S = skew * (S - S.T) / 2.0
    A = mu * np.eye(dim) + S
    x_star = np.zeros(dim) if x_star is None else np.asarray(x_star, dtype=float)
    feasible = _sets.Ball(dim, radius)
    if not feasible.contains(x_star):
        raise RejectedInputError("x* must lie in the ball")
    nrm = float(np.linalg.norm(A, 2))
    return VIOperator(
        dim=dim, eval=lambda x: A @ (x - x_star), M=nrm * (radius + np.linalg.norm(x_star)),
        sigma=0.0, mu=mu if mu > 0 else None, L=nrm, affine=(A, -A @ x_star),
        feasible=feasible, solution=x_star, name="affine-vi")


def skew_vi(radius=1.0):
    """``g(x, y) = (y, -x)`` on a disc: monotone, not strongly; solution at 0."""
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return VIOperator(
        dim=2, eval=lambda z: A @ z, M=radius, sigma=0.0, L=1.0, affine=(A, np.zeros(2)),
        feasible=_sets.Ball(2, radius), solution=np.zeros(2), name="skew")


def constant_vi(c, feasible):
    c = np.asarray(c, dtype=float)
    return VIOperator(
        dim=c.size, eval=lambda x: c.copy(), M=float(np.linalg.norm(c)), sigma=0.0,
        affine=(np.zeros((c.size, c.size)), c), feasible=feasible, name="constant")


def _unit(v):
    return v / np.linalg.norm(v)


def _rand_psd(rng, k):
    W = rng.standard_normal((k, k))
    W = W @ W.T
    return W / np.linalg.norm(W, 2)
