"""Mirror Descent for variational inequalities with relatively bounded operators.

Relative boundedness replaces a bound on the dual norm of the operator by

    <g(x), y - x> <= M sqrt(2 V(y, x))    for all x, y in the set,

and sigma-monotonicity relaxes monotonicity to ``<g(y) - g(x), y - x> >= -sigma``.
With the constant step ``h = eps / M^2`` and ``N = ceil(2 R_sq M^2 / eps^2)``
steps, the uniform average of the iterates is an ``(eps + sigma)``-solution
whenever ``V(x*, x0) <= R_sq``.
"""
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, RejectedInputError
from .problems import vi_gap
from .prox import bregman, mirror_step
from .report import SolveReport


@dataclass
class MDConfig:
    epsilon: float
    M: float
    R_sq: float
    sigma: float = 0.0
    x0: np.ndarray = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise RejectedInputError("epsilon must be positive")
        if not self.M > 0:
            raise RejectedInputError("M must be positive")
        if not self.R_sq >= 0:
            raise RejectedInputError("R_sq must be nonnegative")
        if not self.sigma >= 0:
            raise RejectedInputError("sigma must be nonnegative")

    @property
    def step(self):
        return self.epsilon / self.M ** 2

    @property
    def iterations(self):
        return max(1, math.ceil(2.0 * self.R_sq * self.M ** 2 / self.epsilon ** 2))


def md_solve(op, setup, feasible, cfg, probes=None, certify=True, gap_budget=2000):
    """Run ``x_{k+1} = Mirr_{x_k}(h g(x_k))`` for ``N`` steps and average.

    ``probes`` is an optional array of points at which the one-step inequality

        h <g(x_k), x_k - z> <= h^2 M^2 / 2 + V(z, x_k) - V(z, x_{k+1})

    is audited every iteration; the worst violation lands in
    ``report.info["descent_violation"]``.
    """
    t0 = time.perf_counter()
    h, N = cfg.step, cfg.iterations
    x = feasible.interior_point() if cfg.x0 is None else np.asarray(cfg.x0, dtype=float)
    if not feasible.contains(x):
        raise RejectedInputError("x0 is not feasible")
    probes = None if probes is None else np.atleast_2d(np.asarray(probes, dtype=float))
    worst = -np.inf
    total = np.zeros_like(x)
    for k in range(N):
        g = op(x)
        if not np.all(np.isfinite(g)):
            raise NumericalError(f"non-finite operator value at iterate {k}", iterate=k)
        x_next = mirror_step(setup, feasible, x, h * g)
        if probes is not None:
            for z in probes:
                lhs = h * float(g @ (x - z))
                rhs = 0.5 * h ** 2 * cfg.M ** 2 + bregman(setup, z, x) - bregman(setup, z, x_next)
                worst = max(worst, lhs - rhs)
        total += x
        x = x_next
    x_avg = total / N

    gaps = []
    if certify and feasible.compact:
        gaps.append(vi_gap(op, feasible, x_avg, budget=gap_budget))
    return SolveReport(
        solver="md-rb", x=x_avg, iterations=N, oracle_calls=N,
        wall_time=time.perf_counter() - t0, gaps=gaps,
        config=dict(epsilon=cfg.epsilon, M=cfg.M, R_sq=cfg.R_sq, sigma=cfg.sigma),
        info=dict(
            step=h, N=N, last_iterate=x,
            descent_violation=None if probes is None else worst,
            gap_bound=0.5 * cfg.M ** 2 * h + cfg.R_sq / (N * h) + cfg.sigma,
            target=cfg.epsilon + cfg.sigma,
        ),
    )
