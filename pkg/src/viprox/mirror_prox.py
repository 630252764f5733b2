"""Universal Mirror Prox and its restarted variant.

Each UMP iteration takes two mirror steps from ``z_k`` with a trial constant
``M_k`` (the extragradient pair ``w_k``, ``z_{k+1}``) and doubles ``M_k``
until

    <g(w_k) - g(z_k), w_k - z_{k+1}> <= M_k/2 (||w_k - z_k||^2 + ||w_k - z_{k+1}||^2)
                                         + eps/2 + delta.

The next iteration starts from half the accepted constant, so the method
adapts to whatever Hoelder smoothness the operator has. The output is the
average of the ``w_k`` weighted by ``1 / M_k``.

The restarted variant runs UMP until ``sum 1/M_k >= Omega / mu`` inside a
prox-function recentred at the latest output and shrunk to radius ``R_p``.
"""
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, NumericalError, RejectedInputError
from .problems import vi_gap
from .prox import argmin_d, mirror_step, scaled_prox
from .report import SolveReport

MAX_DOUBLINGS = 60


@dataclass
class UMPConfig:
    """Stop after ``max_iter`` iterations and/or once ``sum 1/M_k >= inv_M_threshold``.

    ``delta`` defaults to ``epsilon / 2``. When ``x0`` is given the prox-function
    is translated so that its minimizer over the set is ``x0``.
    """

    epsilon: float
    L0: float = 1.0
    delta: float = None
    max_iter: int = None
    inv_M_threshold: float = None
    x0: np.ndarray = None
    max_doublings: int = MAX_DOUBLINGS
    keep_points: bool = True

    def __post_init__(self):
        if not self.epsilon > 0:
            raise RejectedInputError("epsilon must be positive")
        if not self.L0 > 0:
            raise RejectedInputError("L0 must be positive")
        if self.delta is None:
            self.delta = self.epsilon / 2.0
        if self.delta < 0:
            raise RejectedInputError("delta must be nonnegative")
        if self.max_iter is None and self.inv_M_threshold is None:
            raise RejectedInputError("UMP needs a stop rule: max_iter or inv_M_threshold")


@dataclass
class RestartConfig:
    """Inputs of the restarted method; ``omega`` defaults to the setup's own constant.

    The inner UMP runs use ``inner_epsilon`` (default ``epsilon / 2``) and
    ``delta`` (default 0).
    """

    epsilon: float
    mu: float
    R0_sq: float
    x0: np.ndarray
    omega: float = None
    delta: float = 0.0
    L0: float = 1.0
    inner_epsilon: float = None
    max_inner_iter: int = 1_000_000
    max_doublings: int = MAX_DOUBLINGS
    keep_points: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise RejectedInputError("epsilon must be positive")
        if not self.mu > 0:
            raise RejectedInputError("mu must be positive")
        if not self.R0_sq > 0:
            raise RejectedInputError("R0_sq must be positive")
        if self.omega is not None and not self.omega > 0:
            raise RejectedInputError("omega must be positive")
        if self.inner_epsilon is None:
            self.inner_epsilon = self.epsilon / 2.0


def _ump_core(op, setup, feasible, eps, delta, L0, max_iter, inv_threshold,
              max_doublings, keep_points):
    z = argmin_d(setup, feasible)
    L = L0
    inv_sum = 0.0
    acc = np.zeros_like(z)
    calls = 0
    trace = {"M": [], "trials": [], "inv_M_sum": [], "w": [], "z": []}
    k = 0
    while True:
        gz = op.inexact(z, delta)
        calls += 1
        if not np.all(np.isfinite(gz)):
            raise NumericalError(f"non-finite operator value at iteration {k}", iterate=z)
        M = L / 2.0
        trials = 0
        while True:
            M *= 2.0
            trials += 1
            if trials > max_doublings:
                raise DivergenceError(
                    f"line search exceeded {max_doublings} doublings at iteration {k}",
                    last_M=M / 2.0, iteration=k)
            w = mirror_step(setup, feasible, z, gz / M)
            gw = op.inexact(w, delta)
            calls += 1
            if not np.all(np.isfinite(gw)):
                raise NumericalError(f"non-finite operator value at iteration {k}", iterate=w)
            z_next = mirror_step(setup, feasible, z, gw / M)
            lhs = float((gw - gz) @ (w - z_next))
            rhs = 0.5 * M * (setup.norm(w - z) ** 2 + setup.norm(w - z_next) ** 2) \
                + 0.5 * eps + delta
            if lhs <= rhs:
                break
        inv_sum += 1.0 / M
        acc += w / M
        trace["M"].append(M)
        trace["trials"].append(trials)
        trace["inv_M_sum"].append(inv_sum)
        if keep_points:
            trace["w"].append(w)
            trace["z"].append(z_next)
        L = M / 2.0
        z = z_next
        k += 1
        if max_iter is not None and k >= max_iter:
            break
        if inv_threshold is not None and inv_sum >= inv_threshold:
            break
    return acc / inv_sum, trace, calls, L


def ump_solve(op, setup, feasible, cfg, certify=True, gap_budget=2000):
    """Universal Mirror Prox from ``z_0 = argmin_set d``."""
    t0 = time.perf_counter()
    if cfg.x0 is not None:
        x0 = np.asarray(cfg.x0, dtype=float)
        if not feasible.contains(x0):
            raise RejectedInputError("x0 is not feasible")
        c = np.zeros(setup.dim) if setup.center is None else setup.center
        setup = scaled_prox(setup, x0 - c, 1.0)
    z_out, trace, calls, _ = _ump_core(
        op, setup, feasible, cfg.epsilon, cfg.delta, cfg.L0, cfg.max_iter,
        cfg.inv_M_threshold, cfg.max_doublings, cfg.keep_points)
    gaps = []
    if certify and feasible.compact:
        gaps.append(vi_gap(op, feasible, z_out, budget=gap_budget))
    return SolveReport(
        solver="ump", x=z_out, iterations=len(trace["M"]), oracle_calls=calls,
        wall_time=time.perf_counter() - t0, gaps=gaps, trace=trace,
        config=dict(epsilon=cfg.epsilon, L0=cfg.L0, delta=cfg.delta, max_iter=cfg.max_iter,
                    inv_M_threshold=cfg.inv_M_threshold),
        info=dict(z0=argmin_d(setup, feasible), max_M=max(trace["M"])),
    )


def restart_radius_sq(p, R0_sq, eps, mu):
    """``R_p^2 = R0^2 2^-p + 2 (1 - 2^-p) eps / (4 mu)``."""
    q = 2.0 ** (-p)
    return R0_sq * q + 2.0 * (1.0 - q) * eps / (4.0 * mu)


def restart_count(eps, R0_sq):
    """Number of outer rounds: the first ``p`` with ``p > log2(2 R0^2 / eps)``."""
    bound = math.log2(2.0 * R0_sq / eps)
    return max(math.floor(bound) + 1, 1)


def restarted_ump(op, setup, feasible, cfg, certify=True, gap_budget=2000):
    t0 = time.perf_counter()
    x = np.asarray(cfg.x0, dtype=float)
    if not feasible.contains(x):
        raise RejectedInputError("x0 is not feasible")
    omega = setup.omega if cfg.omega is None else cfg.omega
    threshold = omega / cfg.mu
    bound = math.log2(2.0 * cfg.R0_sq / cfg.epsilon)
    R_sq = cfg.R0_sq
    L = cfg.L0
    p = 0
    records = []
    trace = {"M": [], "trials": [], "inv_M_sum": [], "restart": []}
    total_iter = calls = 0
    while True:
        setup_p = scaled_prox(setup, x, math.sqrt(R_sq))
        try:
            x, tr, c, L = _ump_core(
                op, setup_p, feasible, cfg.inner_epsilon, cfg.delta, L, cfg.max_inner_iter,
                threshold, cfg.max_doublings, cfg.keep_points)
        except DivergenceError as exc:
            exc.restart = p
            raise
        p += 1
        n_it = len(tr["M"])
        total_iter += n_it
        calls += c
        for key in ("M", "trials", "inv_M_sum"):
            trace[key].extend(tr[key])
        trace["restart"].extend([p - 1] * n_it)
        R_sq = restart_radius_sq(p, cfg.R0_sq, cfg.epsilon, cfg.mu)
        rec = dict(p=p, inner_iterations=n_it, R_sq=R_sq, inv_M_sum=tr["inv_M_sum"][-1])
        if op.solution is not None:
            rec["dist_sq"] = float(np.sum((x - op.solution) ** 2))
        records.append(rec)
        if p > bound:
            break
    gaps = []
    if certify and feasible.compact:
        gaps.append(vi_gap(op, feasible, x, budget=gap_budget))
    return SolveReport(
        solver="rump", x=x, iterations=total_iter, oracle_calls=calls,
        wall_time=time.perf_counter() - t0, gaps=gaps, trace=trace, restarts=records,
        config=dict(epsilon=cfg.epsilon, mu=cfg.mu, R0_sq=cfg.R0_sq, omega=omega,
                    delta=cfg.delta, inner_epsilon=cfg.inner_epsilon, L0=cfg.L0),
        info=dict(restart_count=p, R_sq_schedule=[r["R_sq"] for r in records]),
    )
