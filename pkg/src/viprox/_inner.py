"""Certified accelerated projected-gradient solver for inner subproblems.

The certificates come from the composite residual at the projected point
``x+ = P(y - grad f(y) / L)``:

    s = L (y - x+) + grad f(x+) - grad f(y)   lies in   grad f(x+) + N_Q(x+)

so for a mu-strongly convex objective ``||x+ - x*|| <= ||s|| / mu`` and
``f(x+) - f* <= ||s||^2 / (2 mu)``. When a linear-minimization oracle is
available the Frank-Wolfe gap ``<grad f(x+), x+ - u>`` is used as a second,
curvature-free value bound.
"""
from dataclasses import dataclass

import numpy as np


@dataclass
class InnerResult:
    x: np.ndarray
    value: float
    dist_bound: float
    value_bound: float
    iterations: int
    grad_calls: int
    certified: bool


def minimize_certified(fun, grad, project, x0, mu, L, *, dist_tol=None, value_tol=None,
                       lmo=None, diameter=np.inf, max_iter=100_000):
    """Minimize a mu-strongly convex ``fun`` over a set given by ``project``.

    Stops as soon as the requested distance and/or value certificate holds.
    ``lmo(c)`` should return ``max_{u in Q} <c, u>``; it enables the
    Frank-Wolfe bound, which is what certifies values when ``mu == 0``.
    """
    x = project(np.asarray(x0, dtype=float))
    if dist_tol is not None and value_tol is None and dist_tol >= diameter:
        return InnerResult(x, fun(x), float(diameter), np.inf, 0, 0, True)

    L = max(float(L), 1e-12)
    y = x.copy()
    f_x = fun(x)
    g_y = grad(y)
    f_y = f_x
    calls = 1
    theta = 1.0
    dist_b = value_b = np.inf
    for it in range(1, max_iter + 1):
        while True:
            x_new = project(y - g_y / L)
            step = x_new - y
            f_new = fun(x_new)
            slack = 1e-12 * (abs(f_y) + 1.0)
            if f_new <= f_y + g_y @ step + 0.5 * L * float(step @ step) + slack or L > 1e15:
                break
            L *= 2.0
        g_new = grad(x_new)
        calls += 1
        s = L * (y - x_new) + g_new - g_y
        s_norm = float(np.linalg.norm(s))
        if mu > 0:
            dist_b = s_norm / mu
            value_b = 0.5 * s_norm ** 2 / mu
        if lmo is not None:
            fw = float(g_new @ x_new) + lmo(-g_new)
            value_b = min(value_b, max(fw, 0.0))
        ok = (dist_tol is None or dist_b <= dist_tol) and (value_tol is None or value_b <= value_tol)
        if ok:
            return InnerResult(x_new, f_new, dist_b, value_b, it, calls, True)
        if f_new > f_x:
            # adaptive restart kills the momentum when the value goes up
            theta = 1.0
            y = x_new
            g_y = g_new
        else:
            if mu > 0:
                q = np.sqrt(mu / L)
                beta = (1.0 - q) / (1.0 + q)
            else:
                theta_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * theta ** 2))
                beta = (theta - 1.0) / theta_next
                theta = theta_next
            y = x_new + beta * (x_new - x)
            if beta == 0.0:
                g_y = g_new
            else:
                y = project(y)
                g_y = grad(y)
                calls += 1
        x, f_x = x_new, f_new
        f_y = fun(y)
    return InnerResult(x, f_x, dist_b, value_b, max_iter, calls, False)
