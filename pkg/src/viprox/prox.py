"""Prox-functions, Bregman divergences and the mirror step.

Two distance-generating functions are built in:

* ``euclidean``: ``d(x) = 0.5 ||x||_2^2``, 1-strongly convex in the l2 norm.
* ``entropy``: ``d(x) = sum x_i log x_i + log n``, 1-strongly convex in the l1
  norm on the simplex (Pinsker), usable on subsets of the nonnegative orthant.

A setup may be translated and rescaled, ``d_new(x) = R^2 d((x - c) / R)``,
which is how restart schemes recentre the geometry around the latest iterate.
"""
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq
from scipy.special import wrightomega

from . import sets as _sets
from .errors import CapabilityError, NumericalError, RejectedInputError

LOG_FLOOR = 1e-300
INNER_MAX_ITER = 10_000


@dataclass(frozen=True, eq=False)
class ProxSetup:
    """A prox-function ``d(x) = scale^2 * base((x - center) / scale) + offset``.

    ``omega`` is the constant with ``base(u) + offset <= omega / 2`` on the
    unit ball of ``norm_tag``; rescaling keeps it unchanged.
    """

    kind: str
    dim: int
    omega: float
    center: np.ndarray = None
    scale: float = 1.0
    offset: float = 0.0

    @property
    def norm_tag(self):
        return "l2" if self.kind == "euclidean" else "l1"

    @property
    def translated(self):
        return self.center is not None and np.any(self.center != 0)

    def norm(self, v):
        v = np.asarray(v, dtype=float)
        return float(np.linalg.norm(v, 2 if self.kind == "euclidean" else 1))

    def _u(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise RejectedInputError(f"expected a point of shape ({self.dim},), got {x.shape}")
        if self.center is not None:
            x = x - self.center
        return x / self.scale

    def d(self, x):
        u = self._u(x)
        if self.kind == "euclidean":
            base = 0.5 * float(u @ u)
        else:
            _check_nonneg(u)
            pos = u[u > 0]
            base = float(np.sum(pos * np.log(pos)))
        return self.scale ** 2 * base + self.offset

    def grad_d(self, x):
        u = self._u(x)
        if self.kind == "euclidean":
            return self.scale * u
        _check_nonneg(u)
        return self.scale * (np.log(np.maximum(u, LOG_FLOOR)) + 1.0)


def _check_nonneg(u):
    if np.any(u < 0) or not np.all(np.isfinite(u)):
        raise RejectedInputError("entropy prox-function needs nonnegative coordinates")


def euclidean(dim):
    return ProxSetup("euclidean", int(dim), omega=1.0)


def entropy(dim):
    """Negative entropy shifted so that its minimum over the simplex is zero."""
    dim = int(dim)
    log_n = float(np.log(dim))
    return ProxSetup("entropy", dim, omega=max(2.0 * log_n, 1e-12), offset=log_n)


def make_setup(name, dim):
    if name == "euclidean":
        return euclidean(dim)
    if name == "entropy":
        return entropy(dim)
    raise RejectedInputError(f"unknown prox-setup id {name!r}")


def bregman(setup, y, x):
    """``V(y, x) = d(y) - d(x) - <grad d(x), y - x>``, evaluated stably."""
    uy, ux = setup._u(y), setup._u(x)
    if setup.kind == "euclidean":
        r = uy - ux
        return 0.5 * setup.scale ** 2 * float(r @ r)
    _check_nonneg(ux)
    _check_nonneg(uy)
    pos = uy > 0
    # generalized KL; the zero-coordinate terms of y contribute x_i
    logx = np.log(np.maximum(ux[pos], LOG_FLOOR))
    kl = float(np.sum(uy[pos] * (np.log(uy[pos]) - logx)) - uy.sum() + ux.sum())
    return setup.scale ** 2 * max(kl, 0.0)


def scaled_prox(setup, center, radius):
    """Setup whose prox-function is ``R^2 d((x - center) / R)``."""
    if not radius > 0:
        raise RejectedInputError("radius must be positive")
    center = np.asarray(center, dtype=float)
    if center.shape != (setup.dim,):
        raise RejectedInputError("center has the wrong dimension")
    old_c = np.zeros(setup.dim) if setup.center is None else setup.center
    return replace(
        setup,
        center=center + radius * old_c,
        scale=radius * setup.scale,
        offset=radius ** 2 * setup.offset,
    )


def argmin_d(setup, feasible):
    """Minimizer of the prox-function over the set (a mirror step with p = grad d(x))."""
    if setup.kind == "euclidean":
        c = np.zeros(setup.dim) if setup.center is None else setup.center
        return feasible.project(c)
    x = feasible.interior_point()
    return mirror_step(setup, feasible, x, setup.grad_d(x))


def mirror_step(setup, feasible, x, p):
    """``argmin_{y in set} <p, y> + V(y, x)``.

    Closed forms are used for the Euclidean setup on every set kind, and for
    the (untranslated) entropy on the simplex, the orthant, nonnegative boxes,
    nonnegative balls and products of those. The ball case reduces to a
    one-dimensional root find for the multiplier of the norm constraint.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if x.shape != (setup.dim,) or p.shape != (setup.dim,) or feasible.dim != setup.dim:
        raise RejectedInputError("dimension mismatch in mirror_step")
    if not np.all(np.isfinite(p)):
        raise NumericalError("non-finite dual vector in mirror_step", iterate=x)
    if setup.kind == "euclidean":
        return feasible.project(x - p)
    if setup.translated:
        raise CapabilityError("translated entropy prox-functions have no supported mirror step")
    # generalized KL is 1-homogeneous: scale^2 KL(y/s, x/s) = s KL(y, x)
    y = _entropy_closed_form(feasible, x, p / setup.scale)
    if y is not None:
        return y
    raise CapabilityError(f"entropy prox-function is not defined on a {feasible.kind} set")


def _entropy_closed_form(feasible, u, q):
    # argmin <q, y> + KL(y, u); u > 0 required
    if isinstance(feasible, _sets.Product):
        blocks = [_entropy_closed_form(part, u[s], q[s])
                  for part, s in zip(feasible.parts, feasible.slices)]
        return None if any(b is None for b in blocks) else np.concatenate(blocks)
    if isinstance(feasible, _sets.NonnegBall):
        _check_nonneg(u)
        return _entropy_nonneg_ball(u, q, feasible.radius)
    if isinstance(feasible, (_sets.Simplex, _sets.Orthant, _sets.Box)):
        _check_nonneg(u)
        logy = np.log(np.maximum(u, LOG_FLOOR)) - q
        if isinstance(feasible, _sets.Simplex):
            logy -= logy.max()
            y = np.exp(logy)
            return y / y.sum()
        y = np.exp(logy)
        if isinstance(feasible, _sets.Box):
            if np.any(feasible.lo < 0):
                raise CapabilityError("entropy mirror step needs a box inside the orthant")
            # separable 1-D strictly convex problems: clipping is exact
            y = np.clip(y, feasible.lo, feasible.hi)
        return y
    return None


def _entropy_nonneg_ball(u, q, radius):
    # KKT: log(y/u) + q + 2 nu y = 0, so y = omega(log(2 nu u) - q) / (2 nu)
    # with omega the Wright omega function; nu >= 0 solves ||y|| = radius
    pos = u > 0
    logu = np.log(u[pos])
    y = np.zeros_like(u)

    def y_of(t):
        nu2 = 2.0 * np.exp(t)
        return np.real(wrightomega(np.log(nu2) + logu - q[pos])) / nu2

    free = np.exp(np.minimum(logu - q[pos], 700.0))
    if np.linalg.norm(free) <= radius:
        y[pos] = free
        return y
    if not np.any(pos):
        return y

    def excess(t):
        return np.linalg.norm(y_of(t)) - radius

    lo, hi = -50.0, 0.0
    while excess(lo) < 0:
        lo -= 50.0
    while excess(hi) > 0:
        hi += 10.0
        if hi > 2000:
            raise NumericalError("entropy ball step: multiplier search failed", iterate=u)
    t = brentq(excess, lo, hi, xtol=1e-14, rtol=1e-14, maxiter=INNER_MAX_ITER)
    yp = y_of(t)
    nrm = np.linalg.norm(yp)
    y[pos] = yp * min(1.0, radius / nrm)
    return y
