"""Closed convex feasible sets with Euclidean projection and linear maximization.

Every set exposes the same small surface: ``contains``, ``project`` (Euclidean),
``linear_max`` (support function and a maximizer), ``sample`` (random feasible
points for audits) and a declared ``diameter``.
"""
import numpy as np

from .errors import RejectedInputError


def project_simplex(v, total=1.0):
    """Euclidean projection of ``v`` onto {x >= 0, sum(x) = total} (sort method)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


class FeasibleSet:
    kind = "abstract"

    def __init__(self, dim, diameter=None):
        if int(dim) <= 0:
            raise RejectedInputError("dimension must be a positive integer")
        self.dim = int(dim)
        self.diameter = self._default_diameter() if diameter is None else float(diameter)

    def _default_diameter(self):
        return np.inf

    @property
    def compact(self):
        return np.isfinite(self.diameter)

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise RejectedInputError(f"expected a point of shape ({self.dim},), got {x.shape}")
        return x

    def contains(self, x, tol=1e-9):
        raise NotImplementedError

    def project(self, x):
        raise NotImplementedError

    def linear_max(self, c):
        """Return ``(max_{u in set} <c, u>, argmax)``."""
        raise NotImplementedError

    def sample(self, rng, size):
        raise NotImplementedError

    def interior_point(self):
        return self.project(np.zeros(self.dim))

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, diameter={self.diameter:g})"


class FullSpace(FeasibleSet):
    kind = "full-space"

    def contains(self, x, tol=1e-9):
        return bool(np.all(np.isfinite(self._check(x))))

    def project(self, x):
        return np.array(self._check(x), dtype=float)

    def linear_max(self, c):
        c = self._check(c)
        if np.any(c != 0):
            return np.inf, None
        return 0.0, np.zeros(self.dim)

    def sample(self, rng, size):
        return rng.standard_normal((size, self.dim))


class Ball(FeasibleSet):
    """Euclidean ball ``{x : ||x - center|| <= radius}``."""

    kind = "euclidean-ball"

    def __init__(self, dim, radius=1.0, center=None, diameter=None):
        if radius <= 0:
            raise RejectedInputError("ball radius must be positive")
        self.radius = float(radius)
        self.center = np.zeros(int(dim)) if center is None else np.asarray(center, dtype=float)
        super().__init__(dim, diameter)
        self.center = self._check(self.center)

    def _default_diameter(self):
        return 2.0 * self.radius

    def contains(self, x, tol=1e-9):
        return bool(np.linalg.norm(self._check(x) - self.center) <= self.radius + tol)

    def project(self, x):
        r = self._check(x) - self.center
        nrm = np.linalg.norm(r)
        if nrm > self.radius:
            r = r * (self.radius / nrm)
        return self.center + r

    def linear_max(self, c):
        c = self._check(c)
        nrm = np.linalg.norm(c)
        u = self.center + (self.radius * c / nrm if nrm > 0 else 0.0)
        return float(c @ self.center + self.radius * nrm), u

    def sample(self, rng, size):
        g = rng.standard_normal((size, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = self.radius * rng.random(size) ** (1.0 / self.dim)
        return self.center + g * r[:, None]


class NonnegBall(FeasibleSet):
    """Origin-centred ball intersected with the nonnegative orthant."""

    kind = "nonneg-ball"

    def __init__(self, dim, radius=1.0, diameter=None):
        if radius <= 0:
            raise RejectedInputError("ball radius must be positive")
        self.radius = float(radius)
        super().__init__(dim, diameter)

    def _default_diameter(self):
        return np.sqrt(2.0) * self.radius if self.dim > 1 else self.radius

    def contains(self, x, tol=1e-9):
        x = self._check(x)
        return bool(np.all(x >= -tol) and np.linalg.norm(x) <= self.radius + tol)

    def project(self, x):
        # orthant first, then radial shrink: the shrink keeps the orthant
        y = np.maximum(self._check(x), 0.0)
        nrm = np.linalg.norm(y)
        if nrm > self.radius:
            y *= self.radius / nrm
        return y

    def linear_max(self, c):
        cp = np.maximum(self._check(c), 0.0)
        nrm = np.linalg.norm(cp)
        if nrm == 0:
            return 0.0, np.zeros(self.dim)
        return float(self.radius * nrm), self.radius * cp / nrm

    def sample(self, rng, size):
        return np.abs(Ball(self.dim, self.radius).sample(rng, size))


class Box(FeasibleSet):
    kind = "box"

    def __init__(self, dim, lo=-1.0, hi=1.0, diameter=None):
        self.lo = np.broadcast_to(np.asarray(lo, dtype=float), (int(dim),)).copy()
        self.hi = np.broadcast_to(np.asarray(hi, dtype=float), (int(dim),)).copy()
        if np.any(self.hi < self.lo):
            raise RejectedInputError("box needs lo <= hi")
        super().__init__(dim, diameter)

    def _default_diameter(self):
        return float(np.linalg.norm(self.hi - self.lo))

    def contains(self, x, tol=1e-9):
        x = self._check(x)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def project(self, x):
        return np.clip(self._check(x), self.lo, self.hi)

    def linear_max(self, c):
        c = self._check(c)
        u = np.where(c >= 0, self.hi, self.lo)
        return float(c @ u), u

    def sample(self, rng, size):
        lo = np.where(np.isfinite(self.lo), self.lo, -1e3)
        hi = np.where(np.isfinite(self.hi), self.hi, 1e3)
        return lo + (hi - lo) * rng.random((size, self.dim))

    def interior_point(self):
        lo = np.where(np.isfinite(self.lo), self.lo, np.minimum(self.hi, 0.0) - 1.0)
        hi = np.where(np.isfinite(self.hi), self.hi, np.maximum(self.lo, 0.0) + 1.0)
        return 0.5 * (lo + hi)


class Orthant(FeasibleSet):
    kind = "nonnegative-orthant"

    def contains(self, x, tol=1e-9):
        return bool(np.all(self._check(x) >= -tol))

    def project(self, x):
        return np.maximum(self._check(x), 0.0)

    def linear_max(self, c):
        c = self._check(c)
        if np.any(c > 0):
            return np.inf, None
        return 0.0, np.zeros(self.dim)

    def sample(self, rng, size):
        return rng.exponential(size=(size, self.dim))

    def interior_point(self):
        return np.ones(self.dim)


class Simplex(FeasibleSet):
    """Probability simplex ``{x >= 0, sum(x) = 1}``."""

    kind = "simplex"

    def _default_diameter(self):
        # l2 distance between two vertices; the l1 diameter is 2
        return np.sqrt(2.0) if self.dim > 1 else 0.0

    def contains(self, x, tol=1e-9):
        x = self._check(x)
        return bool(np.all(x >= -tol) and abs(x.sum() - 1.0) <= tol * max(1, self.dim))

    def project(self, x):
        return project_simplex(self._check(x))

    def linear_max(self, c):
        c = self._check(c)
        i = int(np.argmax(c))
        u = np.zeros(self.dim)
        u[i] = 1.0
        return float(c[i]), u

    def sample(self, rng, size):
        return rng.dirichlet(np.ones(self.dim), size=size)

    def interior_point(self):
        return np.full(self.dim, 1.0 / self.dim)


class Product(FeasibleSet):
    """Cartesian product of sets; points are concatenated blocks."""

    kind = "product-of-sets"

    def __init__(self, parts, diameter=None):
        self.parts = tuple(parts)
        if not self.parts:
            raise RejectedInputError("product needs at least one factor")
        bounds = np.cumsum([0] + [p.dim for p in self.parts])
        self.slices = tuple(slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]))
        super().__init__(int(bounds[-1]), diameter)

    def _default_diameter(self):
        return float(np.sqrt(sum(p.diameter ** 2 for p in self.parts)))

    def split(self, x):
        return [x[s] for s in self.slices]

    def contains(self, x, tol=1e-9):
        x = self._check(x)
        return all(p.contains(x[s], tol) for p, s in zip(self.parts, self.slices))

    def project(self, x):
        x = self._check(x)
        return np.concatenate([p.project(x[s]) for p, s in zip(self.parts, self.slices)])

    def linear_max(self, c):
        c = self._check(c)
        vals, args = zip(*(p.linear_max(c[s]) for p, s in zip(self.parts, self.slices)))
        if any(a is None for a in args):
            return np.inf, None
        return float(sum(vals)), np.concatenate(args)

    def sample(self, rng, size):
        return np.hstack([p.sample(rng, size) for p in self.parts])

    def interior_point(self):
        return np.concatenate([p.interior_point() for p in self.parts])

    def __repr__(self):
        return f"Product({', '.join(map(repr, self.parts))})"


def make_set(spec, dim, parts=None):
    """Build a set from a string id.

    Accepted ids: ``"full"``, ``"ball:r"``, ``"ball+:r"``, ``"box:lo:hi"``,
    ``"orthant"``, ``"simplex"`` and ``"product"`` (which needs ``parts``).
    """
    name, *args = str(spec).split(":")
    try:
        if name == "full":
            return FullSpace(dim)
        if name == "ball":
            return Ball(dim, float(args[0]) if args else 1.0)
        if name == "ball+":
            return NonnegBall(dim, float(args[0]) if args else 1.0)
        if name == "box":
            lo, hi = (float(a) for a in args) if args else (-1.0, 1.0)
            return Box(dim, lo, hi)
        if name == "orthant":
            return Orthant(dim)
        if name == "simplex":
            return Simplex(dim)
        if name == "product":
            if not parts:
                raise RejectedInputError("product set needs its factor sets")
            return Product(parts)
    except (IndexError, ValueError) as exc:
        raise RejectedInputError(f"malformed set id {spec!r}") from exc
    raise RejectedInputError(f"unknown set id {spec!r}")
