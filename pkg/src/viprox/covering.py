"""Smallest covering ball with quadratic functional constraints.

    minimize    f(x) = max_k ||x - A_k||^2
    subject to  phi_p(x) = sum_i alpha_pi x_i^2 - 5 <= 0,   p = 1..m

solved through the regularized Lagrangian
``f(x) + sum_p lambda_p phi_p(x) - 1/2 ||lambda||^2`` and its monotone operator
``G(x, lambda) = (df(x) + sum_p lambda_p grad phi_p(x), lambda - phi(x))`` with
the restarted Universal Mirror Prox.

The random coefficient families are generated from a plain uniform stream
(inverse CDFs, Box-Muller, Michael-Schucany-Haas) so that an instance is a
deterministic function of the seed.
"""
import csv
import time
from dataclasses import dataclass, field

import numpy as np

from . import sets as _sets
from .errors import RejectedInputError, ViproxError
from .mirror_prox import RestartConfig, restarted_ump
from .problems import VIOperator
from .prox import euclidean

CONSTRAINT_OFFSET = 5.0
DEFAULT_LAMBDA_CAP = 10.0
EPSILON_GRID = tuple(1.0 / 2 ** i for i in range(1, 7))
CASES = {
    1: "standard exponential",
    2: "Gumbel (mode 0, scale 1)",
    3: "inverse Gaussian (mean 1, scale 2)",
    4: "discrete uniform on [1, 6)",
}


@dataclass
class CoveringInstance:
    A: np.ndarray
    alpha: np.ndarray
    case_id: int
    seed: int
    lambda_cap: float = DEFAULT_LAMBDA_CAP
    x_radius: float = None
    offset: float = CONSTRAINT_OFFSET

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.alpha = np.asarray(self.alpha, dtype=float)
        if self.A.ndim != 2 or self.alpha.ndim != 2 or self.A.shape[1] != self.alpha.shape[1]:
            raise RejectedInputError("A must be N x n and alpha m x n")
        if self.x_radius is None:
            self.x_radius = float(np.sqrt(self.n))

    @property
    def N(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]

    @property
    def m(self):
        return self.alpha.shape[0]

    @property
    def feasible(self):
        return _sets.Product([_sets.Ball(self.n, self.x_radius),
                              _sets.NonnegBall(self.m, self.lambda_cap)])

    def start_point(self):
        return np.full(self.n + self.m, 1.0 / np.sqrt(self.n + self.m))


# ---------------------------------------------------------------- samplers


def _open_uniform(rng, size):
    # (0, 1): the endpoints would send the logarithms to infinity
    u = rng.random(size)
    return np.where(u == 0.0, np.nextafter(0.0, 1.0), u)


def sample_exponential(rng, size):
    return -np.log1p(-rng.random(size))


def sample_gumbel(rng, size, loc=0.0, scale=1.0):
    return loc - scale * np.log(-np.log(_open_uniform(rng, size)))


def sample_normal(rng, size):
    """Box-Muller on two uniform draws."""
    u1 = _open_uniform(rng, size)
    u2 = rng.random(size)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def sample_inverse_gaussian(rng, size, mean=1.0, scale=2.0):
    """Michael-Schucany-Haas transformation."""
    v = sample_normal(rng, size) ** 2
    mu, lam = mean, scale
    x = mu + mu * mu * v / (2.0 * lam) - mu / (2.0 * lam) * np.sqrt(4.0 * mu * lam * v + (mu * v) ** 2)
    u = rng.random(size)
    return np.where(u <= mu / (mu + x), x, mu * mu / x)


def sample_discrete_uniform(rng, size, lo=1, hi=6):
    return lo + np.floor((hi - lo) * rng.random(size))


def gen_case(case_id, n, m, N, seed, lambda_cap=DEFAULT_LAMBDA_CAP, x_radius=None):
    """Random instance: points uniform in ``[0, 1)^n`` and coefficients from the case family."""
    if case_id not in CASES:
        raise RejectedInputError(f"unknown case id {case_id!r}; expected one of 1-4")
    if min(n, m, N) <= 0:
        raise RejectedInputError("n, m and N must be positive")
    rng = np.random.default_rng(seed)
    A = rng.random((N, n))
    size = (m, n)
    if case_id == 1:
        alpha = sample_exponential(rng, size)
    elif case_id == 2:
        alpha = sample_gumbel(rng, size)
    elif case_id == 3:
        alpha = sample_inverse_gaussian(rng, size)
    else:
        alpha = sample_discrete_uniform(rng, size)
    return CoveringInstance(A, alpha, case_id, seed, lambda_cap, x_radius)


# ---------------------------------------------------------------- oracles


def objective(inst, x):
    """``(max_k ||x - A_k||^2, k*)`` with ties going to the lowest index (0-based)."""
    d = np.sum((inst.A - x) ** 2, axis=1)
    k = int(np.argmax(d))
    return float(d[k]), k


def constraints(inst, x):
    return inst.alpha @ (x * x) - inst.offset


def constraint(inst, p, x):
    """``phi_p(x)`` for a 1-based constraint index ``p``."""
    if not 1 <= p <= inst.m:
        raise RejectedInputError(f"constraint index {p} outside 1..{inst.m}")
    return float(inst.alpha[p - 1] @ (x * x) - inst.offset)


def lagrangian(inst, x, lam):
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise RejectedInputError("multipliers must be nonnegative")
    return objective(inst, x)[0] + float(lam @ constraints(inst, x)) - 0.5 * float(lam @ lam)


def lagrangian_operator(inst, mu=None):
    """The Lagrangian VI operator on ``ball(sqrt n) x (ball(lambda_cap) & orthant)``.

    The lambda block is 1-strongly monotone and the max of squared distances
    is 2-strongly convex, so with every alpha nonnegative the operator is
    1-strongly monotone and that is the declared default. A negative alpha
    (possible in the Gumbel case) voids the guarantee and nothing is declared
    unless ``mu`` is passed explicitly.
    """
    n = inst.n
    A, alpha = inst.A, inst.alpha
    convex = bool(np.all(alpha >= 0))
    if mu is None and convex:
        mu = 1.0

    def G(z):
        x, lam = z[:n], z[n:]
        _, k = objective(inst, x)
        gx = 2.0 * (x - A[k]) + 2.0 * x * (alpha.T @ lam)
        return np.concatenate([gx, lam - constraints(inst, x)])

    return VIOperator(dim=n + inst.m, eval=G, mu=mu, sigma=0.0 if convex else None,
                      feasible=inst.feasible, name=f"covering-case{inst.case_id}")


# ---------------------------------------------------------------- harness


@dataclass
class BenchRow:
    inv_epsilon: float
    iterations: float
    time_seconds: float
    f_best: float
    g_out: float
    errors: list = field(default_factory=list)

    def as_list(self):
        return [self.inv_epsilon, self.iterations, self.time_seconds, self.f_best, self.g_out]


def solve_instance(inst, epsilon, mu=1.0, R0_sq=None, L0=1.0):
    """Restarted UMP from the prescribed start; returns ``(report, f_best, g_out)``."""
    op = lagrangian_operator(inst, mu)
    feasible = inst.feasible
    if R0_sq is None:
        R0_sq = feasible.diameter ** 2
    cfg = RestartConfig(epsilon=epsilon, mu=mu, R0_sq=R0_sq, x0=inst.start_point(), L0=L0)
    report = restarted_ump(op, euclidean(feasible.dim), feasible, cfg, certify=False)
    x_out = report.x[:inst.n]
    return report, objective(inst, x_out)[0], float(np.max(constraints(inst, x_out)))


def run_bench(case_id, n, m, N, epsilons=EPSILON_GRID, repetitions=5, seed=0,
              lambda_cap=DEFAULT_LAMBDA_CAP, x_radius=None, mu=1.0, R0_sq=None, L0=1.0):
    """One averaged row per epsilon; repetition ``r`` uses seed ``seed + r``.

    Solver failures are recorded in the row's ``errors`` and excluded from the
    averages instead of aborting the sweep.
    """
    if case_id not in CASES:
        raise RejectedInputError(f"unknown case id {case_id!r}; expected one of 1-4")
    instances = [gen_case(case_id, n, m, N, seed + r, lambda_cap, x_radius)
                 for r in range(repetitions)]
    rows = []
    for eps in epsilons:
        stats, errors = [], []
        for inst in instances:
            t0 = time.perf_counter()
            try:
                report, f_best, g_out = solve_instance(inst, eps, mu, R0_sq, L0)
            except ViproxError as exc:
                errors.append(f"seed {inst.seed}: {type(exc).__name__}: {exc}")
                continue
            stats.append((report.iterations, time.perf_counter() - t0, f_best, g_out))
        if stats:
            it, tm, fb, go = np.mean(np.array(stats), axis=0)
        else:
            it = tm = fb = go = np.nan
        rows.append(BenchRow(1.0 / eps, float(it), float(tm), float(fb), float(go), errors))
    return rows


BENCH_HEADER = ["inv_epsilon", "iterations", "time_seconds", "f_best", "g_out"]


def write_bench_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(BENCH_HEADER)
        for r in rows:
            w.writerow([_fmt(v) for v in r.as_list()])


def _fmt(v):
    return f"{v:.10g}"


def bench_markdown(rows, title=""):
    lines = []
    if title:
        lines += [f"**{title}**", ""]
    lines.append("| 1/eps | Iter. | Time (sec.) | f_best | g_out |")
    lines.append("|---:|---:|---:|---:|---:|")
    for r in rows:
        lines.append(f"| {r.inv_epsilon:g} | {r.iterations:g} | {r.time_seconds:.3f} "
                     f"| {r.f_best:.6f} | {r.g_out:.6f} |")
    return "\n".join(lines) + "\n"


def dump_instance(inst, path):
    """Text dump: a ``key value`` header block, then one coefficient per line."""
    with open(path, "w") as fh:
        fh.write("# covering-ball instance\n")
        for key in ("case_id", "seed", "n", "m", "N", "lambda_cap", "x_radius", "offset"):
            fh.write(f"{key} {getattr(inst, key)!r}\n")
        fh.write("A\n")
        for v in inst.A.ravel().tolist():
            fh.write(f"{v!r}\n")
        fh.write("alpha\n")
        for v in inst.alpha.ravel().tolist():
            fh.write(f"{v!r}\n")


def load_instance(path):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    head = {}
    i = 0
    while lines[i] != "A":
        key, val = lines[i].split(maxsplit=1)
        head[key] = float(val)
        i += 1
    n, m, N = int(head["n"]), int(head["m"]), int(head["N"])
    A = np.array([float(v) for v in lines[i + 1:i + 1 + N * n]]).reshape(N, n)
    j = i + 1 + N * n
    if lines[j] != "alpha":
        raise RejectedInputError("malformed instance dump")
    alpha = np.array([float(v) for v in lines[j + 1:j + 1 + m * n]]).reshape(m, n)
    return CoveringInstance(A, alpha, int(head["case_id"]), int(head["seed"]),
                            head["lambda_cap"], head["x_radius"], head["offset"])
