"""Command-line front end: ``viprox solve | bench | certify``.

Configuration comes from an optional key-value file (``--config``) and the
command-line flags, flags winning. The file is one ``key = value`` per line,
``#`` starts a comment, keys are the long flag names with or without the
leading dashes (``lambda-cap`` and ``lambda_cap`` are the same key), and an
optional ``[run]`` header is allowed. A saved ``report.json`` is accepted as
a config file too: its ``run_config`` echo is replayed.

Exit codes: 0 success, 1 solver error or failed certification, 2 bad config.
"""
import argparse
import configparser
import json
import math
import os
import sys

import numpy as np

from . import covering, problems
from .errors import CapabilityError, ConfigError, RejectedInputError, ViproxError
from .mirror_descent import MDConfig, md_solve
from .mirror_prox import RestartConfig, UMPConfig, restarted_ump, ump_solve
from .prox import make_setup
from .report import _plain, write_trace_csv
from .saddle import fgm_solve
from .sets import Ball

SOLVERS = ("md-rb", "ump", "rump", "saddle-fgm")
VI_PROBLEMS = ("affine-vi", "skew")
SADDLE_PROBLEMS = ("bilinear", "quadratic-saddle", "separable")
PROBLEMS = VI_PROBLEMS + SADDLE_PROBLEMS + ("covering",)

# key -> (type, default)
FIELDS = {
    "solver": (str, None),
    "problem": (str, None),
    "prox": (str, "euclidean"),
    "eps": (float, 0.05),
    "seed": (int, 0),
    "out": (str, None),
    "dim": (int, 2),
    "mu": (float, 1.0),
    "skew": (float, 0.0),
    "radius": (float, 1.0),
    "L0": (float, 1.0),
    "max_iter": (int, 500),
    "case": (int, 1),
    "n": (int, 50),
    "m": (int, 5),
    "N": (int, 5),
    "reps": (int, 5),
    "lambda_cap": (float, covering.DEFAULT_LAMBDA_CAP),
    "x_radius": (float, None),
    "eps_grid": (str, None),
    "point": (str, None),
    "certify": (bool, True),
}


def _key(name):
    name = name.strip().lstrip("-").replace("-", "_")
    # the size flags are case sensitive, everything else is not
    return name if name in ("n", "m", "N", "L0") else name.lower()


def _convert(key, raw):
    typ = FIELDS[key][0]
    if raw is None or typ is str:
        return raw
    try:
        if typ is bool:
            if isinstance(raw, bool):
                return raw
            low = str(raw).strip().lower()
            if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ValueError(raw)
            return low in ("1", "true", "yes", "on")
        if typ is int and isinstance(raw, str):
            return int(raw.strip())
        return typ(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot read {raw!r} as {typ.__name__}") from None


def read_config_file(path):
    """Parse the key-value file (or a report's config echo) into a dict."""
    if not os.path.exists(path):
        raise ConfigError(f"config file {path!r} does not exist")
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".json"):
        try:
            echo = json.loads(text)["run_config"]
        except (ValueError, KeyError, TypeError):
            raise ConfigError(f"{path!r} has no run_config echo") from None
        items = echo.items()
    else:
        if not text.lstrip().startswith("["):
            text = "[run]\n" + text
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
        parser.optionxform = str
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config file: {exc}") from None
        items = [(k, v) for s in parser.sections() for k, v in parser[s].items()]
    out = {}
    for k, v in items:
        key = _key(k)
        if key not in FIELDS:
            raise ConfigError(f"unknown config key {k!r}")
        out[key] = _convert(key, v)
    return out


def resolve_config(args, command):
    """Defaults, then the config file, then explicit flags."""
    cfg = {k: v[1] for k, v in FIELDS.items()}
    if args.config:
        cfg.update(read_config_file(args.config))
    for k in FIELDS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = _convert(k, v)
    if getattr(args, "no_certify", False):
        cfg["certify"] = False
    cfg["command"] = command
    validate(cfg)
    return cfg


def validate(cfg):
    cmd = cfg["command"]
    if cmd in ("solve", "certify"):
        if cfg["problem"] not in PROBLEMS:
            raise ConfigError(f"unknown problem id {cfg['problem']!r}; expected one of {PROBLEMS}")
    if cmd == "solve":
        if cfg["solver"] not in SOLVERS:
            raise ConfigError(f"unknown solver id {cfg['solver']!r}; expected one of {SOLVERS}")
        if cfg["solver"] == "saddle-fgm" and cfg["problem"] not in SADDLE_PROBLEMS:
            raise ConfigError("saddle-fgm needs a saddle problem")
        if cfg["problem"] == "covering" and cfg["solver"] != "rump":
            raise ConfigError("the covering problem is solved with rump")
    if cmd == "certify" and not cfg["point"]:
        raise ConfigError("certify needs --point")
    if cmd == "bench" or cfg["problem"] == "covering":
        if cfg["case"] not in covering.CASES:
            raise ConfigError(f"unknown case id {cfg['case']!r}; expected 1-4")
        if min(cfg["n"], cfg["m"], cfg["N"], cfg["reps"]) <= 0:
            raise ConfigError("n, m, N and reps must be positive")
    if cfg["prox"] not in ("euclidean", "entropy"):
        raise ConfigError(f"unknown prox id {cfg['prox']!r}")
    if not (cfg["eps"] > 0 and math.isfinite(cfg["eps"])):
        raise ConfigError("eps must be positive")
    if cfg["dim"] <= 0 or cfg["radius"] <= 0 or cfg["lambda_cap"] <= 0 or cfg["max_iter"] <= 0:
        raise ConfigError("dim, radius, lambda-cap and max-iter must be positive")
    if cfg["eps_grid"]:
        parse_grid(cfg["eps_grid"])


def parse_grid(text):
    try:
        vals = [float(eval_fraction(t)) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"cannot read eps grid {text!r}") from None
    if not vals or min(vals) <= 0:
        raise ConfigError("eps grid entries must be positive")
    return vals


def eval_fraction(tok):
    tok = tok.strip()
    if "/" in tok:
        a, b = tok.split("/", 1)
        return float(a) / float(b)
    return float(tok)


# ---------------------------------------------------------------- building runs


def build_problem(cfg):
    """Returns ``(kind, object)`` with kind ``"vi"``, ``"saddle"`` or ``"covering"``."""
    try:
        return _build_problem(cfg)
    except RejectedInputError as exc:
        raise ConfigError(f"problem parameters rejected: {exc}") from None


def _build_problem(cfg):
    pid, seed = cfg["problem"], cfg["seed"]
    if pid == "affine-vi":
        # solution halfway to the boundary, so the default start is not already optimal
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(cfg["dim"])
        x_star = 0.5 * cfg["radius"] * v / np.linalg.norm(v)
        return "vi", problems.affine_vi(cfg["dim"], cfg["mu"], cfg["skew"], cfg["radius"],
                                        x_star=x_star, seed=seed)
    if pid == "skew":
        return "vi", problems.skew_vi(cfg["radius"])
    if pid == "bilinear":
        return "saddle", problems.bilinear_saddle(cfg["dim"], cfg["dim"], cfg["radius"], seed)
    if pid == "quadratic-saddle":
        return "saddle", problems.quadratic_saddle(cfg["dim"], cfg["dim"], cfg["mu"], cfg["mu"],
                                                    max(cfg["radius"], 3.0), seed=seed)
    if pid == "separable":
        return "saddle", problems.separable_saddle(cfg["dim"], cfg["dim"], cfg["mu"], cfg["mu"],
                                                    cfg["radius"])
    return "covering", covering.gen_case(cfg["case"], cfg["n"], cfg["m"], cfg["N"], seed,
                                         cfg["lambda_cap"], cfg["x_radius"])


def _md_R_sq(setup, feasible, x0):
    if setup.kind == "entropy":
        return setup.omega
    if isinstance(feasible, Ball):
        return 0.5 * (feasible.radius + float(np.linalg.norm(x0 - feasible.center))) ** 2
    return 0.5 * feasible.diameter ** 2


def run_solve(cfg):
    kind, prob = build_problem(cfg)
    eps, solver = cfg["eps"], cfg["solver"]
    extra = {}
    if kind == "covering":
        report, f_best, g_out = covering.solve_instance(prob, eps)
        extra["bench_row"] = covering.BenchRow(1.0 / eps, report.iterations, report.wall_time,
                                               f_best, g_out)
        return report, extra
    if kind == "saddle" and solver == "saddle-fgm":
        _, _, report = fgm_solve(prob, eps, certify=cfg["certify"], seed=cfg["seed"])
        return report, extra
    op = prob if kind == "vi" else problems.saddle_to_vi(prob)
    feasible = op.feasible
    setup = make_setup(cfg["prox"], feasible.dim)
    x0 = feasible.interior_point()
    if solver == "md-rb":
        if op.M is None:
            raise ConfigError(f"md-rb needs a declared M; {op.name} has none")
        md = MDConfig(eps, op.M, _md_R_sq(setup, feasible, x0), op.sigma or 0.0, x0)
        report = md_solve(op, setup, feasible, md, certify=cfg["certify"])
    elif solver == "ump":
        report = ump_solve(op, setup, feasible,
                           UMPConfig(eps, L0=cfg["L0"], max_iter=cfg["max_iter"]),
                           certify=cfg["certify"])
    else:
        if not op.mu:
            raise ConfigError(f"rump needs a strongly monotone operator; {op.name} declares none")
        rc = RestartConfig(eps, op.mu, feasible.diameter ** 2, x0, L0=cfg["L0"])
        report = restarted_ump(op, setup, feasible, rc, certify=cfg["certify"])
    return report, extra


def _certified_ok(report, target):
    return all(g.certified and g.upper <= target * (1 + 1e-9) for g in report.gaps)


def _target(report, cfg):
    return report.info.get("target", cfg["eps"])


def _echo(cfg):
    return {k: v for k, v in cfg.items() if k != "command" and v is not None}


def cmd_solve(cfg):
    report, extra = run_solve(cfg)
    out = cfg["out"]
    payload = report.to_dict()
    payload["run_config"] = _echo(cfg)
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "report.json"), "w") as fh:
            fh.write(text + "\n")
        if report.trace.get("M"):
            write_trace_csv(report.trace, os.path.join(out, "trace.csv"))
        if "bench_row" in extra:
            covering.write_bench_csv([extra["bench_row"]], os.path.join(out, "bench.csv"))
    _summary(report)
    if cfg["certify"] and report.gaps and not _certified_ok(report, _target(report, cfg)):
        print(f"error: gap not certified below {_target(report, cfg):g}", file=sys.stderr)
        return 1
    return 0


def _summary(report):
    print(f"solver {report.solver}: {report.iterations} iterations, "
          f"{report.oracle_calls} oracle calls, {report.wall_time:.3f} s")
    for g in report.gaps:
        flag = "certified" if g.certified else "uncertified"
        print(f"  {g.kind} gap {g.value:.6g} [{g.method}, {flag}, tol {g.tolerance:.3g}]")


def cmd_bench(cfg):
    eps = parse_grid(cfg["eps_grid"]) if cfg["eps_grid"] else covering.EPSILON_GRID
    rows = covering.run_bench(cfg["case"], cfg["n"], cfg["m"], cfg["N"], eps, cfg["reps"],
                              cfg["seed"], cfg["lambda_cap"], cfg["x_radius"])
    title = f"Case {cfg['case']}: n = {cfg['n']}, m = {cfg['m']}, N = {cfg['N']}"
    table = covering.bench_markdown(rows, title)
    print(table, end="")
    out = cfg["out"]
    if out:
        os.makedirs(out, exist_ok=True)
        covering.write_bench_csv(rows, os.path.join(out, "bench.csv"))
        with open(os.path.join(out, "bench.md"), "w") as fh:
            fh.write(table)
        for r in range(cfg["reps"]):
            inst = covering.gen_case(cfg["case"], cfg["n"], cfg["m"], cfg["N"], cfg["seed"] + r,
                                     cfg["lambda_cap"], cfg["x_radius"])
            covering.dump_instance(inst, os.path.join(out, f"instance_seed{cfg['seed'] + r}.txt"))
        with open(os.path.join(out, "bench_config.json"), "w") as fh:
            json.dump({"run_config": _plain(_echo(cfg)), "nu": 0.0}, fh, indent=2, sort_keys=True)
    failed = [e for r in rows for e in r.errors]
    for e in failed:
        print(f"error: {e}", file=sys.stderr)
    return 1 if failed else 0


def load_point(path):
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except ValueError:
        return np.array([float(t) for t in text.replace(",", " ").split()])
    if isinstance(data, dict):
        data = data["x"]
    return np.asarray(data, dtype=float)


def cmd_certify(cfg):
    kind, prob = build_problem(cfg)
    try:
        x = load_point(cfg["point"])
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read point from {cfg['point']!r}: {exc}") from None
    if kind == "saddle":
        if x.size != prob.n + prob.m:
            raise ConfigError(f"point has {x.size} entries, expected {prob.n + prob.m}")
        cert = problems.saddle_gap(prob, x[:prob.n], x[prob.n:])
    else:
        op = covering.lagrangian_operator(prob) if kind == "covering" else prob
        if x.size != op.dim:
            raise ConfigError(f"point has {x.size} entries, expected {op.dim}")
        cert = problems.vi_gap(op, op.feasible, x)
    text = json.dumps(_plain(cert.to_dict()), indent=2, sort_keys=True)
    print(text)
    if cfg["out"]:
        os.makedirs(cfg["out"], exist_ok=True)
        with open(os.path.join(cfg["out"], "certificate.json"), "w") as fh:
            fh.write(text + "\n")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="viprox", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    specs = {
        "solve": "run one solver on one problem",
        "bench": "covering-ball benchmark over an epsilon grid",
        "certify": "recompute the gap of a saved point",
    }
    for name, help_ in specs.items():
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", help="key-value config file or a saved report.json")
        s.add_argument("--problem", help=f"one of {', '.join(PROBLEMS)}")
        s.add_argument("--eps", help="target accuracy")
        s.add_argument("--seed", help="master seed; repetition r uses seed + r")
        s.add_argument("--out", help="output directory")
        s.add_argument("--dim")
        s.add_argument("--mu")
        s.add_argument("--skew")
        s.add_argument("--radius")
        s.add_argument("--case", help="covering case id, 1-4")
        s.add_argument("--n")
        s.add_argument("--m")
        s.add_argument("--N")
        s.add_argument("--lambda-cap", dest="lambda_cap")
        s.add_argument("--x-radius", dest="x_radius")
        if name == "solve":
            s.add_argument("--solver", help=f"one of {', '.join(SOLVERS)}")
            s.add_argument("--prox", help="euclidean or entropy")
            s.add_argument("--L0", dest="L0")
            s.add_argument("--max-iter", dest="max_iter")
            s.add_argument("--no-certify", action="store_true")
        if name == "bench":
            s.add_argument("--reps")
            s.add_argument("--eps-grid", dest="eps_grid", help="comma list, e.g. 1/2,1/4")
        if name == "certify":
            s.add_argument("--point", help="report.json, JSON list or whitespace list")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"solve": cmd_solve, "bench": cmd_bench, "certify": cmd_certify}
    try:
        cfg = resolve_config(args, args.command)
        return handlers[args.command](cfg)
    except (ConfigError, CapabilityError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ViproxError as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
