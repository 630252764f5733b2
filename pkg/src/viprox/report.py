"""Solver reports and their serialization."""
import csv
import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class SolveReport:
    solver: str
    x: np.ndarray
    iterations: int
    oracle_calls: int
    wall_time: float = 0.0
    gaps: list = field(default_factory=list)
    trace: dict = field(default_factory=dict)
    restarts: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    def to_dict(self, with_trace=False):
        out = {
            "solver": self.solver,
            "x": _plain(self.x),
            "iterations": int(self.iterations),
            "oracle_calls": int(self.oracle_calls),
            "wall_time": float(self.wall_time),
            "gaps": [_plain(g.to_dict()) for g in self.gaps],
            "restarts": _plain(self.restarts),
            "config": _plain(self.config),
            "info": _plain(self.info),
        }
        if with_trace:
            out["trace"] = _plain(self.trace)
        return out

    def to_json(self, path=None, with_trace=False):
        text = json.dumps(self.to_dict(with_trace), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def write_trace_csv(trace, path):
    """Dump the line-search trace as ``k, M_k, trials, inv_M_sum`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "M_k", "trials", "inv_M_sum"])
        for k, (M, t, s) in enumerate(zip(trace["M"], trace["trials"], trace["inv_M_sum"])):
            w.writerow([k, repr(float(M)), int(t), repr(float(s))])


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj
