import math

import numpy as np
import pytest

from viprox.errors import DivergenceError, RejectedInputError
from viprox.mirror_prox import (RestartConfig, UMPConfig, restart_count, restart_radius_sq,
                                restarted_ump, ump_solve)
from viprox.problems import VIOperator, affine_vi, skew_vi
from viprox.prox import euclidean
from viprox.report import write_trace_csv
from viprox.sets import Ball


def test_config_validation():
    with pytest.raises(RejectedInputError):
        UMPConfig(epsilon=0.1)
    assert UMPConfig(epsilon=0.1, max_iter=3).delta == 0.05
    with pytest.raises(RejectedInputError):
        RestartConfig(epsilon=0.1, mu=0.0, R0_sq=1.0, x0=np.zeros(2))


def test_accepted_constants_stay_below_twice_lipschitz():
    A = np.array([[1.0, 1.0], [-1.0, 1.0]])
    L = float(np.linalg.norm(A, 2))
    op = VIOperator(dim=2, eval=lambda x: A @ x, affine=(A, np.zeros(2)), sigma=0.0)
    for L0 in (0.01, 1.0, 10.0):
        rep = ump_solve(op, euclidean(2), Ball(2, 1.0),
                        UMPConfig(1e-3, L0=L0, max_iter=200, x0=np.array([0.6, 0.8])), certify=False)
        assert max(rep.trace["M"]) <= 2 * max(L, L0) + 1e-12


def test_line_search_inequality_holds_at_accepted_points():
    op = affine_vi(3, 0.5, 2.0, 1.0, x_star=[0.1, 0.2, 0.3], seed=3)
    eps = 1e-2
    rep = ump_solve(op, euclidean(3), op.feasible,
                    UMPConfig(eps, L0=0.1, delta=0.0, max_iter=50, x0=np.array([1.0, 0, 0])),
                    certify=False)
    z_prev = np.array([1.0, 0.0, 0.0])
    for M, w, z in zip(rep.trace["M"], rep.trace["w"], rep.trace["z"]):
        lhs = (op(w) - op(z_prev)) @ (w - z)
        rhs = 0.5 * M * (np.sum((w - z_prev) ** 2) + np.sum((w - z) ** 2)) + eps / 2
        assert lhs <= rhs + 1e-12
        z_prev = z


def test_skew_operator_converges_to_zero():
    op = skew_vi(1.0)
    rep = ump_solve(op, euclidean(2), op.feasible,
                    UMPConfig(1e-2, max_iter=500, x0=np.array([0.6, 0.8])))
    assert np.linalg.norm(rep.x) <= 1e-2
    assert rep.gaps[0].certified


def test_nonsmooth_operator_is_handled_by_doubling():
    # sign-type operator: Hoelder with nu = 0
    op = VIOperator(dim=2, eval=lambda x: np.sign(x) + 0.1 * x, sigma=0.0, mu=0.1)
    rep = ump_solve(op, euclidean(2), Ball(2, 1.0),
                    UMPConfig(1e-2, max_iter=400, x0=np.array([0.6, -0.8])), certify=False)
    assert np.linalg.norm(rep.x) <= 0.2
    assert max(rep.trace["trials"]) >= 2


def test_divergence_is_reported():
    op = VIOperator(dim=1, eval=lambda x: np.array([1e30 * np.sign(x[0] - 0.3)]), sigma=0.0)
    with pytest.raises(DivergenceError) as info:
        ump_solve(op, euclidean(1), Ball(1, 1.0),
                  UMPConfig(1e-12, delta=0.0, max_iter=20, max_doublings=5, x0=np.array([1.0])),
                  certify=False)
    assert info.value.last_M is not None


def test_restart_schedule_closed_form():
    assert restart_radius_sq(0, 4.0, 1e-3, 1.0) == 4.0
    assert restart_radius_sq(3, 4.0, 1e-3, 1.0) == pytest.approx(0.5 + 2 * (7 / 8) * 1e-3 / 4)
    assert restart_count(1e-3, 4.0) == math.floor(math.log2(8000)) + 1


def test_restarted_ump_reaches_the_solution():
    x_star = np.array([0.5, -0.3])
    op = affine_vi(2, 1.0, 0.0, 2.0, x_star=x_star)
    cfg = RestartConfig(1e-3, 1.0, 4.0, x0=np.array([-1.0, 1.0]), L0=0.1)
    rep = restarted_ump(op, euclidean(2), op.feasible, cfg)
    assert np.sum((rep.x - x_star) ** 2) <= 1e-3
    assert rep.info["restart_count"] == restart_count(1e-3, 4.0)
    expected = [restart_radius_sq(p, 4.0, 1e-3, 1.0) for p in range(1, rep.info["restart_count"] + 1)]
    assert rep.info["R_sq_schedule"] == expected
    for r in rep.restarts:
        assert r["inv_M_sum"] >= 1.0


def test_restart_records_bound_distance_by_schedule():
    op = affine_vi(3, 1.0, 1.5, 2.0, x_star=[0.2, -0.1, 0.4], seed=4)
    cfg = RestartConfig(1e-4, 1.0, 16.0, x0=np.array([2.0, 0.0, 0.0]), L0=0.05)
    rep = restarted_ump(op, euclidean(3), op.feasible, cfg)
    for r in rep.restarts:
        assert r["dist_sq"] <= r["R_sq"] + 1e-12


def test_trace_csv(tmp_path):
    op = skew_vi(1.0)
    rep = ump_solve(op, euclidean(2), op.feasible, UMPConfig(1e-2, max_iter=5, x0=np.array([1.0, 0])))
    path = tmp_path / "trace.csv"
    write_trace_csv(rep.trace, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "k,M_k,trials,inv_M_sum" and len(lines) == 6
    assert '"solver": "ump"' in rep.to_json()
