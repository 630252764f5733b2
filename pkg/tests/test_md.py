import math

import numpy as np
import pytest

from viprox.errors import RejectedInputError
from viprox.mirror_descent import MDConfig, md_solve
from viprox.problems import affine_vi, constant_vi, vi_gap
from viprox.prox import entropy, euclidean
from viprox.sets import Box, Simplex


def test_config_constants():
    cfg = MDConfig(epsilon=0.05, M=1.0, R_sq=0.5)
    assert cfg.step == pytest.approx(0.05)
    assert cfg.iterations == 400
    with pytest.raises(RejectedInputError):
        MDConfig(epsilon=0.0, M=1.0, R_sq=1.0)
    with pytest.raises(RejectedInputError):
        MDConfig(epsilon=0.1, M=1.0, R_sq=1.0, sigma=-1.0)


def test_identity_operator_on_ball():
    op = affine_vi(2, 1.0, 0.0, 1.0)
    x0 = np.array([0.6, 0.8])
    rep = md_solve(op, euclidean(2), op.feasible, MDConfig(0.05, op.M, 2.0, x0=x0),
                   probes=op.feasible.sample(np.random.default_rng(0), 5))
    assert rep.iterations == math.ceil(2 * 2.0 * op.M ** 2 / 0.05 ** 2)
    assert rep.gaps[0].certified and rep.gaps[0].value <= 0.05
    assert rep.info["descent_violation"] <= 1e-8
    assert rep.info["gap_bound"] <= 0.05 + 1e-12


def test_constant_operator_moves_against_the_field():
    box = Box(1, -1, 1)
    op = constant_vi([1.0], box)
    rep = md_solve(op, euclidean(1), box, MDConfig(0.1, 1.0, 2.0, x0=np.array([1.0])))
    # gap of the average is x~ + 1 for this operator, certified by the linear max
    assert rep.gaps[0].value == pytest.approx(rep.x[0] + 1.0, abs=1e-9)
    assert rep.gaps[0].value <= 0.1


def test_entropy_geometry_on_simplex():
    rng = np.random.default_rng(1)
    S = rng.normal(size=(4, 4))
    A = np.eye(4) + (S - S.T) / 2
    x_star = np.full(4, 0.25)
    op = type(constant_vi([0.0], Simplex(1)))(
        dim=4, eval=lambda x: A @ (x - x_star), sigma=0.0, affine=(A, -A @ x_star), name="simplex-vi")
    # l_inf bound of the operator on the simplex gives M; max V(x, uniform) is log n
    M = float(np.abs(A).sum(axis=1).max())
    setup = entropy(4)
    eps = 0.1
    rep = md_solve(op, setup, Simplex(4), MDConfig(eps, M, math.log(4), x0=x_star.copy()))
    g = vi_gap(op, Simplex(4), rep.x)
    assert g.certified and g.value <= eps


def test_sigma_enters_the_target():
    op = affine_vi(2, 1.0, 0.0, 1.0)
    rep = md_solve(op, euclidean(2), op.feasible, MDConfig(0.1, op.M, 2.0, sigma=0.02,
                                                           x0=np.array([1.0, 0.0])))
    assert rep.info["target"] == pytest.approx(0.12)


def test_infeasible_start_rejected():
    op = affine_vi(2, 1.0, 0.0, 1.0)
    with pytest.raises(RejectedInputError):
        md_solve(op, euclidean(2), op.feasible, MDConfig(0.1, 1.0, 1.0, x0=np.array([3.0, 0.0])))
