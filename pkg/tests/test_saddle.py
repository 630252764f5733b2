import math

import numpy as np
import pytest

from viprox.errors import PlanningError, RejectedInputError, UncertifiedError
from viprox.problems import SaddleProblem, quadratic_saddle, saddle_gap, separable_saddle
from viprox.saddle import (ModelOracle, fgm_solve, holder_profile, inner_max_solve, model_audit,
                           model_L, outer_budget, tolerance_plan)
from viprox.sets import Ball, Box


def remark_one(Lt, nt, d0):
    # scalar transcription of the model-constant formula, kept separate from the library
    e = (1 - nt) / (1 + nt)
    return Lt * ((Lt / (2 * d0)) * e) ** e


def toy_problem(Lxy=1.0, Lxx=0.0, nu=1.0, mu_x=1.0, mu_y=1.0):
    # f = mu_x/2 x^2 + Lxy x y - mu_y/2 y^2 on unit-length intervals
    return SaddleProblem(
        f=lambda x, y: float(0.5 * mu_x * x @ x + Lxy * x @ y - 0.5 * mu_y * y @ y),
        grad_x=lambda x, y: mu_x * x + Lxy * y, grad_y=lambda x, y: Lxy * x - mu_y * y,
        mu_x=mu_x, mu_y=mu_y, L_xx=Lxx, L_xy=Lxy, L_yy=mu_y, nu=nu,
        Q_x=Box(1, -0.5, 0.5), Q_y=Box(1, -0.5, 0.5))


def test_holder_profile_examples():
    p = holder_profile(L_xx=0.7, L_xy=1.5, mu_y=0.5, D=3.0, nu=1.0)
    assert (p.L_tilde, p.nu_tilde) == (2 * 1.5 ** 2 / 0.5 + 0.7, 1.0)
    p = holder_profile(L_xx=0.7, L_xy=1.5, mu_y=0.5, D=3.0, nu=0.0)
    assert (p.L_tilde, p.nu_tilde) == (1.5 + 0.7, 0.0)
    p = holder_profile(L_xx=1, L_xy=1, mu_y=2, D=1, nu=0.5)
    assert (p.L_tilde, p.nu_tilde) == (2.0, 1 / 3)
    with pytest.raises(RejectedInputError):
        holder_profile(1, 1, 1, 1, 1.5)


def test_model_L_examples():
    assert model_L(3.7, 1.0, 1e-9) == 3.7
    assert model_L(2.0, 0.0, 1.0) == 2.0
    assert model_L(2.0, 0.0, 0.5) == 4.0
    for nt in (0.0, 0.3, 0.8):
        assert model_L(5.0, nt, 0.01) == pytest.approx(remark_one(5.0, nt, 0.01), rel=1e-14)
    with pytest.raises(RejectedInputError):
        model_L(2.0, 0.5, 0.0)


def test_tolerance_plan_lipschitz_example():
    plan = tolerance_plan(toy_problem(), 0.1)
    assert plan.L == pytest.approx(2.0)
    assert plan.delta0 == pytest.approx(0.1 / (4 * (1 + math.sqrt(2))))
    assert plan.Delta == pytest.approx(plan.delta0)
    assert plan.sweeps == 0
    assert plan.delta * plan.accumulation <= 0.05 + 1e-15


def test_tolerance_plan_holder_fixed_point():
    prob = toy_problem(nu=0.5, Lxx=0.2)
    plan = tolerance_plan(prob, 1e-2)
    cap = 1e-2 / (4 * (1 + math.sqrt(plan.L / prob.mu_x)))
    assert plan.delta0 <= cap
    assert plan.delta0 == pytest.approx(cap, rel=1e-6)
    assert plan.L == pytest.approx(model_L(plan.profile.L_tilde, 1 / 3, plan.delta0))
    assert plan.Delta_tilde == pytest.approx((plan.Delta / prob.L_xy) ** 2)
    assert plan.delta * plan.accumulation <= 0.5e-2 * (1 + 1e-12)


def test_nu_zero_plan_needs_small_coupling():
    with pytest.raises(PlanningError):
        tolerance_plan(toy_problem(nu=0.0, Lxy=1.0), 1e-2)


def test_outer_budget_law():
    assert outer_budget(2.0, 1.0, 1.0, 1e-3) == math.ceil(2 * math.sqrt(2) * math.log(4000))
    assert outer_budget(1.0, 1.0, 0.01, 1.0) == 1


def test_inner_max_examples():
    c = np.array([0.2, -0.1])
    prob = SaddleProblem(f=lambda x, y: float(-0.5 * 2.0 * np.sum((y - c) ** 2)),
                         grad_x=lambda x, y: np.zeros(1), grad_y=lambda x, y: -2.0 * (y - c),
                         mu_x=1, mu_y=2, L_xx=1, L_xy=0, L_yy=2, nu=1,
                         Q_x=Ball(1), Q_y=Ball(2, 1.0))
    r = inner_max_solve(prob, np.zeros(1), 1e-10)
    assert np.allclose(r.y, c, atol=1e-10)
    r = inner_max_solve(prob, np.zeros(1), 5.0)
    assert r.iterations == 0 and prob.Q_y.contains(r.y)


def test_inner_max_against_linear_system():
    prob = quadratic_saddle(3, 2, spread=1.0, seed=4)
    rng = np.random.default_rng(0)
    unconstrained = prob.params["y_star_unconstrained"]
    for _ in range(20):
        x = 0.3 * prob.Q_x.sample(rng, 1)[0]
        y_exact = unconstrained(x)
        if y_exact is None:
            continue
        r = inner_max_solve(prob, x, 1e-6)
        assert np.linalg.norm(r.y - y_exact) <= 1e-6


def test_inner_max_budget_exhaustion():
    prob = quadratic_saddle(3, 2, spread=2.0, seed=4)
    with pytest.raises(UncertifiedError):
        inner_max_solve(prob, np.ones(3) * 0.1, 1e-12, max_iter=2)


def test_inexact_gradient_within_Delta_and_y_star_holder():
    prob = quadratic_saddle(3, 2, seed=2)
    plan = tolerance_plan(prob, 1e-3)
    oracle = ModelOracle(prob, plan)
    rng = np.random.default_rng(1)
    X = prob.Q_x.sample(rng, 50)
    for x in X:
        exact = prob.grad_x(x, prob.y_star(x))
        assert np.linalg.norm(oracle.grad(x, warm=False) - exact) <= plan.Delta
    k = 2 * prob.L_xy / prob.mu_y
    for x1, x2 in zip(X[:-1], X[1:]):
        lhs = np.linalg.norm(prob.y_star(x1) - prob.y_star(x2))
        assert lhs <= k * np.linalg.norm(x1 - x2) + 1e-6


@pytest.mark.parametrize("spread", [0.0, 2.0])
def test_model_inequality_audit(spread):
    prob = quadratic_saddle(3, 2, spread=spread, seed=1)
    lo, hi = model_audit(prob, tolerance_plan(prob, 1e-3), n_pairs=200)
    assert lo >= 0 and hi >= 0


def test_separable_converges_from_any_start():
    prob = separable_saddle(2, 2, mu_x=1.0, mu_y=0.5, radius=1.0)
    x, y, rep = fgm_solve(prob, 1e-4, x0=np.array([0.6, -0.8]))
    assert rep.gaps[0].certified and rep.gaps[0].value <= 1e-4
    assert np.linalg.norm(x) <= 1e-2


@pytest.mark.parametrize("spread", [0.0, 2.0])
def test_quadratic_bilinear_reaches_target(spread):
    prob = quadratic_saddle(3, 2, spread=spread, seed=1)
    x, y, rep = fgm_solve(prob, 1e-3, x0=np.array([2.0, -1.0, 1.0]), track_values=True)
    plan = rep.info["plan"]
    assert rep.iterations == outer_budget(plan["L"], prob.mu_x, plan["R_x"], 1e-3)
    gap = saddle_gap(prob, x, y, tol=1e-9)
    assert gap.certified and gap.value <= 1e-3
    vals = rep.info["values"]
    assert all(b <= a + plan["delta"] for a, b in zip(vals, vals[1:]))
