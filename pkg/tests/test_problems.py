import numpy as np
import pytest

from viprox.problems import (SaddleProblem, affine_vi, audit_monotone, audit_relative_bounded,
                             audit_saddle_constants, bilinear_saddle, constant_vi,
                             fd_relative_error, quadratic_saddle, saddle_gap, saddle_to_vi,
                             separable_saddle, skew_vi, vi_gap)
from viprox.prox import euclidean
from viprox.sets import Ball, Box


def box_saddle():
    # f = 1/2 x^2 - 1/2 y^2 on [-2, 2]^2
    Q = Box(1, -2, 2)
    return SaddleProblem(
        f=lambda x, y: float(0.5 * x @ x - 0.5 * y @ y), grad_x=lambda x, y: x,
        grad_y=lambda x, y: -y, mu_x=1, mu_y=1, L_xx=1, L_xy=0, L_yy=1, nu=1, Q_x=Q, Q_y=Q)


def grid_gap(g, xt, lo=-1.0, hi=1.0):
    # dense 1-D oracle for max_x <g(x), xt - x>
    xs = np.linspace(lo, hi, 200001)
    return max(float(g(np.array([x])) @ (xt - np.array([x]))) for x in xs[::100]), xs


def test_saddle_to_vi_examples():
    Q = Ball(1, 1.0)
    p = SaddleProblem(f=lambda x, y: float(x @ y), grad_x=lambda x, y: y, grad_y=lambda x, y: x,
                      mu_x=0, mu_y=0, L_xx=0, L_xy=1, L_yy=0, nu=1, Q_x=Q, Q_y=Q)
    G = saddle_to_vi(p)
    assert np.allclose(G(np.array([0.3, -0.8])), [-0.8, -0.3])
    rng = np.random.default_rng(0)
    B = bilinear_saddle(3, 3, seed=1)
    GB = saddle_to_vi(B)
    for _ in range(50):
        z1, z2 = rng.normal(size=6), rng.normal(size=6)
        assert (GB(z1) - GB(z2)) @ (z1 - z2) == pytest.approx(0.0, abs=1e-10)
    # f = 1/2 x^2 - 1/2 y^2 + x y: the coupling cancels in the monotonicity form
    pq = SaddleProblem(f=None, grad_x=lambda x, y: x + y, grad_y=lambda x, y: x - y,
                       mu_x=1, mu_y=1, L_xx=1, L_xy=1, L_yy=1, nu=1, Q_x=Q, Q_y=Q)
    Gq = saddle_to_vi(pq)
    for _ in range(50):
        z1, z2 = rng.normal(size=2), rng.normal(size=2)
        d = z1 - z2
        assert (Gq(z1) - Gq(z2)) @ d == pytest.approx(d @ d, rel=1e-12)


def test_saddle_gap_examples():
    p = box_saddle()
    g0 = saddle_gap(p, np.zeros(1), np.zeros(1))
    assert g0.certified and abs(g0.value) <= 1e-8
    g1 = saddle_gap(p, np.ones(1), np.zeros(1))
    assert g1.certified and g1.value == pytest.approx(0.5, abs=1e-8)
    assert g1.lower <= 0.5 + 1e-12 <= g1.upper + 2e-8


def test_saddle_gap_at_bilinear_solution():
    p = bilinear_saddle(4, 3, seed=2)
    tol = 1e-8
    cert = saddle_gap(p, *p.solution, tol=tol)
    assert cert.value <= 10 * tol


def test_saddle_gap_nonnegative_at_random_points():
    p = quadratic_saddle(3, 2, spread=1.0, seed=3)
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = p.Q_x.sample(rng, 1)[0]
        y = p.Q_y.sample(rng, 1)[0]
        c = saddle_gap(p, x, y, tol=1e-9)
        assert c.certified and c.value >= -2e-9


def test_vi_gap_examples():
    box = Box(1, -1, 1)
    assert vi_gap(constant_vi([0.0], box), box, np.zeros(1)).value == pytest.approx(0.0, abs=1e-9)
    c = vi_gap(constant_vi([1.0], box), box, np.zeros(1))
    assert c.certified and c.value == pytest.approx(1.0, abs=1e-9)
    # g(x) = x: the grid oracle says max of -x^2 over [-1, 1] is 0, not 0.25
    ident = type(constant_vi([0.0], box))(dim=1, eval=lambda x: x, sigma=0.0,
                                          affine=(np.eye(1), np.zeros(1)), name="identity")
    oracle, _ = grid_gap(ident, np.zeros(1))
    assert oracle == pytest.approx(0.0, abs=1e-12)
    assert vi_gap(ident, box, np.zeros(1)).value == pytest.approx(oracle, abs=1e-9)


def test_vi_gap_at_solutions_of_builtins():
    for op in (affine_vi(3, 1.0, 0.7, 2.0, x_star=[0.3, 0.0, -0.4]), skew_vi(1.0)):
        c = vi_gap(op, op.feasible, op.solution)
        assert c.certified and c.value <= c.tolerance + 1e-9


def test_vi_gap_sampled_path_reports_weak_certificate():
    op = affine_vi(2, 1.0, 0.0, 1.0, x_star=[0.2, 0.1])
    generic = type(op)(dim=2, eval=op.eval, sigma=0.0, name="opaque")
    xt = np.array([0.5, -0.5])
    exact = vi_gap(op, op.feasible, xt)
    sampled = vi_gap(generic, op.feasible, xt, budget=3000)
    assert sampled.lower <= exact.value + 1e-9
    assert sampled.upper >= exact.value - 1e-9
    assert "sampled" in sampled.method


def test_strong_monotonicity_of_reduction():
    p = quadratic_saddle(3, 2, mu_x=0.5, mu_y=2.0, spread=1.0, seed=5)
    op = saddle_to_vi(p)
    assert op.mu == pytest.approx(min(p.mu_x, p.mu_y))
    assert audit_monotone(op, op.feasible, 1000, tol=1e-6).passed


def test_finite_difference_consistency_of_saddles():
    rng = np.random.default_rng(6)
    for p in (bilinear_saddle(3, 2, seed=1), quadratic_saddle(3, 2, spread=1.5, seed=2),
              separable_saddle(2, 3)):
        for _ in range(100):
            x = 0.5 * p.Q_x.sample(rng, 1)[0]
            y = 0.5 * p.Q_y.sample(rng, 1)[0]
            assert fd_relative_error(lambda u: p.f(u, y), lambda u: p.grad_x(u, y), x) <= 1e-5
            assert fd_relative_error(lambda v: p.f(x, v), lambda v: p.grad_y(x, v), y) <= 1e-5


def test_declared_constants_hold():
    for p in (quadratic_saddle(3, 2, spread=2.0, seed=1), separable_saddle(), bilinear_saddle()):
        for r in audit_saddle_constants(p, 1000):
            assert r.passed, str(r)
    for op in (affine_vi(3, 1.0, 1.0, 1.5, x_star=[0.2, 0.2, 0.2]), skew_vi(2.0)):
        assert audit_monotone(op, op.feasible).passed
        assert audit_relative_bounded(op, euclidean(op.dim), op.feasible).passed


def test_audit_catches_a_misdeclared_constant():
    op = affine_vi(2, 1.0, 0.0, 1.0)
    op.mu = 3.0
    assert not audit_monotone(op, op.feasible).passed
    assert not audit_relative_bounded(op, euclidean(2), op.feasible, M=0.1).passed


def test_quadratic_saddle_solution_is_stationary():
    p = quadratic_saddle(4, 3, mu_x=2.0, mu_y=0.5, spread=1.0, seed=7)
    x, y = p.solution
    assert np.allclose(p.grad_x(x, y), 0, atol=1e-12)
    assert np.allclose(p.grad_y(x, y), 0, atol=1e-12)
